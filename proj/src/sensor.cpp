#include "invnav/sensor.hpp"

#include "invnav/planner.hpp"

namespace invnav {

std::vector<MeasurementTuple> raycast_scan(const Pose2D& sensor_pose, const Vec2& sensor_velocity,
                                           std::span<const SensedBody> bodies, int n_beams,
                                           double max_range) {
  const std::vector<double> bearings = beam_bearings(n_beams);
  std::vector<MeasurementTuple> scan(bearings.size());

  for (size_t i = 0; i < bearings.size(); ++i) {
    const Vec2 dir = unit_from_angle(sensor_pose.heading + bearings[i]);
    double nearest = max_range;
    const SensedBody* hit_body = nullptr;
    for (const auto& body : bodies) {
      const auto t = ray_circle_first_hit(sensor_pose.position, dir, body.center, body.radius);
      if (t.has_value() && *t <= nearest) {
        nearest = *t;
        hit_body = &body;
      }
    }
    MeasurementTuple m;
    m.range = nearest;
    m.bearing = bearings[i];
    if (hit_body != nullptr) {
      m.velocity = rotated(hit_body->velocity - sensor_velocity, -sensor_pose.heading);
    }
    scan[i] = m;
  }
  return scan;
}

}  // namespace invnav
