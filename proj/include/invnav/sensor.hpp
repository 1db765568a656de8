#pragma once

#include <span>
#include <vector>

#include "invnav/geometry.hpp"

namespace invnav {

// A circular body visible to the range sensor, in the global frame.
struct SensedBody {
  Vec2 center;
  double radius = 0.0;
  Vec2 velocity;  // global frame m/s
};

// Simulated 360-degree range scan: one ray per beam bearing, nearest
// surface hit within max_range tagged with the body's relative velocity in
// ego axes; free beams report a static max-range return.
std::vector<MeasurementTuple> raycast_scan(const Pose2D& sensor_pose, const Vec2& sensor_velocity,
                                           std::span<const SensedBody> bodies, int n_beams,
                                           double max_range);

}  // namespace invnav
