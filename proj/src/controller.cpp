#include "invnav/controller.hpp"

#include <algorithm>
#include <cmath>

namespace invnav {

double omega_bound(const ControlGains& g) { return g.k2 * (kPi / 2.0) + g.k1; }

double tanh_over_r(double r) {
  // Series below 1e-8 where tanh(r)/r would hit 0/0; 1 - r^2/3 is exact to
  // double precision there.
  if (r < 1e-8) return 1.0 - r * r / 3.0;
  return std::tanh(r) / r;
}

std::optional<ControllerState> make_controller_state(const Pose2D& pose, const Vec2& waypoint) {
  const Vec2 offset = pose.position - waypoint;
  const double range = norm(offset);
  if (range < 1e-12) return std::nullopt;

  ControllerState s;
  s.range = range;
  s.rel_bearing = wrap_angle(pose.heading - bearing_of(offset));
  s.alignment = std::cos(s.rel_bearing) < 0.0 ? AxisAlignment::kAntiparallel
                                              : AxisAlignment::kParallel;
  return s;
}

double orientation_error(const ControllerState& s) {
  if (s.alignment == AxisAlignment::kAntiparallel) {
    return wrap_angle(s.rel_bearing - sgn(s.rel_bearing) * kPi);
  }
  return wrap_angle(s.rel_bearing);
}

ControlCommand control(const ControllerState& s, const ControlGains& g) {
  const double sig = orientation_error(s);
  const double cos_dir = sgn(std::cos(s.rel_bearing));

  ControlCommand cmd;
  cmd.v = -g.k1 * std::tanh(s.range) * cos_dir;
  cmd.omega = -g.k2 * std::sqrt(std::fabs(sig)) * sgn(sig) -
              g.k1 * tanh_over_r(s.range) * cos_dir * std::sin(s.rel_bearing);

  // Inert for states produced by make_controller_state (|sigma| <= pi/2
  // there); keeps the bound for branches that drifted past it.
  const double cap = omega_bound(g);
  cmd.omega = std::clamp(cmd.omega, -cap, cap);
  cmd.v = std::clamp(cmd.v, -g.k1, g.k1);
  return cmd;
}

}  // namespace invnav
