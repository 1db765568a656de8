#pragma once

#include <optional>

#include "invnav/geometry.hpp"

namespace invnav {

struct ControlGains {
  double k1 = 0.2;  // linear-velocity gain; also the bound |v| <= k1  [m/s]
  double k2 = 1.0;  // orientation gain  [rad^(1/2)/s]
};

// Saturation level for the angular rate: k2*(pi/2) + k1. Gains are chosen
// so this stays within the platform's actuator limit.
double omega_bound(const ControlGains& g);

// Heading alignment relative to the axis that runs from the waypoint
// through the agent, frozen from the relative bearing at the instant
// navigation toward the waypoint begins. Parallel stabilizes a reversed
// approach, antiparallel a forward one.
enum class AxisAlignment { kParallel, kAntiparallel };

struct ControllerState {
  double range = 0.0;        // distance to the waypoint [m]
  double rel_bearing = 0.0;  // heading relative to the waypoint->agent axis, (-pi, pi]
  AxisAlignment alignment = AxisAlignment::kParallel;
};

struct ControlCommand {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
};

// Deterministic signum: sgn(0) = +1, so identical states always replay to
// identical commands.
inline double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

// tanh(r)/r extended continuously through r = 0.
double tanh_over_r(double r);

// Feedback state relative to a waypoint. Empty when the agent already sits
// on the waypoint; the caller treats the target as reached.
std::optional<ControllerState> make_controller_state(const Pose2D& pose, const Vec2& waypoint);

// Orientation error toward the frozen equilibrium (rel_bearing 0 for
// parallel, ±pi for antiparallel). Within |pi/2| at invocation time.
double orientation_error(const ControllerState& s);

// The feedback law. |v| <= k1 and |omega| <= omega_bound(g) hold for any
// state, drifted branches included.
ControlCommand control(const ControllerState& s, const ControlGains& g);

}  // namespace invnav
