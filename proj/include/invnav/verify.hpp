#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invnav/controller.hpp"
#include "invnav/planner.hpp"
#include "invnav/rng.hpp"

namespace invnav {

struct VerifyOptions {
  int seeds = 1;
  bool quick = false;  // reduced sample counts, short wall-clock
  std::uint64_t base_seed = 20240817;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

// Independent reference for max_safe_radius: bisects the disc size on the
// conjunction of constraint_satisfied predicates (60 iterations), then
// applies the same epsilon/cap pipeline. Shares no algebra with the
// closed-form solver.
double oracle_max_safe_radius(double bearing, std::span<const MeasurementTuple> m,
                              const PlannerConfig& cfg, int iterations = 60);

// One sampled-feedback closed-loop episode of the controller against a
// fixed waypoint: command recomputed at plan_hz from the current state with
// the branch frozen at t = 0, RK4 in between.
struct ClosedLoopRun {
  double r0 = 0.0;
  double sigma0 = 0.0;
  double t_star = 0.0;        // analytic orientation-convergence time 2*sqrt(|sigma0|)/k2
  double max_r = 0.0;         // over the whole episode
  bool r_monotone = true;     // per-sample increase never above 1e-6
  double max_sigma_late = 0.0;        // max |sigma(t)| for t >= t_star + pad
  double max_equilibrium_err = 0.0;   // distance of the bearing to {0, pi} after t_star + pad
};

ClosedLoopRun closed_loop_run(Rng& rng, double dt = 1e-3, double plan_hz = 10.0,
                              double pad = 0.05);

// Random measurement set in the style of a crowded scan: surface points
// (static and moving) plus free-space max-range returns.
std::vector<MeasurementTuple> random_measurement_set(Rng& rng, const PlannerConfig& cfg,
                                                     int n_points);

// The full oracle suite: geometry cross-checks, controller bounds and
// convergence, planner bisection equivalence, one-period safety,
// conservativity ordering, partition determinism, dual integration, and a
// two-agent exchange smoke scenario.
VerifyReport run_verification(const VerifyOptions& options);

}  // namespace invnav
