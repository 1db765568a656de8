#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invnav/geometry.hpp"

namespace invnav {

// Safety-constraint variants for uncertain velocity measurements. The
// conservative modes replace uncertain quantities with worst-case bounds.
enum class ConstraintMode {
  kNominal,     // trust measured velocity vectors as-is
  kWorstBoth,   // direction and magnitude uncertain: every surface return may move at v_max
  kKnownSpeed,  // direction uncertain, magnitude trusted
  kKnownDir,    // magnitude uncertain, direction trusted
};

const char* to_string(ConstraintMode mode);
bool parse_constraint_mode(const std::string& text, ConstraintMode* out);

struct PlannerConfig {
  int n_beams = 64;       // angular discretization
  double plan_hz = 10.0;  // planning frequency [Hz]
  double max_range = 4.0; // sensing limit [m]
  double epsilon = 1e-3;  // strict-inequality margin [m]
  ConstraintMode mode = ConstraintMode::kNominal;
  double v_max = 0.5;     // neighbor speed bound for the conservative modes [m/s]
  double inflation = 0.0; // ego footprint radius added to every clearance [m]

  double period() const { return 1.0 / plan_hz; }
  // A candidate disc must fit inside sensed space; beyond max_range nothing
  // is known.
  double disc_cap() const { return 0.5 * max_range; }
};

// Max safe disc radius per candidate bearing, one entry per beam.
struct PlannerFunction {
  std::vector<double> bearings;
  std::vector<double> radii;  // each in [0, disc_cap]
};

struct WaypointChoice {
  Vec2 waypoint;       // ego frame; |waypoint| == radius
  double radius = 0.0; // disc radius; 0 means stop (boxed in)
  int beam_index = 0;
  bool latched = false; // waypoint reached the target within epsilon
};

// Beam/bin bearings: n evenly spaced angles in (-pi, pi] starting at 0
// (beam 0 is dead ahead).
std::vector<double> beam_bearings(int n_beams);

// The per-measurement safety requirement, reduced to one geometric form:
// the point, swept `travel` meters along `dir`, must keep more than
// `clearance` distance from the candidate disc for the whole period.
// Static constraints are the travel = 0 case.
struct SweptConstraint {
  Vec2 point;
  Vec2 dir;              // unit; irrelevant when travel == 0
  double travel = 0.0;   // displacement over one planning period [m]
  double clearance = 0.0;
};

bool is_free_space_return(const MeasurementTuple& m, const PlannerConfig& cfg);
SweptConstraint swept_constraint(const MeasurementTuple& m, const PlannerConfig& cfg);

// Largest d such that the swept segment stays strictly clear of the disc of
// radius d centered d meters along bearing_unit. +inf when the constraint
// never binds; 0 when even the degenerate point-disc is violated.
double max_disc_radius(const SweptConstraint& c, const Vec2& bearing_unit);

// Largest admissible disc radius along one bearing: min over measurements
// of the closed-form bound, minus epsilon, clamped to [0, disc_cap]; 0 when
// everything is blocked (stop semantics).
double max_safe_radius(double bearing, std::span<const MeasurementTuple> m,
                       const PlannerConfig& cfg);

// Evaluates every bin. Bins are independent; results are bitwise identical
// for any worker count.
PlannerFunction build_planner_function(std::span<const MeasurementTuple> m,
                                       const PlannerConfig& cfg, int workers = 1);

// Mode-resolved safety predicate for one measurement against a candidate
// disc. This is the reference inequality the closed forms solve; the
// verification oracle bisects on it.
bool constraint_satisfied(const MeasurementTuple& m, const InvariantDisc& disc,
                          const PlannerConfig& cfg);

// Greedy waypoint: per bin the best reachable point toward the target is
// the clamped scalar projection; the bin minimizing |W - T| wins, ties to
// the lowest index.
WaypointChoice select_waypoint(const PlannerFunction& d, const Vec2& target_ego,
                               const PlannerConfig& cfg);

// Congestion-aware selection used by the navigation loop. Candidates are
// the greedy argmin restricted to bins whose disc clears a progress floor
// (several floor levels) plus the unrestricted greedy; the highest floor
// whose progress stays within tolerance of the best wins. A bearing window
// around the previous waypoint adds hysteresis so near-ties do not flip
// sides between instances. Identical to select_waypoint in open space; in
// head-on encounters the floor turns the mutual-blocking equilibrium into
// an exact tie, which the lowest-index rule resolves to the same relative
// side for both parties.
WaypointChoice select_waypoint_with_detour(const PlannerFunction& d, const Vec2& target_ego,
                                           const PlannerConfig& cfg,
                                           std::optional<double> prev_bearing_ego = {});

}  // namespace invnav
