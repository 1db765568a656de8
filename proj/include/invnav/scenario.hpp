#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "invnav/controller.hpp"
#include "invnav/planner.hpp"

namespace invnav {

enum class Strategy { kInvariantSet, kDecoupledBaseline };

const char* to_string(Strategy s);
bool parse_strategy(const std::string& text, Strategy* out);

// Decoupled comparison strategy: pure pursuit along the pre-planned
// straight start->target segment plus a reactive stop-and-turn override.
// Saturations are shared with the proposed controller for fairness.
struct BaselineParams {
  double safety_distance = 0.6;   // range below which a return counts as a threat [m]
  double cone_half_angle = 0.7;   // heading cone scanned for threats [rad]
  double lookahead = 0.5;         // pursuit point offset along the segment [m]
  double v_cruise = 0.2;          // nominal tracking speed, capped at k1 [m/s]
  double k_heading = 2.0;         // proportional heading gain [1/s]
  double turn_rate = 1.0;         // avoidance turn rate, capped at the omega bound [rad/s]
  double creep_speed = 0.06;      // forward speed while turning away from a distant threat [m/s]
  double hard_stop = 0.3;         // threat range below which the agent halts while turning [m]
  double stop_distance = 0.02;    // arrival radius [m]
};

struct AgentSpec {
  int id = 0;
  double radius = 0.08;
  Pose2D start;
  Vec2 target;
  ControlGains gains;
  PlannerConfig planner;
  Strategy strategy = Strategy::kInvariantSet;
  BaselineParams baseline;
};

// Scripted moving disc obstacle. Position follows the waypoint list
// piecewise-linearly; it is parked at the ends of the script.
struct ObstacleScript {
  double radius = 0.3;
  std::vector<std::array<double, 3>> waypoints;  // (t, x, y), t ascending

  Vec2 position(double t) const;
  Vec2 velocity(double t) const;
};

// Seeded crowd generators. Scatter places starts and targets uniformly
// over a disc arena with separation floors; ring places agents on a
// jittered circle with targets near their antipodes, which funnels every
// path through the middle (the conflict-rich family used for strategy
// comparisons).
enum class CrowdPattern { kScatter, kRing };

struct CrowdSpec {
  CrowdPattern pattern = CrowdPattern::kScatter;
  int n_agents = 4;
  double arena_radius = 3.0;    // placement disc / ring radius [m]
  double min_separation = 0.7;  // between starts and between targets [m]
  double min_travel = 2.5;      // |start - target| floor, scatter only [m]
};

struct ScenarioConfig {
  std::string name = "scenario";
  double dt = 1e-3;        // integration step [s]
  double timeout = 120.0;  // simulated seconds
  double delta = 0.05;     // convergence threshold |pos - target| [m]
  std::uint64_t seed = 1;

  ControlGains gains;          // defaults applied to every agent
  PlannerConfig planner;       // defaults applied to every agent
  BaselineParams baseline;     // defaults applied to every agent
  double omega_max = 0.0;      // optional platform limit; 0 disables the check

  std::vector<AgentSpec> agents;
  std::vector<ObstacleScript> obstacles;
  std::optional<CrowdSpec> crowd;

  int workers = 1;        // worker threads for the planner-function build
  bool timings = false;   // record planning wall-clock (non-reproducible bytes)
};

struct ScenarioError : std::runtime_error {
  ScenarioError(int line_number, const std::string& message);
  int line = 0;
};

// Flat TOML-style text: [section] headers, [[agents]]/[[obstacles]] tables,
// key = value pairs with numbers, booleans, quoted strings and (nested)
// numeric arrays. Unknown keys and malformed lines raise ScenarioError with
// the offending line number.
ScenarioConfig parse_scenario(std::istream& in, const std::string& name = "scenario");
ScenarioConfig load_scenario(const std::string& path);

// Expands the crowd block (if any) into concrete agents using the scenario
// seed. Idempotent once agents exist.
void materialize_crowd(ScenarioConfig& cfg);

// Programmatic scenarios used by the randomized suites: scattered random
// crossings, and jittered antipodal ring exchanges for paired
// proposed-vs-decoupled comparisons.
ScenarioConfig make_crowd_scenario(int n_agents, std::uint64_t seed, Strategy strategy);
ScenarioConfig make_ring_scenario(int n_agents, std::uint64_t seed, Strategy strategy);

}  // namespace invnav
