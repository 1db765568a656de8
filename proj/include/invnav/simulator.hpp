#pragma once

#include <optional>
#include <span>
#include <vector>

#include "invnav/scenario.hpp"
#include "invnav/sensor.hpp"
#include "invnav/trajectory_log.hpp"

namespace invnav {

struct AgentState {
  AgentSpec spec;
  Pose2D pose;
  ControlCommand cmd;
  double next_plan_time = 0.0;
  int plan_count = 0;

  // Active invariant disc (global frame) for the running planning period.
  bool has_disc = false;
  Vec2 disc_center;
  double disc_radius = 0.0;
  AxisAlignment alignment = AxisAlignment::kParallel;

  // Last non-stop waypoint (global frame), feeding the selection hysteresis.
  bool has_prev_waypoint = false;
  Vec2 prev_waypoint;

  bool latched = false;
  bool avoiding = false;  // baseline stop-and-turn engaged
  double converged_at = -1.0;
  std::vector<std::string> pending_events;  // attached to the next log row
  bool drift_flagged = false;
  bool invariance_flagged = false;
};

struct WorldState {
  double time = 0.0;
  std::vector<AgentState> agents;
  std::vector<ObstacleScript> obstacles;
};

struct AgentOutcome {
  int id = 0;
  bool converged = false;
  double time_to_target = -1.0;
  int plan_events = 0;
  int boxed_events = 0;
  int branch_drift_events = 0;
};

struct RunStats {
  bool all_converged = false;
  double completion_time = -1.0;
  double min_agent_clearance = 0.0;     // min over time of surface-to-surface distance
  double min_obstacle_clearance = 0.0;  // +inf when there are no obstacles
  long safety_violations = 0;           // one-period propagation audit failures
  long invariance_violations = 0;       // positions escaping their active disc
  std::vector<AgentOutcome> agents;
  std::vector<double> plan_ms;          // per planning event, timings mode only
};

struct RunResult {
  TrajectoryLog log;
  RunStats stats;
};

// Velocity vector induced by a held command at the given pose.
Vec2 command_velocity(const Pose2D& pose, const ControlCommand& cmd);

// Scan for one agent against every other body in the world, using the
// currently held commands as ground-truth velocities.
std::vector<MeasurementTuple> simulate_lidar(const WorldState& world, size_t agent_index);

struct PlanOutput {
  WaypointChoice choice;           // ego frame
  ControlCommand cmd;
  Vec2 waypoint_global;
  std::optional<AxisAlignment> alignment;  // set when a controller was engaged
  bool boxed = false;
};

// One planning iteration: build the planner function, pick the waypoint,
// compute the command to hold until the next instance.
PlanOutput step_agent(const AgentState& agent, std::span<const MeasurementTuple> m,
                      int workers = 1);

// Decoupled comparison strategy (pure pursuit + reactive stop-and-turn).
ControlCommand baseline_step(const AgentState& agent, std::span<const MeasurementTuple> m);

// One RK4 step of the global unicycle form under a held command; the
// returned heading is wrapped.
Pose2D rk4_step(const Pose2D& pose, const ControlCommand& cmd, double dt);

// RK4 on the global unicycle form with held commands; wraps headings and
// advances time. The polar feedback form is singular at the waypoint, so
// integration always runs in the global frame.
void integrate(WorldState& world, double dt);

WorldState make_world(const ScenarioConfig& cfg);

// Full deterministic episode: staggered per-agent planning at f_p, RK4
// between instances, safety/invariance monitoring, per-instance logging.
RunResult run_scenario(const ScenarioConfig& cfg);

}  // namespace invnav
