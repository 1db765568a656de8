#include "invnav/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "invnav/rng.hpp"

namespace invnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<SensedBody> world_bodies(const WorldState& w) {
  std::vector<SensedBody> bodies;
  bodies.reserve(w.agents.size() + w.obstacles.size());
  for (const auto& a : w.agents) {
    bodies.push_back({a.pose.position, a.spec.radius, command_velocity(a.pose, a.cmd)});
  }
  for (const auto& o : w.obstacles) {
    bodies.push_back({o.position(w.time), o.radius, o.velocity(w.time)});
  }
  return bodies;
}

std::vector<MeasurementTuple> scan_excluding(const std::vector<SensedBody>& bodies, size_t self,
                                             const Pose2D& pose, const Vec2& self_vel,
                                             const PlannerConfig& p) {
  std::vector<SensedBody> others;
  others.reserve(bodies.size() > 0 ? bodies.size() - 1 : 0);
  for (size_t j = 0; j < bodies.size(); ++j) {
    if (j != self) others.push_back(bodies[j]);
  }
  return raycast_scan(pose, self_vel, others, p.n_beams, p.max_range);
}

Vec2 baseline_goal(const AgentState& a) {
  const Vec2 seg_start = a.spec.start.position;
  const Vec2 seg_end = a.spec.target;
  const Vec2 seg = seg_end - seg_start;
  const double len = norm(seg);
  if (len < 1e-12) return seg_end;
  const Vec2 u = seg * (1.0 / len);
  const double s = std::clamp(dot(a.pose.position - seg_start, u), 0.0, len);
  return seg_start + u * std::min(s + a.spec.baseline.lookahead, len);
}

// Nearest return inside the avoidance cone, if any.
struct BaselineThreat {
  double range = 0.0;
  double bearing = 0.0;
};
std::optional<BaselineThreat> baseline_threat(const AgentState& a,
                                              std::span<const MeasurementTuple> m) {
  const auto& bp = a.spec.baseline;
  double best_range = kInf;
  double bearing = 0.0;
  for (const auto& t : m) {
    if (t.range < bp.safety_distance && std::fabs(t.bearing) <= bp.cone_half_angle &&
        t.range < best_range) {
      best_range = t.range;
      bearing = t.bearing;
    }
  }
  if (!std::isfinite(best_range)) return std::nullopt;
  return BaselineThreat{best_range, bearing};
}

// Propagates every measurement by its constant velocity over one planning
// period and counts endpoints that encroach within the inflation margin of
// the chosen disc.
long one_period_audit(const PlanOutput& out, std::span<const MeasurementTuple> m,
                      const PlannerConfig& p) {
  if (out.boxed || out.choice.radius <= 0.0) return 0;
  const InvariantDisc disc{out.choice.waypoint, out.choice.radius};
  long violations = 0;
  for (const auto& t : m) {
    const Vec2 end = t.point() + t.velocity * p.period();
    if (d_min(end, disc) < p.inflation - 1e-9) ++violations;
  }
  return violations;
}

std::string join_events(std::vector<std::string>& events) {
  std::string out;
  for (size_t i = 0; i < events.size(); ++i) {
    if (i > 0) out += ';';
    out += events[i];
  }
  events.clear();
  return out;
}

}  // namespace

Vec2 command_velocity(const Pose2D& pose, const ControlCommand& cmd) {
  return unit_from_angle(pose.heading) * cmd.v;
}

std::vector<MeasurementTuple> simulate_lidar(const WorldState& world, size_t agent_index) {
  const auto bodies = world_bodies(world);
  const auto& a = world.agents[agent_index];
  return scan_excluding(bodies, agent_index, a.pose, command_velocity(a.pose, a.cmd),
                        a.spec.planner);
}

PlanOutput step_agent(const AgentState& a, std::span<const MeasurementTuple> m, int workers) {
  PlanOutput out;
  const Vec2 target_ego = rotated(a.spec.target - a.pose.position, -a.pose.heading);
  const PlannerFunction d = build_planner_function(m, a.spec.planner, workers);
  std::optional<double> prev_bearing;
  if (a.has_prev_waypoint) {
    const Vec2 rel = a.prev_waypoint - a.pose.position;
    if (norm(rel) > 0.05) prev_bearing = wrap_angle(bearing_of(rel) - a.pose.heading);
  }
  out.choice = select_waypoint_with_detour(d, target_ego, a.spec.planner, prev_bearing);
  if (out.choice.radius <= 0.0) {
    out.boxed = true;
    out.waypoint_global = a.pose.position;
    return out;
  }
  out.waypoint_global = a.pose.position + rotated(out.choice.waypoint, a.pose.heading);
  const auto state = make_controller_state(a.pose, out.waypoint_global);
  if (state.has_value()) {
    out.cmd = control(*state, a.spec.gains);
    out.alignment = state->alignment;
  }
  return out;
}

ControlCommand baseline_step(const AgentState& a, std::span<const MeasurementTuple> m) {
  const auto& bp = a.spec.baseline;
  const double v_cap = a.spec.gains.k1;
  const double w_cap = omega_bound(a.spec.gains);

  if (norm(a.spec.target - a.pose.position) <= bp.stop_distance) return {0.0, 0.0};

  if (const auto threat = baseline_threat(a, m)) {
    // Turn away from the nearest threat; keep creeping unless it is close,
    // so mutual standoffs drift apart instead of freezing.
    ControlCommand cmd;
    cmd.omega = -sgn(threat->bearing) * std::min(bp.turn_rate, w_cap);
    cmd.v = threat->range > bp.hard_stop ? std::min(bp.creep_speed, v_cap) : 0.0;
    return cmd;
  }

  const Vec2 goal = baseline_goal(a);
  const double err = wrap_angle(bearing_of(goal - a.pose.position) - a.pose.heading);
  ControlCommand cmd;
  cmd.omega = std::clamp(bp.k_heading * err, -w_cap, w_cap);
  cmd.v = std::fabs(err) < kPi / 2.0 ? std::min(bp.v_cruise, v_cap) * std::cos(err) : 0.0;
  return cmd;
}

Pose2D rk4_step(const Pose2D& pose, const ControlCommand& cmd, double dt) {
  const double v = cmd.v;
  const double w = cmd.omega;
  struct State { double x, y, h; };
  const State s0{pose.position.x, pose.position.y, pose.heading};
  auto deriv = [v, w](const State& s) { return State{v * std::cos(s.h), v * std::sin(s.h), w}; };
  auto advance = [](const State& s, const State& k, double step) {
    return State{s.x + step * k.x, s.y + step * k.y, s.h + step * k.h};
  };
  const State k1 = deriv(s0);
  const State k2 = deriv(advance(s0, k1, 0.5 * dt));
  const State k3 = deriv(advance(s0, k2, 0.5 * dt));
  const State k4 = deriv(advance(s0, k3, dt));
  Pose2D out;
  out.position.x = s0.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  out.position.y = s0.y + dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
  out.heading = wrap_angle(s0.h + dt / 6.0 * (k1.h + 2.0 * k2.h + 2.0 * k3.h + k4.h));
  return out;
}

void integrate(WorldState& world, double dt) {
  for (auto& a : world.agents) a.pose = rk4_step(a.pose, a.cmd, dt);
  world.time += dt;
}

WorldState make_world(const ScenarioConfig& cfg) {
  WorldState world;
  world.obstacles = cfg.obstacles;
  world.agents.reserve(cfg.agents.size());
  for (const auto& spec : cfg.agents) {
    AgentState a;
    a.spec = spec;
    a.pose = spec.start;
    world.agents.push_back(std::move(a));
  }
  return world;
}

RunResult run_scenario(const ScenarioConfig& cfg_in) {
  ScenarioConfig cfg = cfg_in;
  materialize_crowd(cfg);
  WorldState world = make_world(cfg);
  const size_t n = world.agents.size();

  // Planning instances of different agents are deliberately unsynchronized:
  // each agent gets a seed-derived phase offset inside its first period.
  Rng phase_rng(cfg.seed * 0x9e3779b97f4a7c15ull + 0x0ff5e7ull);
  std::vector<double> offsets(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    offsets[i] = phase_rng.u01() * world.agents[i].spec.planner.period();
    world.agents[i].next_plan_time = offsets[i];
  }

  RunResult result;
  RunStats& stats = result.stats;
  stats.min_agent_clearance = kInf;
  stats.min_obstacle_clearance = kInf;
  stats.agents.resize(n);
  for (size_t i = 0; i < n; ++i) stats.agents[i].id = world.agents[i].spec.id;

  auto monitor_clearances = [&]() {
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        const double d = norm(world.agents[i].pose.position - world.agents[j].pose.position) -
                         world.agents[i].spec.radius - world.agents[j].spec.radius;
        stats.min_agent_clearance = std::min(stats.min_agent_clearance, d);
      }
      for (const auto& o : world.obstacles) {
        const double d = norm(world.agents[i].pose.position - o.position(world.time)) -
                         world.agents[i].spec.radius - o.radius;
        stats.min_obstacle_clearance = std::min(stats.min_obstacle_clearance, d);
      }
    }
  };
  monitor_clearances();

  const long max_ticks = std::lround(cfg.timeout / cfg.dt);
  for (long tick = 0; tick < max_ticks; ++tick) {
    const double t = static_cast<double>(tick) * cfg.dt;
    world.time = t;

    bool any_due = false;
    for (const auto& a : world.agents) {
      if (t >= a.next_plan_time - 1e-9) {
        any_due = true;
        break;
      }
    }
    if (any_due) {
      // All agents planning this tick sense the same pre-update snapshot,
      // so in-tick planning order cannot leak into the results.
      const auto bodies = world_bodies(world);
      for (size_t i = 0; i < n; ++i) {
        AgentState& a = world.agents[i];
        if (t < a.next_plan_time - 1e-9) continue;

        const auto clock_start = std::chrono::steady_clock::now();
        const auto scan =
            scan_excluding(bodies, i, a.pose, command_velocity(a.pose, a.cmd), a.spec.planner);

        LogRow row;
        row.t = t;
        row.agent = a.spec.id;
        row.x = a.pose.position.x;
        row.y = a.pose.position.y;
        row.heading = a.pose.heading;

        if (a.spec.strategy == Strategy::kInvariantSet) {
          const PlanOutput out = step_agent(a, scan, cfg.workers);
          stats.safety_violations += one_period_audit(out, scan, a.spec.planner);
          a.cmd = out.cmd;
          if (out.boxed) {
            a.has_disc = false;
            a.pending_events.push_back("boxed");
            ++stats.agents[i].boxed_events;
          } else if (out.alignment.has_value()) {
            a.has_disc = true;
            a.disc_center = out.waypoint_global;
            a.disc_radius = out.choice.radius;
            a.alignment = *out.alignment;
            a.has_prev_waypoint = true;
            a.prev_waypoint = out.waypoint_global;
          } else {
            a.has_disc = false;  // standing on the waypoint
          }
          if (out.choice.latched && !a.latched) {
            a.latched = true;
            a.pending_events.push_back("latch");
          }
          row.wx = out.waypoint_global.x;
          row.wy = out.waypoint_global.y;
          row.disc_r = out.boxed ? 0.0 : out.choice.radius;
        } else {
          const bool threatened = baseline_threat(a, scan).has_value();
          if (threatened && !a.avoiding) a.pending_events.push_back("avoid");
          a.avoiding = threatened;
          a.cmd = baseline_step(a, scan);
          const Vec2 goal = baseline_goal(a);
          row.wx = goal.x;
          row.wy = goal.y;
          row.disc_r = 0.0;
        }

        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                      clock_start)
                .count();
        if (cfg.timings) {
          row.plan_ms = ms;
          stats.plan_ms.push_back(ms);
        }
        row.v = a.cmd.v;
        row.omega = a.cmd.omega;
        row.event = join_events(a.pending_events);
        a.drift_flagged = false;
        a.invariance_flagged = false;
        ++a.plan_count;
        ++stats.agents[i].plan_events;
        a.next_plan_time = offsets[i] + a.plan_count * a.spec.planner.period();
        result.log.rows.push_back(std::move(row));
      }
    }

    integrate(world, cfg.dt);

    monitor_clearances();
    bool all_converged = true;
    for (size_t i = 0; i < n; ++i) {
      AgentState& a = world.agents[i];
      const double dist = norm(a.pose.position - a.spec.target);
      if (dist <= cfg.delta && a.converged_at < 0.0) a.converged_at = world.time;
      if (dist > cfg.delta) all_converged = false;

      if (a.spec.strategy == Strategy::kInvariantSet && a.has_disc) {
        const double r = norm(a.pose.position - a.disc_center);
        if (r > a.disc_radius * (1.0 + 1e-3) + 1e-9 && !a.invariance_flagged) {
          a.invariance_flagged = true;
          ++stats.invariance_violations;
          a.pending_events.push_back("invariance_viol");
        }
        if (r > 1e-9 && !a.drift_flagged) {
          const double psi =
              wrap_angle(a.pose.heading - bearing_of(a.pose.position - a.disc_center));
          const bool anti_now = std::cos(psi) < 0.0;
          const bool anti_frozen = a.alignment == AxisAlignment::kAntiparallel;
          if (anti_now != anti_frozen) {
            a.drift_flagged = true;
            ++stats.agents[i].branch_drift_events;
            a.pending_events.push_back("branch_drift");
          }
        }
      }
    }
    if (all_converged) {
      stats.all_converged = true;
      stats.completion_time = world.time;
      break;
    }
  }

  // Terminal state row per agent so traces end at the final pose.
  for (size_t i = 0; i < n; ++i) {
    const AgentState& a = world.agents[i];
    LogRow row;
    row.t = world.time;
    row.agent = a.spec.id;
    row.x = a.pose.position.x;
    row.y = a.pose.position.y;
    row.heading = a.pose.heading;
    row.v = a.cmd.v;
    row.omega = a.cmd.omega;
    row.wx = a.pose.position.x;
    row.wy = a.pose.position.y;
    row.disc_r = 0.0;
    row.event = "end";
    result.log.rows.push_back(std::move(row));
  }

  for (size_t i = 0; i < n; ++i) {
    const AgentState& a = world.agents[i];
    stats.agents[i].converged = norm(a.pose.position - a.spec.target) <= cfg.delta;
    stats.agents[i].time_to_target = a.converged_at;
  }
  return result;
}

}  // namespace invnav
