#include "invnav/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "invnav/scenario.hpp"
#include "invnav/simulator.hpp"

namespace invnav {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_err(double err) {
  std::ostringstream os;
  os << "max_err=" << err;
  return os.str();
}
}  // namespace

bool VerifyReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

double oracle_max_safe_radius(double bearing, std::span<const MeasurementTuple> m,
                              const PlannerConfig& cfg, int iterations) {
  auto feasible = [&](double d) {
    const InvariantDisc disc = InvariantDisc::along_bearing(bearing, d);
    for (const auto& tuple : m) {
      if (!constraint_satisfied(tuple, disc, cfg)) return false;
    }
    return true;
  };

  double sup = 0.0;
  if (feasible(0.0)) {
    double hi = 2.0 * cfg.max_range;
    if (feasible(hi)) {
      sup = hi;
    } else {
      double lo = 0.0;
      for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      sup = lo;
    }
  }
  const double d = std::min(sup - cfg.epsilon, cfg.disc_cap());
  if (!(d >= cfg.epsilon)) return 0.0;
  return d;
}

ClosedLoopRun closed_loop_run(Rng& rng, double dt, double plan_hz, double pad) {
  ClosedLoopRun out;
  // k2 sized so the sampled square-root law settles inside the 1e-3 band:
  // the plan-rate limit cycle has amplitude (k2 / (2 * plan_hz))^2.
  const ControlGains gains{rng.uniform(0.05, 0.5), rng.uniform(0.3, 0.55)};
  const double r0 = rng.uniform(0.5, 5.0);
  Pose2D pose{unit_from_angle(rng.angle()) * r0, rng.angle()};
  const Vec2 waypoint{0.0, 0.0};

  const auto state0 = make_controller_state(pose, waypoint);
  const AxisAlignment frozen = state0->alignment;
  out.r0 = r0;
  out.sigma0 = orientation_error(*state0);
  out.t_star = 2.0 * std::sqrt(std::fabs(out.sigma0)) / gains.k2;
  out.max_r = r0;

  const double horizon = out.t_star + pad + 2.0;
  const long ticks = std::lround(horizon / dt);
  const long plan_every = std::lround(1.0 / (plan_hz * dt));

  ControlCommand cmd;
  double prev_r = r0;
  for (long k = 0; k < ticks; ++k) {
    if (k % plan_every == 0) {
      ControllerState s;
      s.range = norm(pose.position - waypoint);
      s.rel_bearing = wrap_angle(pose.heading - bearing_of(pose.position - waypoint));
      s.alignment = frozen;
      cmd = control(s, gains);
    }
    pose = rk4_step(pose, cmd, dt);

    const double r = norm(pose.position - waypoint);
    const double psi = wrap_angle(pose.heading - bearing_of(pose.position - waypoint));
    out.max_r = std::max(out.max_r, r);
    if (r > prev_r + 1e-6) out.r_monotone = false;
    prev_r = r;

    const double t_next = static_cast<double>(k + 1) * dt;
    if (t_next >= out.t_star + pad) {
      const ControllerState s{r, psi, frozen};
      out.max_sigma_late = std::max(out.max_sigma_late, std::fabs(orientation_error(s)));
      const double eq = std::min(std::fabs(psi), std::fabs(wrap_angle(psi - kPi)));
      out.max_equilibrium_err = std::max(out.max_equilibrium_err, eq);
    }
  }
  return out;
}

std::vector<MeasurementTuple> random_measurement_set(Rng& rng, const PlannerConfig& cfg,
                                                     int n_points) {
  std::vector<MeasurementTuple> m;
  m.reserve(static_cast<size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    MeasurementTuple t;
    t.bearing = rng.angle();
    const double kind = rng.u01();
    if (kind < 0.25) {
      t.range = cfg.max_range;  // free-space return
    } else if (kind < 0.55) {
      t.range = rng.uniform(0.05, cfg.max_range);  // static surface point
    } else {
      t.range = rng.uniform(0.05, cfg.max_range);
      t.velocity = unit_from_angle(rng.angle()) * rng.uniform(0.01, cfg.v_max);
    }
    m.push_back(t);
  }
  return m;
}

VerifyReport run_verification(const VerifyOptions& opt) {
  const int n_geom = opt.quick ? 300 : 2000;
  const long n_bound = opt.quick ? 10000 : 1000000;
  const int n_runs = opt.quick ? 10 : 100;
  const int n_oracle_sets = opt.quick ? 100 : 1000;
  const int n_safety_sets = opt.quick ? 40 : 200;

  VerifyReport report;
  auto record = [&report](const std::string& name, bool pass, const std::string& detail) {
    for (auto& c : report.checks) {
      if (c.name == name) {
        if (!pass && c.pass) {
          c.pass = false;
          c.detail = detail;
        }
        return;
      }
    }
    report.checks.push_back({name, pass, detail});
  };

  for (int seed_idx = 0; seed_idx < std::max(1, opt.seeds); ++seed_idx) {
    Rng rng(opt.base_seed + 1000003ull * static_cast<std::uint64_t>(seed_idx));

    // Radial-shift consistency of the point-to-disc distance.
    {
      double max_err = 0.0;
      for (int i = 0; i < n_geom; ++i) {
        const InvariantDisc disc =
            InvariantDisc::along_bearing(rng.angle(), rng.uniform(0.1, 3.0));
        const Vec2 radial = unit_from_angle(rng.angle());
        const Vec2 p = disc.center + radial * (disc.radius + rng.uniform(0.01, 5.0));
        const double delta = rng.uniform(0.0, 2.0);
        const Vec2 dir = (p - disc.center) * (1.0 / norm(p - disc.center));
        const double err = std::fabs(d_min(p + dir * delta, disc) - (d_min(p, disc) + delta));
        max_err = std::max(max_err, err);
      }
      record("geometry.d_min_radial_shift", max_err <= 1e-12, fmt_err(max_err));
    }

    // Directional distance dominates the shortest distance; equality along
    // the center ray; roots agree with bisection on the implicit circle.
    {
      double max_err = 0.0;
      bool ok = true;
      for (int i = 0; i < n_geom; ++i) {
        const InvariantDisc disc =
            InvariantDisc::along_bearing(rng.angle(), rng.uniform(0.1, 3.0));
        const Vec2 p =
            disc.center + unit_from_angle(rng.angle()) * (disc.radius + rng.uniform(0.01, 5.0));
        const double dm = d_min(p, disc);

        const auto t = d_dir(p, unit_from_angle(rng.angle()), disc);
        if (t.has_value() && *t < dm - 1e-9) ok = false;

        const Vec2 to_center = (disc.center - p) * (1.0 / norm(disc.center - p));
        const auto tc = d_dir(p, to_center, disc);
        if (!tc.has_value()) {
          ok = false;
        } else {
          max_err = std::max(max_err, std::fabs(*tc - dm));
        }

        if (t.has_value() && *t > 0.0) {
          // bisection on f(s) = |p + s*dir - c| - r over [0, just past the root]
          const Vec2 dir = unit_from_angle(rng.angle());
          const auto th = d_dir(p, dir, disc);
          if (th.has_value()) {
            double lo = 0.0, hi = *th + 1e-7;
            auto f = [&](double s) { return norm(p + dir * s - disc.center) - disc.radius; };
            if (f(lo) > 0.0 && f(hi) <= 0.0) {
              for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (f(mid) > 0.0) lo = mid; else hi = mid;
              }
              max_err = std::max(max_err, std::fabs(0.5 * (lo + hi) - *th));
            }
          }
        }
      }
      record("geometry.d_dir_vs_d_min", ok && max_err <= 1e-9, fmt_err(max_err));
    }

    // Angle wrapping: range, idempotence, periodicity.
    {
      bool ok = true;
      for (int i = 0; i < n_geom; ++i) {
        const double a = rng.uniform(-50.0, 50.0);
        const double w = wrap_angle(a);
        if (!(w > -kPi && w <= kPi)) ok = false;
        if (wrap_angle(w) != w) ok = false;
        const int k = rng.index(7) - 3;
        if (std::fabs(wrap_angle(a + 2.0 * kPi * k) - w) > 1e-9) ok = false;
      }
      if (wrap_angle(-kPi) != kPi) ok = false;
      record("geometry.wrap_angle", ok, "");
    }

    // Input bounds for arbitrary states, drifted branches included.
    {
      long violations = 0;
      for (long i = 0; i < n_bound; ++i) {
        const ControlGains g{rng.uniform(0.01, 2.0), rng.uniform(0.01, 2.0)};
        ControllerState s;
        s.range = rng.uniform(0.0, 50.0);
        s.rel_bearing = rng.angle();
        s.alignment = rng.u01() < 0.5 ? AxisAlignment::kParallel : AxisAlignment::kAntiparallel;
        const ControlCommand cmd = control(s, g);
        if (std::fabs(cmd.v) > g.k1 || std::fabs(cmd.omega) > omega_bound(g)) ++violations;
      }
      record("controller.input_bounds", violations == 0,
             "violations=" + std::to_string(violations));
    }

    // Closed-loop invariance, monotone descent, finite-time orientation
    // convergence, terminal equilibrium set.
    {
      double worst_ratio = 0.0;
      double worst_sigma = 0.0;
      double worst_eq = 0.0;
      bool monotone = true;
      for (int i = 0; i < n_runs; ++i) {
        const ClosedLoopRun run = closed_loop_run(rng);
        worst_ratio = std::max(worst_ratio, run.max_r / run.r0);
        worst_sigma = std::max(worst_sigma, run.max_sigma_late);
        worst_eq = std::max(worst_eq, run.max_equilibrium_err);
        monotone = monotone && run.r_monotone;
      }
      record("controller.invariance", worst_ratio <= 1.0 + 1e-3, fmt_err(worst_ratio - 1.0));
      record("controller.monotone_descent", monotone, "");
      record("controller.sigma_finite_time", worst_sigma <= 1e-3, fmt_err(worst_sigma));
      record("controller.equilibrium_set", worst_eq <= 1e-3, fmt_err(worst_eq));
    }

    // Closed-form planner vs the bisection oracle, all four modes.
    {
      double max_err = 0.0;
      for (int i = 0; i < n_oracle_sets; ++i) {
        PlannerConfig cfg;
        cfg.max_range = 4.0;
        cfg.plan_hz = 10.0;
        cfg.epsilon = 1e-3;
        cfg.inflation = rng.u01() < 0.3 ? 0.0 : rng.uniform(0.0, 0.2);
        cfg.v_max = rng.uniform(0.1, 1.0);
        const auto m = random_measurement_set(rng, cfg, 8 + rng.index(17));
        for (ConstraintMode mode : {ConstraintMode::kNominal, ConstraintMode::kWorstBoth,
                                    ConstraintMode::kKnownSpeed, ConstraintMode::kKnownDir}) {
          cfg.mode = mode;
          for (int b = 0; b < 3; ++b) {
            const double bearing = rng.angle();
            const double closed = max_safe_radius(bearing, m, cfg);
            const double oracle = oracle_max_safe_radius(bearing, m, cfg);
            max_err = std::max(max_err, std::fabs(closed - oracle));
          }
        }
      }
      record("planner.oracle_equivalence", max_err <= 1e-6, fmt_err(max_err));
    }

    // One-period propagation never enters the chosen disc's inflated margin,
    // and the chosen disc satisfies every raw constraint.
    {
      long violations = 0;
      for (int i = 0; i < n_safety_sets; ++i) {
        PlannerConfig cfg;
        cfg.n_beams = 64;
        cfg.inflation = rng.uniform(0.0, 0.15);
        cfg.v_max = 0.5;
        const auto m = random_measurement_set(rng, cfg, 64);
        const auto d = build_planner_function(m, cfg);
        const auto choice = select_waypoint(d, rng.in_annulus(1.0, 6.0), cfg);
        if (choice.radius <= 0.0) continue;
        const InvariantDisc disc{choice.waypoint, choice.radius};
        for (const auto& tuple : m) {
          const Vec2 end = tuple.point() + tuple.velocity * cfg.period();
          if (d_min(end, disc) < cfg.inflation - 1e-9) ++violations;
          if (!constraint_satisfied(tuple, disc, cfg)) ++violations;
        }
      }
      record("planner.one_period_safety", violations == 0,
             "violations=" + std::to_string(violations));
    }

    // Conservativity ordering of the uncertainty modes.
    {
      bool ok = true;
      for (int i = 0; i < n_safety_sets; ++i) {
        PlannerConfig cfg;
        cfg.n_beams = 32;
        cfg.inflation = rng.uniform(0.0, 0.15);
        cfg.v_max = rng.uniform(0.2, 0.8);
        const auto m = random_measurement_set(rng, cfg, 24);
        cfg.mode = ConstraintMode::kNominal;
        const auto nominal = build_planner_function(m, cfg);
        cfg.mode = ConstraintMode::kKnownSpeed;
        const auto known_speed = build_planner_function(m, cfg);
        cfg.mode = ConstraintMode::kWorstBoth;
        const auto worst = build_planner_function(m, cfg);
        for (size_t b = 0; b < nominal.radii.size(); ++b) {
          if (worst.radii[b] > known_speed.radii[b] + 1e-12) ok = false;
          if (known_speed.radii[b] > nominal.radii[b] + 1e-12) ok = false;
        }
      }
      record("planner.conservativity_ordering", ok, "");
    }

    // Greedy progress in an empty world: |W - T| non-increasing until latch.
    {
      ScenarioConfig cfg;
      cfg.seed = rng.next_u64();
      cfg.timeout = 90.0;
      AgentSpec a;
      a.id = 0;
      a.radius = 0.08;
      a.start = {{-2.0, -1.0}, 2.0};
      a.target = {4.0, 1.5};
      a.gains = {0.2, 1.0};
      a.planner.inflation = 0.1;
      cfg.agents.push_back(a);
      const RunResult res = run_scenario(cfg);
      bool ok = res.stats.all_converged;
      double prev = kInf;
      for (const auto& row : res.log.rows) {
        if (row.event == "end") continue;
        if (row.event.find("latch") != std::string::npos) break;
        const double dist = norm(Vec2{row.wx, row.wy} - a.target);
        if (dist > prev + 1e-6) ok = false;
        prev = dist;
      }
      record("planner.waypoint_progress", ok, "");
    }

    // Bitwise identical planner functions for any worker partition.
    {
      bool ok = true;
      for (int i = 0; i < 10; ++i) {
        PlannerConfig cfg;
        cfg.n_beams = 96;
        cfg.inflation = 0.1;
        const auto m = random_measurement_set(rng, cfg, 48);
        const auto serial = build_planner_function(m, cfg, 1);
        for (int workers : {2, 3, 5}) {
          const auto parallel = build_planner_function(m, cfg, workers);
          if (parallel.radii != serial.radii) ok = false;
        }
      }
      record("planner.partition_determinism", ok, "");
    }

    // Global-frame RK4 agrees with direct RK4 of the polar feedback form.
    {
      double max_err = 0.0;
      for (int i = 0; i < 20; ++i) {
        const Vec2 waypoint{0.0, 0.0};
        Pose2D pose{unit_from_angle(rng.angle()) * rng.uniform(2.0, 4.0), rng.angle()};
        const ControlCommand cmd{rng.uniform(-0.3, 0.3), rng.uniform(-1.0, 1.0)};
        const double dt = 1e-3;

        double r = norm(pose.position - waypoint);
        double psi = wrap_angle(pose.heading - bearing_of(pose.position - waypoint));
        for (int k = 0; k < 1000; ++k) {
          pose = rk4_step(pose, cmd, dt);

          auto deriv = [&cmd](double rr, double pp) {
            return std::pair<double, double>{cmd.v * std::cos(pp),
                                             cmd.omega - (cmd.v / rr) * std::sin(pp)};
          };
          const auto k1 = deriv(r, psi);
          const auto k2 = deriv(r + 0.5 * dt * k1.first, psi + 0.5 * dt * k1.second);
          const auto k3 = deriv(r + 0.5 * dt * k2.first, psi + 0.5 * dt * k2.second);
          const auto k4 = deriv(r + dt * k3.first, psi + dt * k3.second);
          r += dt / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
          psi = wrap_angle(psi + dt / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second +
                                             k4.second));
        }
        const double r_global = norm(pose.position - waypoint);
        const double psi_global =
            wrap_angle(pose.heading - bearing_of(pose.position - waypoint));
        max_err = std::max(max_err, std::fabs(r_global - r));
        max_err = std::max(max_err, std::fabs(wrap_angle(psi_global - psi)));
      }
      record("simulator.dual_integration", max_err <= 1e-6, fmt_err(max_err));
    }

    // Two-agent head-on exchange: converges, stays clear, audits clean.
    {
      ScenarioConfig cfg;
      cfg.seed = 7 + static_cast<std::uint64_t>(seed_idx);
      AgentSpec a;
      a.radius = 0.08;
      a.gains = {0.2, 1.0};
      a.planner.inflation = 0.12;
      a.id = 0;
      a.start = {{-2.0, 0.0}, 0.0};
      a.target = {2.0, 0.0};
      cfg.agents.push_back(a);
      a.id = 1;
      a.start = {{2.0, 0.0}, kPi};
      a.target = {-2.0, 0.0};
      cfg.agents.push_back(a);
      const RunResult res = run_scenario(cfg);
      const bool ok = res.stats.all_converged && res.stats.min_agent_clearance > 0.0 &&
                      res.stats.safety_violations == 0 && res.stats.invariance_violations == 0;
      std::ostringstream detail;
      detail << "converged=" << res.stats.all_converged
             << " clearance=" << res.stats.min_agent_clearance
             << " safety_viol=" << res.stats.safety_violations
             << " invariance_viol=" << res.stats.invariance_violations;
      record("simulator.exchange_smoke", ok, detail.str());
    }
  }
  return report;
}

}  // namespace invnav
