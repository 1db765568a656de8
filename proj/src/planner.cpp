#include "invnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "invnav/parallel.hpp"

namespace invnav {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest d with |p - d*u| > d + clearance: the point-vs-disc closed form.
// Unbounded when the disc grows away from the point faster than toward it.
double max_disc_radius_point(const Vec2& p, double clearance, const Vec2& u) {
  const double rho2 = squared_norm(p);
  if (rho2 <= clearance * clearance) return 0.0;
  const double denom = dot(p, u) + clearance;
  if (denom <= 0.0) return kInf;
  return (rho2 - clearance * clearance) / (2.0 * denom);
}
}  // namespace

const char* to_string(ConstraintMode mode) {
  switch (mode) {
    case ConstraintMode::kNominal: return "nominal";
    case ConstraintMode::kWorstBoth: return "worst_both";
    case ConstraintMode::kKnownSpeed: return "known_speed";
    case ConstraintMode::kKnownDir: return "known_dir";
  }
  return "nominal";
}

bool parse_constraint_mode(const std::string& text, ConstraintMode* out) {
  if (text == "nominal") *out = ConstraintMode::kNominal;
  else if (text == "worst_both") *out = ConstraintMode::kWorstBoth;
  else if (text == "known_speed") *out = ConstraintMode::kKnownSpeed;
  else if (text == "known_dir") *out = ConstraintMode::kKnownDir;
  else return false;
  return true;
}

std::vector<double> beam_bearings(int n_beams) {
  std::vector<double> bearings(static_cast<size_t>(n_beams));
  for (int i = 0; i < n_beams; ++i) {
    bearings[static_cast<size_t>(i)] = wrap_angle(2.0 * kPi * i / n_beams);
  }
  return bearings;
}

bool is_free_space_return(const MeasurementTuple& m, const PlannerConfig& cfg) {
  return squared_norm(m.velocity) == 0.0 && m.range >= cfg.max_range - 1e-9;
}

SweptConstraint swept_constraint(const MeasurementTuple& m, const PlannerConfig& cfg) {
  SweptConstraint c;
  c.point = m.point();
  c.clearance = cfg.inflation;
  if (is_free_space_return(m, cfg)) return c;  // binds only where the disc would exit sensed space

  const double speed = norm(m.velocity);
  switch (cfg.mode) {
    case ConstraintMode::kNominal:
      if (speed > 0.0) {
        c.dir = m.velocity * (1.0 / speed);
        c.travel = speed * cfg.period();
      }
      break;
    case ConstraintMode::kWorstBoth:
      // Any surface return may belong to a body moving at up to v_max.
      c.clearance += cfg.v_max * cfg.period();
      break;
    case ConstraintMode::kKnownSpeed:
      c.clearance += speed * cfg.period();
      break;
    case ConstraintMode::kKnownDir:
      if (speed > 0.0) {
        c.dir = m.velocity * (1.0 / speed);
        c.travel = cfg.v_max * cfg.period();
      }
      break;
  }
  return c;
}

double max_disc_radius(const SweptConstraint& c, const Vec2& u) {
  if (c.travel <= 0.0) return max_disc_radius_point(c.point, c.clearance, u);

  const Vec2 p = c.point;
  const Vec2 p_end = p + c.dir * c.travel;
  const double cl = c.clearance;

  // The candidate discs are nested in d, so feasibility is monotone: the
  // feasible set is [0, d*). First rule out the degenerate point-disc.
  const double t_near = std::clamp(-dot(p, c.dir), 0.0, c.travel);
  if (squared_norm(p + c.dir * t_near) <= cl * cl) return 0.0;

  const double w = dot(u, c.dir);
  const double up = dot(p, c.dir);
  // Unclamped closest-approach parameter of the disc center along the
  // sweep: tau(d) = d*w - up. It decides which piece of the segment
  // distance is active at a given d.
  const double tol = 1e-9 * std::max(1.0, c.travel);
  double best = kInf;

  // Piece 1: closest point is the segment start.
  {
    const double d = max_disc_radius_point(p, cl, u);
    if (std::isfinite(d) && d * w - up <= tol) best = std::min(best, d);
  }
  // Piece 2: closest point is the segment end.
  {
    const double d = max_disc_radius_point(p_end, cl, u);
    if (std::isfinite(d) && d * w - up >= c.travel - tol) best = std::min(best, d);
  }
  // Piece 3: interior tangency. Violation is F(d) >= 0 with
  //   F(d) = w^2 d^2 + 2 b2 d + c2,
  //   b2 = p.u + cl - w*up,  c2 = up^2 + cl^2 - |p|^2.
  {
    const double b2 = dot(p, u) + cl - w * up;
    const double c2 = up * up + cl * cl - squared_norm(p);
    const double a = w * w;
    auto consider = [&](double root) {
      if (!std::isfinite(root) || root < 0.0) return;
      const double tau = root * w - up;
      if (tau >= -tol && tau <= c.travel + tol) best = std::min(best, root);
    };
    if (a > 0.0) {
      const double disc = b2 * b2 - a * c2;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double q = -(b2 + std::copysign(sq, b2));
        if (q != 0.0) {
          consider(q / a);
          consider(c2 / q);
        } else {
          consider(0.0);
        }
      }
    } else if (b2 > 0.0) {
      consider(-c2 / (2.0 * b2));
    }
  }
  return best;
}

double max_safe_radius(double bearing, std::span<const MeasurementTuple> m,
                       const PlannerConfig& cfg) {
  const Vec2 u = unit_from_angle(bearing);
  double bound = kInf;
  for (const auto& tuple : m) {
    bound = std::min(bound, max_disc_radius(swept_constraint(tuple, cfg), u));
    if (bound <= 0.0) return 0.0;
  }
  // The strict inequalities have no attained maximum; realize them as the
  // supremum minus epsilon. The cap is a knowledge limit, not a constraint,
  // so it clamps without the margin.
  const double d = std::min(bound - cfg.epsilon, cfg.disc_cap());
  if (!(d >= cfg.epsilon)) return 0.0;
  return d;
}

PlannerFunction build_planner_function(std::span<const MeasurementTuple> m,
                                       const PlannerConfig& cfg, int workers) {
  PlannerFunction out;
  out.bearings = beam_bearings(cfg.n_beams);
  out.radii.assign(out.bearings.size(), 0.0);
  parallel_for_index(cfg.n_beams, workers, [&](int i) {
    out.radii[static_cast<size_t>(i)] =
        max_safe_radius(out.bearings[static_cast<size_t>(i)], m, cfg);
  });
  return out;
}

bool constraint_satisfied(const MeasurementTuple& m, const InvariantDisc& disc,
                          const PlannerConfig& cfg) {
  const SweptConstraint c = swept_constraint(m, cfg);
  if (c.travel <= 0.0) return d_min(c.point, disc) > c.clearance;
  if (d_min(c.point, disc) <= c.clearance) return false;
  const auto hit = ray_circle_first_hit(c.point, c.dir, disc.center, disc.radius + c.clearance);
  return !hit.has_value() || *hit > c.travel;
}

WaypointChoice select_waypoint(const PlannerFunction& d, const Vec2& target_ego,
                               const PlannerConfig& cfg) {
  WaypointChoice best;
  best.waypoint = {0.0, 0.0};
  double best_dist2 = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(d.bearings.size());
  for (int i = 0; i < n; ++i) {
    const Vec2 u = unit_from_angle(d.bearings[static_cast<size_t>(i)]);
    const double proj = dot(target_ego, u);
    const double di = std::clamp(proj, 0.0, d.radii[static_cast<size_t>(i)]);
    const Vec2 w = u * di;
    const double dist2 = squared_norm(w - target_ego);
    if (dist2 < best_dist2) {
      best_dist2 = dist2;
      best.waypoint = w;
      best.radius = di;
      best.beam_index = i;
    }
  }
  best.latched = n > 0 && std::sqrt(best_dist2) <= cfg.epsilon;
  return best;
}

namespace {
// Detour shaping. The floor fractions start the veer around 1.5 m
// separation at the default 4 m sensing range and let it vanish near the
// target; the tolerances trade a bounded amount of instantaneous progress
// for open space and for keeping the previously chosen side.
constexpr double kDetourCapFraction = 0.35;
constexpr double kDetourTargetFraction = 0.45;
constexpr double kProgressTolFraction = 0.10;  // of disc_cap
constexpr double kKeepTolFraction = 0.15;      // of disc_cap
constexpr double kKeepWindow = 0.35;           // rad around the previous bearing

PlannerFunction mask_below(const PlannerFunction& d, double floor_radius) {
  PlannerFunction masked = d;
  for (double& r : masked.radii) {
    if (r < floor_radius) r = 0.0;
  }
  return masked;
}
}  // namespace

WaypointChoice select_waypoint_with_detour(const PlannerFunction& d, const Vec2& target_ego,
                                           const PlannerConfig& cfg,
                                           std::optional<double> prev_bearing_ego) {
  const WaypointChoice plain = select_waypoint(d, target_ego, cfg);
  if (plain.latched) return plain;

  auto progress = [&target_ego](const WaypointChoice& c) {
    return norm(c.waypoint - target_ego);
  };

  // Ordered candidate list: higher floors first, unrestricted last. Each
  // candidate keeps the floor it was selected under so the hysteresis pass
  // can re-select inside the same admissible set.
  struct Candidate {
    WaypointChoice choice;
    double floor_radius = 0.0;
  };
  std::vector<Candidate> candidates;
  const double base_floor =
      std::min(kDetourCapFraction * cfg.disc_cap(), kDetourTargetFraction * norm(target_ego));
  for (const double level : {1.0, 0.5, 0.25}) {
    const double floor_radius = base_floor * level;
    if (floor_radius <= cfg.epsilon) break;
    bool any_admissible = false;
    bool all_admissible = true;
    for (const double r : d.radii) {
      if (r >= floor_radius) {
        any_admissible = true;
      } else {
        all_admissible = false;
      }
    }
    if (!any_admissible) continue;
    if (all_admissible) break;
    const WaypointChoice restricted =
        select_waypoint(mask_below(d, floor_radius), target_ego, cfg);
    if (restricted.radius > 0.0) candidates.push_back({restricted, floor_radius});
  }
  candidates.push_back({plain, 0.0});

  double best_progress = progress(candidates.front().choice);
  for (const auto& c : candidates) best_progress = std::min(best_progress, progress(c.choice));

  const double tol = kProgressTolFraction * cfg.disc_cap();
  Candidate chosen = candidates.back();
  for (const auto& c : candidates) {
    if (progress(c.choice) <= best_progress + tol) {
      chosen = c;
      break;
    }
  }

  // Hysteresis: stay in the previously chosen bearing corridor when it is
  // nearly as good, so oscillating near-ties cannot flip sides every
  // planning instance.
  if (prev_bearing_ego.has_value()) {
    PlannerFunction windowed =
        chosen.floor_radius > 0.0 ? mask_below(d, chosen.floor_radius) : d;
    for (size_t i = 0; i < windowed.bearings.size(); ++i) {
      if (std::fabs(wrap_angle(windowed.bearings[i] - *prev_bearing_ego)) > kKeepWindow) {
        windowed.radii[i] = 0.0;
      }
    }
    const WaypointChoice keep = select_waypoint(windowed, target_ego, cfg);
    if (keep.radius > 0.0 &&
        progress(keep) <= progress(chosen.choice) + kKeepTolFraction * cfg.disc_cap()) {
      return keep;
    }
  }
  return chosen.choice;
}

}  // namespace invnav
