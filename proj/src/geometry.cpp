#include "invnav/geometry.hpp"

#include <cmath>
#include <limits>

namespace invnav {

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r = kPi;
  return r;
}

InvariantDisc InvariantDisc::along_bearing(double bearing, double radius) {
  return {unit_from_angle(bearing) * radius, radius};
}

bool InvariantDisc::agent_on_boundary(double rel_tol) const {
  const double scale = std::max(1.0, radius);
  return radius >= 0.0 && std::fabs(norm(center) - radius) <= rel_tol * scale;
}

double d_min(const Vec2& p, const InvariantDisc& disc) {
  return norm(p - disc.center) - disc.radius;
}

std::optional<double> ray_circle_first_hit(const Vec2& origin, const Vec2& unit_dir,
                                           const Vec2& center, double radius) {
  const Vec2 m = origin - center;
  const double b = dot(m, unit_dir);
  const double c = squared_norm(m) - radius * radius;

  // Discriminant via the perpendicular-offset form: r^2 - |m - (m.u)u|^2.
  // Avoids the cancellation in b^2 - c for grazing rays.
  const Vec2 perp = m - unit_dir * b;
  const double disc = radius * radius - squared_norm(perp);
  if (disc < 0.0) return std::nullopt;

  const double sq = std::sqrt(disc);
  // Roots of t^2 + 2bt + c = 0 in the cancellation-free pairing.
  const double q = -(b + std::copysign(sq, b));
  double t0 = std::numeric_limits<double>::infinity();
  if (q != 0.0) {
    const double r1 = q;
    const double r2 = c / q;
    if (r1 >= 0.0) t0 = r1;
    if (r2 >= 0.0 && r2 < t0) t0 = r2;
  } else {
    // b == 0 and grazing: double root at t = 0.
    t0 = 0.0;
  }
  if (!std::isfinite(t0)) return std::nullopt;
  return t0;
}

std::optional<double> d_dir(const Vec2& p, const Vec2& unit_dir, const InvariantDisc& disc) {
  return ray_circle_first_hit(p, unit_dir, disc.center, disc.radius);
}

}  // namespace invnav
