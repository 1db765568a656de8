#pragma once

#include <cmath>
#include <optional>

namespace invnav {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double squared_norm(const Vec2& v) { return dot(v, v); }
inline double norm(const Vec2& v) { return std::sqrt(squared_norm(v)); }
inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }
inline double bearing_of(const Vec2& v) { return std::atan2(v.y, v.x); }

inline Vec2 rotated(const Vec2& v, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

struct Pose2D {
  Vec2 position;
  double heading = 0.0;  // radians, (-pi, pi]
};

// Normalizes to (-pi, pi], half-open at -pi.
double wrap_angle(double a);

// Disc-shaped invariant region in the ego frame. The agent sits at the
// origin, on the boundary: |center| == radius (up to roundoff).
struct InvariantDisc {
  Vec2 center;
  double radius = 0.0;

  static InvariantDisc along_bearing(double bearing, double radius);
  bool agent_on_boundary(double rel_tol = 1e-9) const;
};

// One sensed range point in the ego frame.
struct MeasurementTuple {
  double range = 0.0;    // meters, <= sensing limit
  double bearing = 0.0;  // radians, (-pi, pi]
  Vec2 velocity;         // ego-relative m/s; zero for free-space max-range returns

  Vec2 point() const { return unit_from_angle(bearing) * range; }
};

// Signed clearance between a point and the disc boundary; negative means
// the point is inside.
double d_min(const Vec2& p, const InvariantDisc& disc);

// Distance along unit_dir from p to the first boundary crossing of the
// disc; empty when the ray misses it entirely.
std::optional<double> d_dir(const Vec2& p, const Vec2& unit_dir, const InvariantDisc& disc);

// Smallest t >= 0 with |origin + t*unit_dir - center| == radius, for an
// arbitrary circle. Empty when the ray never reaches the circle. For an
// origin inside the circle this is the exit distance.
std::optional<double> ray_circle_first_hit(const Vec2& origin, const Vec2& unit_dir,
                                           const Vec2& center, double radius);

}  // namespace invnav
