#pragma once

#include <cstdint>

#include "invnav/geometry.hpp"

namespace invnav {

// Small deterministic generator (splitmix64). Scenario replay depends on
// identical streams for identical seeds, independent of platform or
// standard-library distribution internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // (-pi, pi]
  double angle() { return wrap_angle(uniform(-kPi, kPi)); }

  int index(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

  Vec2 in_annulus(double r_lo, double r_hi) {
    const double a = angle();
    return unit_from_angle(a) * uniform(r_lo, r_hi);
  }

  Rng fork() { return Rng(next_u64()); }

 private:
  uint64_t state_;
};

}  // namespace invnav
