#pragma once

#include <cmath>
#include <cstdint>

#include "rational.hpp"

namespace catb {

// splitmix64. std:: distributions are implementation-defined, which would break
// bit-for-bit reproducible reports across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u = uniform();
    while (u == 0.0) u = uniform();
    double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
  }

  // inclusive bounds
  int range(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Rational positive_rational(int max_num, int max_den) {
    return Rational(range(1, max_num), range(1, max_den));
  }

  // lo + k/grid * (hi - lo) for a uniform k in [0, grid]
  Rational rational_in(const Rational& lo, const Rational& hi, int grid = 64) {
    return lo + (hi - lo) * Rational(range(0, grid), grid);
  }

 private:
  std::uint64_t state_;
};

}  // namespace catb
