// Seeded random numbers with a pinned cross-platform bit stream.
//
// std::mt19937_64 is specified exactly by the standard, but the standard
// distributions are not, so uniform and gaussian draws are derived here by a
// fixed recipe. Every random artifact in the library must be reproducible
// byte for byte from its seed.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "eml/core.hpp"

namespace eml {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in (0, 1]: 53 random bits, never zero (safe under log).
  double unit() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  // Uniform in [0, 1).
  double unit_half_open() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (both outputs used, one cached).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = unit();
    double w = unit_half_open();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 2.0 * kPi * w;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [lo, hi] by rejection (no modulo bias).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    require(lo <= hi, "Rng::uniform_int: empty range");
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % span);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace eml
