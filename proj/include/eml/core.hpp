// Shared basics: error taxonomy, 3-vectors, compensated summation, numeric checks.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace eml {

using Complex = std::complex<double>;

// Scalar radial profile, used for multiplier symbols and frequency profiles.
using RadialFn = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Errors. Every precondition failure surfaces as one of these, never as a
// silent wrong answer. Call sites that must not crash (monitors, the CLI)
// catch the base type.
// ---------------------------------------------------------------------------
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct GridError : Error {        // incompatible or invalid grids
  using Error::Error;
};
struct RangeError : Error {       // dyadic/index arguments outside the admissible window
  using Error::Error;
};
struct LocalizationError : Error { // rotation fields refused: too much mass near the boundary
  using Error::Error;
};
struct NumericError : Error {     // non-finite values, failed root brackets, non-convergence
  using Error::Error;
};
struct ConfigError : Error {      // config parse/validation failures
  using Error::Error;
};
struct IoError : Error {          // snapshot/result file problems
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

// ---------------------------------------------------------------------------
// Small vectors.
// ---------------------------------------------------------------------------
using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// Compensated (Kahan) summation. Reductions use a fixed traversal order plus
// compensation so results are bit-stable and accurate at desk grid sizes.
// ---------------------------------------------------------------------------
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(const Complex& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

constexpr double kPi = 3.14159265358979323846264338327950288;

}  // namespace eml
