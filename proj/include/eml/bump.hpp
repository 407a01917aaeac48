// The dyadic bump family.
//
// Base profile: phi is even, identically 1 on [-5/4, 5/4], identically 0
// outside (-8/5, 8/5), and in between it descends along a quintic smoothstep
// in log2|x|, which makes it C^2 with vanishing first and second derivatives
// at both junctions. Derived family:
//   phi_k(x)      = phi(x/2^k) - phi(x/2^(k-1))            (annulus at 2^k)
//   phi_le(x,b)   = sum_{m<=b} phi_m = phi(x/2^b)           (telescoped; 1 at x=0)
//   phi_ge(x,b)   = sum_{m>=b} phi_m = 1 - phi(x/2^(b-1))   (0 at x=0)
//   phi_interval  = the [a,b]-folded member: phi_le at the left end, phi_ge
//                   at the right end, phi_j inside
//   phi_jk        = the physical-space member adapted to spectral scale 2^k:
//                   at j = max(-k,0) it is phi_le(x, j), above that phi_j(x)
// Sums of these families telescope to exactly 1, which the partition tests
// rely on.
#pragma once

#include <cmath>
#include <mutex>

#include "eml/core.hpp"

namespace eml {

// C-infinity descent from 1 to 0 across [a, b], built from exp(-1/t): every
// derivative vanishes at both junctions. Spectral cutoffs shaped with it have
// spatial tails that decay faster than any polynomial, which the localization
// gates require; the dyadic family below stays C^2 because its values are
// pinned by the norm tables.
inline double smooth_cutoff(double r, double a, double b) {
  if (!(a < b)) throw RangeError("smooth_cutoff: need a < b");
  double u = (r - a) / (b - a);
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  double num = std::exp(-1.0 / (1.0 - u));
  double den = num + std::exp(-1.0 / u);
  return num / den;
}

class DyadicCutoff {
 public:
  static constexpr double kInner = 1.25;  // 5/4
  static constexpr double kOuter = 1.6;   // 8/5

  DyadicCutoff() {
    static const bool ok = self_check();
    (void)ok;
  }

  double phi(double x) const { return phi_impl(x); }

  double phi_k(double x, int k) const {
    return phi(std::ldexp(x, -k)) - phi(std::ldexp(x, -(k - 1)));
  }

  double phi_le(double x, int b) const { return phi(std::ldexp(x, -b)); }

  double phi_ge(double x, int b) const { return 1.0 - phi(std::ldexp(x, -(b - 1))); }

  // The [a,b]-truncated family member at index j (requires a <= j <= b, a < b).
  double phi_interval(double x, int j, int a, int b) const {
    if (a >= b || j < a || j > b) throw RangeError("phi_interval: need a <= j <= b with a < b");
    if (j == a) return phi_le(x, a);
    if (j == b) return phi_ge(x, b);
    return phi_k(x, j);
  }

  // Physical localizer adapted to spectral scale 2^k; defined for
  // j >= max(-k, 0), with the lowest j folded.
  double phi_jk(double x, int j, int k) const {
    int j0 = std::max(-k, 0);
    if (j < j0) throw RangeError("phi_jk: j below max(-k, 0)");
    if (j == j0) return phi_le(x, j0);
    return phi_k(x, j);
  }

 private:
  static double phi_impl(double x) {
    double ax = std::abs(x);
    if (ax <= kInner) return 1.0;
    if (ax >= kOuter) return 0.0;
    static const double log_inner = std::log2(kInner);
    static const double log_span = std::log2(kOuter) - std::log2(kInner);
    double u = (std::log2(ax) - log_inner) / log_span;
    double s = u * u * u * (u * (6.0 * u - 15.0) + 10.0);
    return 1.0 - s;
  }

  static bool self_check() {
    require(phi_impl(0.0) == 1.0 && phi_impl(kInner) == 1.0 && phi_impl(kOuter) == 0.0 &&
                phi_impl(-kInner) == 1.0 && phi_impl(2.0) == 0.0,
            "dyadic cutoff: support bounds violated");
    // Even, monotone nonincreasing in |x|, and C^2-small increments across
    // the junctions.
    double prev = 1.0;
    for (int i = 1; i <= 400; ++i) {
      double x = 2.0 * i / 400.0;
      double v = phi_impl(x);
      require(phi_impl(-x) == v, "dyadic cutoff: not even");
      require(v <= prev + 1e-15, "dyadic cutoff: not monotone");
      prev = v;
    }
    // The third derivative is O(10^3), so a centered second difference at
    // distance h from a junction is O(10^3 * h); h = 1e-6 separates a genuine
    // curvature jump (O(1)) from the C^2 profile.
    auto d2 = [](double x, double h) {
      return (phi_impl(x + h) - 2.0 * phi_impl(x) + phi_impl(x - h)) / (h * h);
    };
    double h = 1e-6;
    require(std::abs(d2(kInner, h)) < 1e-2 && std::abs(d2(kOuter, h)) < 1e-2,
            "dyadic cutoff: curvature does not vanish at the junctions");
    return true;
  }
};

}  // namespace eml
