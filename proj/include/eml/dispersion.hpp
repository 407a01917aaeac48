// Dispersion relations of the two linear wave branches.
//
// Branch::e is the acoustic-type branch, lambda_e(r) = sqrt(1 + d r^2) with
// sound-speed parameter d in (0,1); Branch::b is the electromagnetic branch,
// lambda_b(r) = sqrt(1 + r^2). Wave extends the branches to the signed label
// set {e, b, -e, -b, 0} used by the resonance analysis: the signed labels
// carry lambda_{-s} = -lambda_s and the vorticity label 0 is transported, not
// dispersed, so its symbol is identically zero.
#pragma once

#include <array>
#include <cmath>

#include "eml/core.hpp"

namespace eml {

enum class Branch { e, b };

inline const char* branch_name(Branch b) { return b == Branch::e ? "e" : "b"; }

inline void check_sound_parameter(double d) {
  if (!(d > 0.0 && d < 1.0))
    throw RangeError("dispersion: parameter d must lie strictly inside (0,1)");
}

inline double dispersion(Branch b, double r, double d) {
  double c2 = (b == Branch::e) ? d : 1.0;
  return std::sqrt(1.0 + c2 * r * r);
}
inline double dispersion_prime(Branch b, double r, double d) {
  double c2 = (b == Branch::e) ? d : 1.0;
  return c2 * r / std::sqrt(1.0 + c2 * r * r);
}
inline double dispersion_second(Branch b, double r, double d) {
  double c2 = (b == Branch::e) ? d : 1.0;
  double l = std::sqrt(1.0 + c2 * r * r);
  return c2 / (l * l * l);
}

enum class Wave { e, b, minus_e, minus_b, zero };

inline const char* wave_name(Wave w) {
  switch (w) {
    case Wave::e: return "e";
    case Wave::b: return "b";
    case Wave::minus_e: return "-e";
    case Wave::minus_b: return "-b";
    case Wave::zero: return "0";
  }
  return "?";
}

inline Wave conjugate(Wave w) {
  switch (w) {
    case Wave::e: return Wave::minus_e;
    case Wave::b: return Wave::minus_b;
    case Wave::minus_e: return Wave::e;
    case Wave::minus_b: return Wave::b;
    case Wave::zero: return Wave::zero;
  }
  return Wave::zero;
}

// The four dispersive labels (the vorticity label 0 appears only in phases).
inline constexpr std::array<Wave, 4> kDispersiveWaves{Wave::e, Wave::b, Wave::minus_e,
                                                      Wave::minus_b};

// lambda_w(r); even in r, so vector arguments reduce through |xi|.
inline double lambda(Wave w, double d, double r) {
  switch (w) {
    case Wave::e: return dispersion(Branch::e, r, d);
    case Wave::b: return dispersion(Branch::b, r, d);
    case Wave::minus_e: return -dispersion(Branch::e, r, d);
    case Wave::minus_b: return -dispersion(Branch::b, r, d);
    case Wave::zero: return 0.0;
  }
  return 0.0;
}

// d/dr lambda_w(r); odd in r.
inline double lambda_prime(Wave w, double d, double r) {
  switch (w) {
    case Wave::e: return dispersion_prime(Branch::e, r, d);
    case Wave::b: return dispersion_prime(Branch::b, r, d);
    case Wave::minus_e: return -dispersion_prime(Branch::e, r, d);
    case Wave::minus_b: return -dispersion_prime(Branch::b, r, d);
    case Wave::zero: return 0.0;
  }
  return 0.0;
}

}  // namespace eml
