// Rotation vector fields Omega = x ^ grad on the periodic box.
//
// Omega_1 = x2 d3 - x3 d2, Omega_2 = x3 d1 - x1 d3, Omega_3 = x1 d2 - x2 d1.
// Derivatives are spectral, the coordinate factors are the centered sawtooth
// coordinates, so the operator is only trustworthy on fields that are small
// near the box boundary. rotation_apply therefore measures the relative mass
// in the outer 10% shell (sup-norm shell: max_i |x_i| >= 0.9 * L/2) and
// refuses, with LocalizationError, when it exceeds the tolerance.
#pragma once

#include "eml/multiplier.hpp"

namespace eml {

inline constexpr double kDefaultRotationMassTol = 1e-6;

namespace detail {

template <class FieldT>
double boundary_mass_fraction_impl(const FieldT& f) {
  int n = f.grid.n();
  double edge = 0.9 * 0.5 * f.grid.length();
  KahanSum total, outer;
  std::size_t p = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k, ++p) {
        Vec3 x = f.grid.coord(i, j, k);
        double m = std::norm(Complex(f.a[p]));
        total.add(m);
        if (std::abs(x[0]) >= edge || std::abs(x[1]) >= edge || std::abs(x[2]) >= edge)
          outer.add(m);
      }
    }
  }
  double t = total.value();
  return t > 0.0 ? outer.value() / t : 0.0;
}

}  // namespace detail

inline double boundary_mass_fraction(const RealField& f) {
  return detail::boundary_mass_fraction_impl(f);
}
inline double boundary_mass_fraction(const ComplexField& f) {
  return detail::boundary_mass_fraction_impl(f);
}

namespace detail {

inline void rotation_axes(int axis, int& a, int& b) {
  switch (axis) {
    case 0: a = 1; b = 2; break;
    case 1: a = 2; b = 0; break;
    case 2: a = 0; b = 1; break;
    default: throw RangeError("rotation_apply: axis must be 0..2");
  }
}

template <class FieldT, class InverseFn>
FieldT rotation_apply_impl(const FieldT& f, int axis, double tol, InverseFn inverse) {
  int a, b;
  rotation_axes(axis, a, b);
  double frac = boundary_mass_fraction_impl(f);
  if (frac > tol)
    throw LocalizationError("rotation_apply: boundary mass fraction " + std::to_string(frac) +
                            " exceeds tolerance " + std::to_string(tol));
  SpectralField c = transform(f);
  FieldT da = inverse(apply_symbol(c, mult_derivative(a)));
  FieldT db = inverse(apply_symbol(c, mult_derivative(b)));
  FieldT out(f.grid);
  int n = f.grid.n();
  std::size_t p = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k, ++p) {
        Vec3 x = f.grid.coord(i, j, k);
        out.a[p] = x[a] * db.a[p] - x[b] * da.a[p];
      }
    }
  }
  return out;
}

}  // namespace detail

// Omega_(axis+1) f. Throws LocalizationError when f has too much boundary mass.
inline RealField rotation_apply(const RealField& f, int axis,
                                double tol = kDefaultRotationMassTol) {
  return detail::rotation_apply_impl(f, axis, tol,
                                     [](const SpectralField& c) { return inverse_transform_real(c); });
}

inline ComplexField rotation_apply(const ComplexField& f, int axis,
                                   double tol = kDefaultRotationMassTol) {
  return detail::rotation_apply_impl(f, axis, tol,
                                     [](const SpectralField& c) { return inverse_transform(c); });
}

}  // namespace eml
