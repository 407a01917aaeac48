// Field containers: real/complex sample arrays and spectral coefficient
// arrays on a Grid, plus the elementwise arithmetic used everywhere.
//
// Norm conventions (fixed across the artifact):
//   RealField/ComplexField::l2()  = sqrt( sum |f(x)|^2 * dx^3 )   (box measure)
//   SpectralField::l2()           = sqrt( sum |c(xi)|^2 * L^3 )
// With the unitary-convention transform pair in fft.hpp these two agree
// (Parseval). Vector fields are std::array<Field,3>; their l2 sums the
// three component squares inside one square root.
#pragma once

#include <complex>
#include <vector>

#include "eml/core.hpp"
#include "eml/grid.hpp"

namespace eml {

namespace detail {

template <class T>
struct FieldBase {
  FieldBase() : grid(8, 1.0), a() {}
  explicit FieldBase(const Grid& g, T fill = T()) : grid(g), a(g.size(), fill) {}

  Grid grid;
  std::vector<T> a;

  std::size_t size() const { return a.size(); }
  T& operator[](std::size_t i) { return a[i]; }
  const T& operator[](std::size_t i) const { return a[i]; }
  T& at(int i, int j, int k) { return a[grid.index(i, j, k)]; }
  const T& at(int i, int j, int k) const { return a[grid.index(i, j, k)]; }
};

inline void check_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw GridError(std::string("grid mismatch in ") + what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
struct RealField : detail::FieldBase<double> {
  using detail::FieldBase<double>::FieldBase;

  double l2() const {
    KahanSum s;
    for (double v : a) s.add(v * v);
    return std::sqrt(s.value() * grid.cell_volume());
  }
  double max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }
  double mean() const {
    KahanSum s;
    for (double v : a) s.add(v);
    return s.value() / static_cast<double>(a.size());
  }
  bool all_finite() const {
    for (double v : a)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
struct ComplexField : detail::FieldBase<Complex> {
  using detail::FieldBase<Complex>::FieldBase;

  double l2() const {
    KahanSum s;
    for (const Complex& v : a) s.add(std::norm(v));
    return std::sqrt(s.value() * grid.cell_volume());
  }
  double max_abs() const {
    double m = 0.0;
    for (const Complex& v : a) m = std::max(m, std::abs(v));
    return m;
  }
  bool all_finite() const {
    for (const Complex& v : a)
      if (!finite(v)) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Spectral coefficients c(xi), full complex cube (no Hermitian packing).
// conj_symmetric tracks whether c(-xi) == conj(c(xi)) holds by construction,
// i.e. whether the field is the transform of a real field.
struct SpectralField : detail::FieldBase<Complex> {
  SpectralField() : detail::FieldBase<Complex>(), conj_symmetric(false) {}
  explicit SpectralField(const Grid& g, bool conj_sym = false)
      : detail::FieldBase<Complex>(g), conj_symmetric(conj_sym) {}

  bool conj_symmetric;

  double l2() const {
    KahanSum s;
    for (const Complex& v : a) s.add(std::norm(v));
    return std::sqrt(s.value() * grid.volume());
  }
  bool all_finite() const {
    for (const Complex& v : a)
      if (!finite(v)) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Vector fields.
// ---------------------------------------------------------------------------
using VectorField = std::array<RealField, 3>;
using ComplexVectorField = std::array<ComplexField, 3>;
using SpectralVectorField = std::array<SpectralField, 3>;

inline VectorField make_vector_field(const Grid& g) {
  return {RealField(g), RealField(g), RealField(g)};
}
inline ComplexVectorField make_complex_vector_field(const Grid& g) {
  return {ComplexField(g), ComplexField(g), ComplexField(g)};
}
inline SpectralVectorField make_spectral_vector_field(const Grid& g, bool conj_sym = false) {
  return {SpectralField(g, conj_sym), SpectralField(g, conj_sym), SpectralField(g, conj_sym)};
}

inline double l2(const VectorField& v) {
  KahanSum s;
  for (int c = 0; c < 3; ++c)
    for (double x : v[c].a) s.add(x * x);
  return std::sqrt(s.value() * v[0].grid.cell_volume());
}
inline double l2(const ComplexVectorField& v) {
  KahanSum s;
  for (int c = 0; c < 3; ++c)
    for (const Complex& x : v[c].a) s.add(std::norm(x));
  return std::sqrt(s.value() * v[0].grid.cell_volume());
}
inline double l2(const SpectralVectorField& v) {
  KahanSum s;
  for (int c = 0; c < 3; ++c)
    for (const Complex& x : v[c].a) s.add(std::norm(x));
  return std::sqrt(s.value() * v[0].grid.volume());
}

// ---------------------------------------------------------------------------
// Elementwise helpers (fixed traversal order).
// ---------------------------------------------------------------------------
template <class F>
F& scale_in_place(F& f, double s) {
  for (auto& v : f.a) v *= s;
  return f;
}

template <class F>
F scaled(F f, double s) {
  scale_in_place(f, s);
  return f;
}

// y += s*x
template <class F>
void axpy(double s, const F& x, F& y) {
  detail::check_same_grid(x.grid, y.grid, "axpy");
  for (std::size_t i = 0; i < x.a.size(); ++i) y.a[i] += s * x.a[i];
}

template <class F>
F added(F x, const F& y) {
  detail::check_same_grid(x.grid, y.grid, "added");
  for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
  return x;
}

template <class F>
F subtracted(F x, const F& y) {
  detail::check_same_grid(x.grid, y.grid, "subtracted");
  for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] -= y.a[i];
  return x;
}

inline RealField multiplied(RealField x, const RealField& y) {
  detail::check_same_grid(x.grid, y.grid, "multiplied");
  for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] *= y.a[i];
  return x;
}

inline double max_abs_diff(const RealField& x, const RealField& y) {
  detail::check_same_grid(x.grid, y.grid, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
  return m;
}
inline double max_abs_diff(const ComplexField& x, const ComplexField& y) {
  detail::check_same_grid(x.grid, y.grid, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
  return m;
}
inline double max_abs_diff(const SpectralField& x, const SpectralField& y) {
  detail::check_same_grid(x.grid, y.grid, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
  return m;
}

// ---------------------------------------------------------------------------
// Vector-field counterparts of the elementwise helpers.
// ---------------------------------------------------------------------------
template <class V>
V vec_scaled(V v, double s) {
  for (int c = 0; c < 3; ++c) scale_in_place(v[c], s);
  return v;
}
template <class V>
void vec_axpy(double s, const V& x, V& y) {
  for (int c = 0; c < 3; ++c) axpy(s, x[c], y[c]);
}
template <class V>
V vec_added(V x, const V& y) {
  for (int c = 0; c < 3; ++c) x[c] = added(std::move(x[c]), y[c]);
  return x;
}
template <class V>
V vec_subtracted(V x, const V& y) {
  for (int c = 0; c < 3; ++c) x[c] = subtracted(std::move(x[c]), y[c]);
  return x;
}
template <class V>
double vec_max_abs_diff(const V& x, const V& y) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, max_abs_diff(x[c], y[c]));
  return m;
}
inline double max_abs(const VectorField& v) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, v[c].max_abs());
  return m;
}
inline double max_abs(const ComplexVectorField& v) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, v[c].max_abs());
  return m;
}

// Real/imaginary split of complex fields.
inline RealField real_part(const ComplexField& f) {
  RealField out(f.grid);
  for (std::size_t i = 0; i < f.a.size(); ++i) out.a[i] = f.a[i].real();
  return out;
}
inline RealField imag_part(const ComplexField& f) {
  RealField out(f.grid);
  for (std::size_t i = 0; i < f.a.size(); ++i) out.a[i] = f.a[i].imag();
  return out;
}
inline ComplexField complex_combined(const RealField& re, const RealField& im) {
  detail::check_same_grid(re.grid, im.grid, "complex_combined");
  ComplexField out(re.grid);
  for (std::size_t i = 0; i < re.a.size(); ++i) out.a[i] = Complex(re.a[i], im.a[i]);
  return out;
}

}  // namespace eml
