// Fourier multipliers.
//
// A Multiplier is a symbol s(xi) applied coefficientwise in spectral space.
// Radial symbols carry a scalar function of |xi| and are evaluated once per
// frequency shell (the grid precomputes the shell structure); general symbols
// are evaluated per lattice point. Symbols singular at xi = 0 (Riesz
// transforms, |nabla|^-1, |nabla|) assign factor 0 to the zero mode: combined
// with mean-free fields this is exact, and it can never inject a spurious
// mean.
#pragma once

#include <functional>
#include <string>

#include "eml/dispersion.hpp"
#include "eml/fft.hpp"

namespace eml {

struct Multiplier {
  // Exactly one of radial/vector is set.
  std::function<Complex(double)> radial;        // s(|xi|)
  std::function<Complex(const Vec3&)> general;  // s(xi)
  // True when s(-xi) == conj(s(xi)), so real fields stay real.
  bool conj_symmetric = true;
  // Axes in which the symbol is an odd function (bit a set for axis a). The
  // lattice Nyquist plane m = -n/2 is its own reflection partner, so realness
  // of the output forces an odd symbol to vanish there; apply_symbol zeroes
  // those planes. This is also the correct calculus: the sampled derivative
  // of the Nyquist cosine is identically zero.
  int odd_axis_mask = 0;
  std::string name;
};

inline SpectralField apply_symbol(const SpectralField& f, const Multiplier& m) {
  SpectralField out(f.grid, f.conj_symmetric && m.conj_symmetric);
  if (m.radial) {
    const auto& radii = f.grid.shell_radii();
    std::vector<Complex> w(radii.size());
    for (std::size_t s = 0; s < radii.size(); ++s) {
      w[s] = m.radial(radii[s]);
      if (!finite(w[s]))
        throw NumericError("apply_symbol: symbol '" + m.name + "' non-finite at |xi|=" +
                           std::to_string(radii[s]));
    }
    const auto& ids = f.grid.shell_ids();
    for (std::size_t p = 0; p < f.a.size(); ++p) out.a[p] = f.a[p] * w[ids[p]];
    return out;
  }
  if (!m.general) throw NumericError("apply_symbol: empty multiplier");
  int n = f.grid.n();
  double nyq = f.grid.nyquist();
  auto at_nyquist = [&](int idx) { return std::abs(f.grid.freq_1d(idx)) >= nyq * (1.0 - 1e-12); };
  std::size_t p = 0;
  for (int i = 0; i < n; ++i) {
    bool ni = (m.odd_axis_mask & 1) && at_nyquist(i);
    for (int j = 0; j < n; ++j) {
      bool nj = ni || ((m.odd_axis_mask & 2) && at_nyquist(j));
      for (int k = 0; k < n; ++k, ++p) {
        if (nj || ((m.odd_axis_mask & 4) && at_nyquist(k))) {
          out.a[p] = Complex(0.0, 0.0);
          continue;
        }
        Complex w = m.general(f.grid.freq(i, j, k));
        if (!finite(w))
          throw NumericError("apply_symbol: symbol '" + m.name + "' non-finite on the lattice");
        out.a[p] = f.a[p] * w;
      }
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Named symbols.
// --------------------------------------------------------------------------

// i*xi_axis (one spatial derivative).
inline Multiplier mult_derivative(int axis) {
  if (axis < 0 || axis > 2) throw RangeError("mult_derivative: axis must be 0..2");
  Multiplier m;
  m.general = [axis](const Vec3& xi) { return Complex(0.0, xi[axis]); };
  m.conj_symmetric = true;
  m.odd_axis_mask = 1 << axis;
  m.name = "d/dx_" + std::to_string(axis);
  return m;
}

// |nabla| = |xi|.
inline Multiplier mult_modulus() {
  Multiplier m;
  m.radial = [](double r) { return Complex(r, 0.0); };
  m.name = "|grad|";
  return m;
}

// |nabla|^-1, zero mode -> 0.
inline Multiplier mult_inv_modulus() {
  Multiplier m;
  m.radial = [](double r) { return r == 0.0 ? Complex(0.0, 0.0) : Complex(1.0 / r, 0.0); };
  m.name = "|grad|^-1";
  return m;
}

// Riesz transform R_axis = |nabla|^-1 d/dx_axis, zero mode -> 0.
inline Multiplier mult_riesz(int axis) {
  if (axis < 0 || axis > 2) throw RangeError("mult_riesz: axis must be 0..2");
  Multiplier m;
  m.general = [axis](const Vec3& xi) {
    double r = norm(xi);
    return r == 0.0 ? Complex(0.0, 0.0) : Complex(0.0, xi[axis] / r);
  };
  m.conj_symmetric = true;
  m.odd_axis_mask = 1 << axis;
  m.name = "riesz_" + std::to_string(axis);
  return m;
}

// lambda_branch(|xi|) (always the positive branch as an operator).
inline Multiplier mult_dispersion(Branch b, double d) {
  check_sound_parameter(d);
  Multiplier m;
  m.radial = [b, d](double r) { return Complex(dispersion(b, r, d), 0.0); };
  m.name = std::string("Lambda_") + branch_name(b);
  return m;
}

inline Multiplier mult_inv_dispersion(Branch b, double d) {
  check_sound_parameter(d);
  Multiplier m;
  m.radial = [b, d](double r) { return Complex(1.0 / dispersion(b, r, d), 0.0); };
  m.name = std::string("Lambda_") + branch_name(b) + "^-1";
  return m;
}

// |nabla| * lambda_b^-2 and friends are composed by callers via apply_symbol
// chaining or by custom radial lambdas:
inline Multiplier mult_radial(std::function<double(double)> f, std::string name) {
  Multiplier m;
  m.radial = [f = std::move(f)](double r) { return Complex(f(r), 0.0); };
  m.name = std::move(name);
  return m;
}

// exp(-i t sign lambda_branch(|xi|)); not conjugate-symmetric for t != 0.
inline Multiplier mult_half_wave(Wave w, double d, double t) {
  check_sound_parameter(d);
  Multiplier m;
  m.radial = [w, d, t](double r) {
    double phase = -t * lambda(w, d, r);
    return Complex(std::cos(phase), std::sin(phase));
  };
  m.conj_symmetric = (t == 0.0);
  m.name = std::string("exp(-i t Lambda_") + wave_name(w) + ")";
  return m;
}

// Sharp spherical cutoff to |xi| <= radius (the dealiasing projector).
inline Multiplier mult_ball(double radius) {
  Multiplier m;
  m.radial = [radius](double r) { return Complex(r <= radius ? 1.0 : 0.0, 0.0); };
  m.name = "ball(" + std::to_string(radius) + ")";
  return m;
}

// --------------------------------------------------------------------------
// Physical-space calculus built from the symbols (convenience layer; the
// time steppers assemble their own spectral pipelines instead).
// --------------------------------------------------------------------------

inline VectorField gradient(const RealField& f) {
  SpectralField c = transform(f);
  VectorField out;
  for (int a = 0; a < 3; ++a) out[a] = inverse_transform_real(apply_symbol(c, mult_derivative(a)));
  return out;
}

inline RealField divergence(const VectorField& v) {
  SpectralField s(v[0].grid, true);
  for (int a = 0; a < 3; ++a) {
    SpectralField da = apply_symbol(transform(v[a]), mult_derivative(a));
    for (std::size_t i = 0; i < s.a.size(); ++i) s.a[i] += da.a[i];
  }
  return inverse_transform_real(s);
}

inline VectorField curl(const VectorField& v) {
  SpectralVectorField c = transform(v);
  SpectralVectorField o = make_spectral_vector_field(v[0].grid, true);
  // (curl v)_a = eps_{abc} d_b v_c
  const int b_of[3] = {1, 2, 0};
  const int c_of[3] = {2, 0, 1};
  for (int a = 0; a < 3; ++a) {
    SpectralField t1 = apply_symbol(c[c_of[a]], mult_derivative(b_of[a]));
    SpectralField t2 = apply_symbol(c[b_of[a]], mult_derivative(c_of[a]));
    for (std::size_t i = 0; i < t1.a.size(); ++i) o[a].a[i] = t1.a[i] - t2.a[i];
  }
  return inverse_transform_real(o);
}

// R.v = |nabla|^-1 div v (scalar), R x v (vector), acting physical->physical.
inline RealField riesz_dot(const VectorField& v) {
  SpectralField s(v[0].grid, true);
  for (int a = 0; a < 3; ++a) {
    SpectralField da = apply_symbol(transform(v[a]), mult_riesz(a));
    for (std::size_t i = 0; i < s.a.size(); ++i) s.a[i] += da.a[i];
  }
  return inverse_transform_real(s);
}

// Symbol applied physical -> physical in one round trip.
inline RealField apply_physical(const RealField& f, const Multiplier& m) {
  return inverse_transform_real(apply_symbol(transform(f), m));
}
inline ComplexField apply_physical(const ComplexField& f, const Multiplier& m) {
  return inverse_transform(apply_symbol(transform(f), m));
}
inline VectorField apply_physical(const VectorField& v, const Multiplier& m) {
  return {apply_physical(v[0], m), apply_physical(v[1], m), apply_physical(v[2], m)};
}
inline ComplexVectorField apply_physical(const ComplexVectorField& v, const Multiplier& m) {
  return {apply_physical(v[0], m), apply_physical(v[1], m), apply_physical(v[2], m)};
}

// (R_0 f, R_1 f, R_2 f).
inline VectorField riesz(const RealField& f) {
  SpectralField c = transform(f);
  VectorField out;
  for (int a = 0; a < 3; ++a) out[a] = inverse_transform_real(apply_symbol(c, mult_riesz(a)));
  return out;
}

// Zero the three self-paired Nyquist planes |m_a| = n/2. Odd symbols vanish
// there (Multiplier::odd_axis_mask), so identities mixing derivative and
// radial routes hold exactly only on fields with no content in those planes.
// Generated data is kept in that subspace; this is the projection onto it.
inline void drop_nyquist_planes(SpectralField& c) {
  const Grid& g = c.grid;
  int n = g.n();
  double nyq = g.nyquist();
  auto at_nyquist = [&](int idx) { return std::abs(g.freq_1d(idx)) >= nyq * (1.0 - 1e-12); };
  std::size_t p = 0;
  for (int i = 0; i < n; ++i) {
    bool ni = at_nyquist(i);
    for (int j = 0; j < n; ++j) {
      bool nj = ni || at_nyquist(j);
      for (int k = 0; k < n; ++k, ++p)
        if (nj || at_nyquist(k)) c.a[p] = Complex(0.0, 0.0);
    }
  }
}

inline RealField nyquist_clean(const RealField& f) {
  SpectralField c = transform(f);
  drop_nyquist_planes(c);
  return inverse_transform_real(c);
}

inline VectorField nyquist_clean(const VectorField& v) {
  return {nyquist_clean(v[0]), nyquist_clean(v[1]), nyquist_clean(v[2])};
}

inline VectorField riesz_cross(const VectorField& v) {
  SpectralVectorField c = transform(v);
  SpectralVectorField o = make_spectral_vector_field(v[0].grid, true);
  const int b_of[3] = {1, 2, 0};
  const int c_of[3] = {2, 0, 1};
  for (int a = 0; a < 3; ++a) {
    SpectralField t1 = apply_symbol(c[c_of[a]], mult_riesz(b_of[a]));
    SpectralField t2 = apply_symbol(c[b_of[a]], mult_riesz(c_of[a]));
    for (std::size_t i = 0; i < t1.a.size(); ++i) o[a].a[i] = t1.a[i] - t2.a[i];
  }
  return inverse_transform_real(o);
}

}  // namespace eml
