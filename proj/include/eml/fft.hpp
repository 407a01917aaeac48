// Fourier transforms between sample space and spectral space.
//
// Convention (the "unitary pair" used throughout):
//   forward:  c(xi) = N^-3 * sum_x f(x) exp(-i xi.x)
//   inverse:  f(x)  = sum_xi c(xi) exp(+i xi.x)
// with x on the centered lattice. A single cosine mode cos(xi0.x) therefore
// transforms to coefficients 1/2 at +-xi0, and Parseval holds exactly in the
// l2() conventions of field.hpp. The (-1)^(m1+m2+m3) phase that relates the
// centered lattice to FFTW's 0-based one is folded in here.
//
// Backend: FFTW3, double precision, full complex cubes, FFTW_ESTIMATE plans
// (deterministic planning) created once per grid size under a mutex and
// executed on caller buffers via the new-array interface.
#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "eml/field.hpp"

namespace eml {

namespace detail {

class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans p;
    return p;
  }

  void execute(int n, int sign, Complex* in, Complex* out) {
    fftw_plan plan = get(n, sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in),
                     reinterpret_cast<fftw_complex*>(out));
  }

 private:
  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::size_t total = static_cast<std::size_t>(n) * n * n;
    if (scratch_.size() < total) scratch_.resize(total);
    fftw_plan plan = fftw_plan_dft_3d(
        n, n, n, reinterpret_cast<fftw_complex*>(scratch_.data()),
        reinterpret_cast<fftw_complex*>(scratch_.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw NumericError("fft: plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
  std::vector<Complex> scratch_;
};

// Multiply by (-1)^(i1+i2+i3) in index space; with n even this equals the
// centered-lattice phase (-1)^(m1+m2+m3) in frequency space as well.
inline void apply_checkerboard(const Grid& g, std::vector<Complex>& a) {
  int n = g.n();
  std::size_t p = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int ij = (i + j) & 1;
      for (int k = 0; k < n; ++k, ++p) {
        if ((ij + k) & 1) a[p] = -a[p];
      }
    }
  }
}

}  // namespace detail

inline SpectralField transform(const ComplexField& f, bool conj_symmetric_hint = false) {
  SpectralField out(f.grid, conj_symmetric_hint);
  std::vector<Complex> buf = f.a;
  detail::FftPlans::instance().execute(f.grid.n(), FFTW_FORWARD, buf.data(), out.a.data());
  detail::apply_checkerboard(f.grid, out.a);
  double s = 1.0 / static_cast<double>(f.grid.size());
  for (auto& v : out.a) v *= s;
  return out;
}

inline SpectralField transform(const RealField& f) {
  ComplexField tmp(f.grid);
  for (std::size_t i = 0; i < f.a.size(); ++i) tmp.a[i] = Complex(f.a[i], 0.0);
  return transform(tmp, /*conj_symmetric_hint=*/true);
}

inline ComplexField inverse_transform(const SpectralField& c) {
  ComplexField out(c.grid);
  std::vector<Complex> buf = c.a;
  detail::apply_checkerboard(c.grid, buf);
  detail::FftPlans::instance().execute(c.grid.n(), FFTW_BACKWARD, buf.data(), out.a.data());
  return out;
}

// Inverse transform of a conjugate-symmetric spectrum. The imaginary residue
// is dropped (it is roundoff-level when the flag is truthful); refusing
// non-symmetric input keeps accidental information loss loud.
inline RealField inverse_transform_real(const SpectralField& c) {
  if (!c.conj_symmetric)
    throw NumericError("fft: inverse_transform_real on a spectrum not marked conjugate-symmetric");
  ComplexField z = inverse_transform(c);
  RealField out(c.grid);
  for (std::size_t i = 0; i < z.a.size(); ++i) out.a[i] = z.a[i].real();
  return out;
}

inline SpectralVectorField transform(const VectorField& v) {
  return {transform(v[0]), transform(v[1]), transform(v[2])};
}
inline SpectralVectorField transform(const ComplexVectorField& v, bool conj_symmetric_hint = false) {
  return {transform(v[0], conj_symmetric_hint), transform(v[1], conj_symmetric_hint),
          transform(v[2], conj_symmetric_hint)};
}
inline VectorField inverse_transform_real(const SpectralVectorField& v) {
  return {inverse_transform_real(v[0]), inverse_transform_real(v[1]),
          inverse_transform_real(v[2])};
}
inline ComplexVectorField inverse_transform(const SpectralVectorField& v) {
  return {inverse_transform(v[0]), inverse_transform(v[1]), inverse_transform(v[2])};
}

}  // namespace eml
