// Dyadic decompositions on the grid: spectral shell projections P_k, the
// space-frequency pieces Q_jk, and the resonance-depth operators A_n.
//
// Index windows. The spectral window [k_lo, k_hi] covers the lattice's
// nonzero radii; the j window for scale k is [max(-k,0), j_top] with
// 2^j_top <= L/4 so the physical cutoffs fit the box. In both directions the
// infinite tails are folded into the extreme index (phi_le / phi_ge), so each
// family sums to exactly 1 and reconstruction identities hold pointwise to
// roundoff. Arguments outside a window raise RangeError, never a silent zero.
#pragma once

#include <optional>

#include "eml/bump.hpp"
#include "eml/multiplier.hpp"

namespace eml {

struct KRange {
  int lo;
  int hi;
};

inline KRange resolvable_k_range(const Grid& g) {
  int lo = static_cast<int>(std::floor(std::log2(g.min_freq())));
  int hi = static_cast<int>(std::ceil(std::log2(g.max_freq())));
  if (hi <= lo) hi = lo + 1;
  return {lo, hi};
}

// j window for the physical cutoffs at spectral scale 2^k.
struct JRange {
  int lo;   // max(-k, 0)
  int top;  // floor(log2(L/4)); the top index absorbs the outer tail
};

inline JRange j_range(const Grid& g, int k) {
  int lo = std::max(-k, 0);
  int top = static_cast<int>(std::floor(std::log2(g.length() / 4.0)));
  if (top < lo)
    throw RangeError("j_range: box too small for physical cutoffs at this spectral scale");
  return {lo, top};
}

// --------------------------------------------------------------------------
// P_k: dyadic frequency shell projection (folded at both window ends).
// --------------------------------------------------------------------------
inline double lp_weight(const DyadicCutoff& cut, const KRange& kr, int k, double r) {
  if (k < kr.lo || k > kr.hi) throw RangeError("lp_project: k outside the resolvable window");
  if (k == kr.lo) return cut.phi_le(r, k);
  if (k == kr.hi) return cut.phi_ge(r, k);
  return cut.phi_k(r, k);
}

inline SpectralField lp_project(const SpectralField& f, int k) {
  DyadicCutoff cut;
  KRange kr = resolvable_k_range(f.grid);
  Multiplier m;
  m.radial = [&cut, kr, k](double r) { return Complex(lp_weight(cut, kr, k, r), 0.0); };
  m.name = "P_" + std::to_string(k);
  return apply_symbol(f, m);
}

// --------------------------------------------------------------------------
// Q_jk: physical localization of a frequency shell. Input and output live in
// sample space. The j = max(-k,0) member carries the folded inner tail (that
// is its definition) and the j = j_top member the folded outer tail (box
// truncation).
// --------------------------------------------------------------------------
namespace detail {

inline double qjk_mask(const DyadicCutoff& cut, const JRange& jr, int j, double rho) {
  if (j < jr.lo || j > jr.top)
    throw RangeError("q_jk: j outside [max(-k,0), log2(L/4)]");
  if (j == jr.lo && j == jr.top) return 1.0;  // window of one: whole box
  if (j == jr.top) return cut.phi_ge(rho, j);
  if (j == jr.lo) return cut.phi_le(rho, j);  // the folded inner member
  return cut.phi_k(rho, j);
}

template <class FieldT>
FieldT apply_qjk_mask(FieldT g, int j, int k) {
  DyadicCutoff cut;
  JRange jr = j_range(g.grid, k);
  int n = g.grid.n();
  std::size_t p = 0;
  for (int i = 0; i < n; ++i) {
    for (int jj = 0; jj < n; ++jj) {
      for (int kk = 0; kk < n; ++kk, ++p) {
        double rho = norm(g.grid.coord(i, jj, kk));
        g.a[p] *= detail::qjk_mask(cut, jr, j, rho);
      }
    }
  }
  return g;
}

}  // namespace detail

inline RealField q_jk(const RealField& f, int j, int k) {
  RealField pk = inverse_transform_real(lp_project(transform(f), k));
  return detail::apply_qjk_mask(std::move(pk), j, k);
}

inline ComplexField q_jk(const ComplexField& f, int j, int k) {
  ComplexField pk = inverse_transform(lp_project(transform(f), k));
  return detail::apply_qjk_mask(std::move(pk), j, k);
}

// --------------------------------------------------------------------------
// A_n: frequency-space localization to the set where the resonance depth
// psi_dagger(|xi|) is comparable to 2^-n. The aggregate member A_{n,(j)}
// folds n' <= 0 into n = 0 and n' >= j+1 into n = j+1.
// --------------------------------------------------------------------------
inline double a_n_weight(const DyadicCutoff& cut, double y, int n) {
  return cut.phi_k(y, -n);
}

inline double a_n_aggregate_weight(const DyadicCutoff& cut, double y, int n, int j) {
  if (n < 0 || n > j + 1) throw RangeError("a_n_aggregate: need 0 <= n <= j+1");
  if (n == 0) return cut.phi_ge(y, 0);        // sum over n' <= 0
  if (n == j + 1) return cut.phi_le(y, -n);   // sum over n' >= j+1
  return cut.phi_k(y, -n);
}

namespace detail {

inline SpectralField apply_shellwise(const SpectralField& f, const RadialFn& psi_dagger,
                                     const std::function<double(double)>& weight_of_y,
                                     const std::string& name) {
  const auto& radii = f.grid.shell_radii();
  std::vector<double> w(radii.size());
  for (std::size_t s = 0; s < radii.size(); ++s) {
    double y = psi_dagger(radii[s]);
    if (!std::isfinite(y) || y < 0.0)
      throw NumericError(name + ": resonance depth must be finite and nonnegative");
    w[s] = weight_of_y(y);
  }
  SpectralField out(f.grid, f.conj_symmetric);
  const auto& ids = f.grid.shell_ids();
  for (std::size_t p = 0; p < f.a.size(); ++p) out.a[p] = f.a[p] * w[ids[p]];
  return out;
}

}  // namespace detail

inline SpectralField a_n_operator(const SpectralField& f, int n, const RadialFn& psi_dagger) {
  DyadicCutoff cut;
  return detail::apply_shellwise(
      f, psi_dagger, [&cut, n](double y) { return a_n_weight(cut, y, n); }, "a_n_operator");
}

inline SpectralField a_n_aggregate(const SpectralField& f, int n, int j,
                                   const RadialFn& psi_dagger) {
  DyadicCutoff cut;
  return detail::apply_shellwise(
      f, psi_dagger, [&cut, n, j](double y) { return a_n_aggregate_weight(cut, y, n, j); },
      "a_n_aggregate");
}

// Spherical 2/3-rule truncation.
inline SpectralField dealias(const SpectralField& f) {
  return apply_symbol(f, mult_ball(f.grid.dealias_radius()));
}

}  // namespace eml
