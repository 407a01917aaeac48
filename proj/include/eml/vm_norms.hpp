// Sum norms over the derivative/rotation operator family.
//
// The family V_m collects D^alpha Omega^beta with |alpha| + |beta| <= m and
// the norm is the sum of the L2 sizes of all members applied to the field.
// Evaluating members independently repeats every rotation prefix, so the
// implementation walks the rotation composites Omega_1^b1 Omega_2^b2
// Omega_3^b3 once as a tree (each node one rotation away from its parent),
// transforms each node a single time, and reads all pure-derivative norms
// off the spectrum by Parseval. Cost: C(m+3,3) rotation applications and one
// forward transform per node, instead of C(m+6,6) full pipelines.
//
// Weighted variants put the spatial weight (1+|x|^2)^q after the operator,
// matching the vorticity energy functional, and therefore need one inverse
// transform per (node, alpha) pair.
#pragma once

#include <map>

#include "eml/rotation.hpp"
#include "eml/state.hpp"
#include "eml/vm_ops.hpp"

namespace eml {
namespace detail {

inline double ipow(double x, int a) {
  double r = 1.0;
  while (a-- > 0) r *= x;
  return r;
}

// All beta multi-indices with |beta| <= m, parents before children.
inline std::vector<std::array<int, 3>> beta_list(int m) {
  std::vector<std::array<int, 3>> out;
  for (int total = 0; total <= m; ++total)
    for (int b1 = total; b1 >= 0; --b1)
      for (int b2 = total - b1; b2 >= 0; --b2) out.push_back({b1, b2, total - b1 - b2});
  return out;
}

// Physical composites Omega_1^b1 Omega_2^b2 Omega_3^b3 f (innermost Omega_3),
// indexed like beta_list(m).
template <class FieldT>
std::vector<FieldT> rotation_composites(const FieldT& f, int m, double rotation_tol) {
  auto betas = beta_list(m);
  std::map<std::array<int, 3>, std::size_t> index;
  std::vector<FieldT> nodes;
  nodes.reserve(betas.size());
  for (std::size_t i = 0; i < betas.size(); ++i) {
    auto b = betas[i];
    index[b] = i;
    if (b[0] == 0 && b[1] == 0 && b[2] == 0) {
      nodes.push_back(f);
      continue;
    }
    int axis = b[0] > 0 ? 0 : (b[1] > 0 ? 1 : 2);
    auto parent = b;
    parent[axis] -= 1;
    nodes.push_back(rotation_apply(nodes[index.at(parent)], axis, rotation_tol));
  }
  return nodes;
}

// All alpha multi-indices with |alpha| <= m.
inline std::vector<std::array<int, 3>> alpha_list(int m) { return beta_list(m); }

// ||D^alpha g||_L2^2 read off the spectrum. Odd derivative components vanish
// on the self-paired Nyquist plane (see Multiplier::odd_axis_mask), so those
// planes contribute nothing.
inline double alpha_l2_sq(const SpectralField& c, const std::array<int, 3>& alpha) {
  int n = c.grid.n();
  double nyq = c.grid.nyquist();
  auto gated = [&](int idx, int a) {
    return alpha[a] % 2 == 1 && std::abs(c.grid.freq_1d(idx)) >= nyq * (1.0 - 1e-12);
  };
  KahanSum s;
  std::size_t p = 0;
  for (int i = 0; i < n; ++i) {
    if (gated(i, 0)) {
      p += static_cast<std::size_t>(n) * n;
      continue;
    }
    double wi = ipow(c.grid.freq_1d(i), 2 * alpha[0]);
    for (int j = 0; j < n; ++j) {
      if (gated(j, 1)) {
        p += n;
        continue;
      }
      double wj = wi * ipow(c.grid.freq_1d(j), 2 * alpha[1]);
      for (int k = 0; k < n; ++k, ++p)
        if (!gated(k, 2)) s.add(wj * ipow(c.grid.freq_1d(k), 2 * alpha[2]) * std::norm(c.a[p]));
    }
  }
  return s.value() * c.grid.volume();
}

template <class FieldT>
double h_norm_components(const FieldT* comps, int ncomp, int m, double rotation_tol) {
  require(m >= 0, "h_norm: negative order");
  std::vector<std::vector<SpectralField>> specs(ncomp);
  for (int c = 0; c < ncomp; ++c) {
    auto nodes = rotation_composites(comps[c], m, rotation_tol);
    specs[c].reserve(nodes.size());
    for (const auto& node : nodes) specs[c].push_back(transform(node));
  }
  auto betas = beta_list(m);
  KahanSum total;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    int rem = m - (betas[b][0] + betas[b][1] + betas[b][2]);
    for (const auto& alpha : alpha_list(rem)) {
      double sq = 0.0;
      for (int c = 0; c < ncomp; ++c) sq += alpha_l2_sq(specs[c][b], alpha);
      total.add(std::sqrt(sq));
    }
  }
  return total.value();
}

inline RealField weight_field(const Grid& g, double exponent) {
  RealField w(g);
  int n = g.n();
  std::size_t p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k, ++p) {
        Vec3 x = g.coord(i, j, k);
        w.a[p] = std::pow(1.0 + dot(x, x), 2.0 * exponent);
      }
  return w;
}

inline double weighted_sq(const RealField& w, const RealField& g) {
  KahanSum s;
  for (std::size_t i = 0; i < g.a.size(); ++i) s.add(w.a[i] * g.a[i] * g.a[i]);
  return s.value() * g.grid.cell_volume();
}

template <class FieldT>
double weighted_norm_components(const FieldT* comps, int ncomp, int m, double weight_exponent,
                                double rotation_tol) {
  require(m >= 0, "weighted_norm: negative order");
  const Grid& g = comps[0].grid;
  RealField w = weight_field(g, weight_exponent);
  std::vector<std::vector<SpectralField>> specs(ncomp);
  for (int c = 0; c < ncomp; ++c) {
    auto nodes = rotation_composites(comps[c], m, rotation_tol);
    specs[c].reserve(nodes.size());
    for (const auto& node : nodes) specs[c].push_back(transform(node));
  }
  auto betas = beta_list(m);
  KahanSum total;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    int rem = m - (betas[b][0] + betas[b][1] + betas[b][2]);
    for (const auto& alpha : alpha_list(rem)) {
      double sq = 0.0;
      for (int c = 0; c < ncomp; ++c) {
        SpectralField da = apply_symbol(specs[c][b], mult_derivative_multi(alpha));
        RealField phys = inverse_transform_real(da);
        sq += weighted_sq(w, phys);
      }
      total.add(std::sqrt(sq));
    }
  }
  return total.value();
}

}  // namespace detail

inline double h_norm(const RealField& f, int m, double rotation_tol = kDefaultRotationMassTol) {
  return detail::h_norm_components(&f, 1, m, rotation_tol);
}
inline double h_norm(const VectorField& f, int m, double rotation_tol = kDefaultRotationMassTol) {
  return detail::h_norm_components(f.data(), 3, m, rotation_tol);
}
inline double h_norm(const ComplexField& f, int m, double rotation_tol = kDefaultRotationMassTol) {
  return detail::h_norm_components(&f, 1, m, rotation_tol);
}
inline double h_norm(const ComplexVectorField& f, int m,
                     double rotation_tol = kDefaultRotationMassTol) {
  return detail::h_norm_components(f.data(), 3, m, rotation_tol);
}

// Sum over the four physical fields: the full state size.
inline double htilde_norm(const PlasmaState& s, int m,
                          double rotation_tol = kDefaultRotationMassTol) {
  return h_norm(s.n, m, rotation_tol) + h_norm(s.v, m, rotation_tol) +
         h_norm(s.E, m, rotation_tol) + h_norm(s.B, m, rotation_tol);
}

// Sum over V_m of || (1+|x|^2)^q  L f ||_L2, the weight applied after the
// operator. q = 1/4 gives the weighted vorticity norm.
inline double weighted_norm(const RealField& f, int m, double weight_exponent = 0.25,
                            double rotation_tol = kDefaultRotationMassTol) {
  return detail::weighted_norm_components(&f, 1, m, weight_exponent, rotation_tol);
}
inline double weighted_norm(const VectorField& f, int m, double weight_exponent = 0.25,
                            double rotation_tol = kDefaultRotationMassTol) {
  return detail::weighted_norm_components(f.data(), 3, m, weight_exponent, rotation_tol);
}

}  // namespace eml
