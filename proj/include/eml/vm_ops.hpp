// The commuting-family enumeration: operators D^alpha Omega^beta with
// |alpha| + |beta| <= m, six generators total. Enumeration order is
// lexicographic in (|alpha|+|beta|, alpha1..alpha3, beta1..beta3) and fixed,
// so every norm that sums over the family is reproducible bit-for-bit.
// Application order is rightmost-first: Omega_3^b3, then Omega_2^b2, then
// Omega_1^b1, then the full derivative multiplier in one spectral pass.
#pragma once

#include <vector>

#include "eml/rotation.hpp"

namespace eml {

struct VmOp {
  std::array<int, 3> alpha{0, 0, 0};  // derivative powers
  std::array<int, 3> beta{0, 0, 0};   // rotation powers

  int order() const {
    return alpha[0] + alpha[1] + alpha[2] + beta[0] + beta[1] + beta[2];
  }
  bool is_identity() const { return order() == 0; }
  bool has_rotation() const { return beta[0] + beta[1] + beta[2] > 0; }

  std::string name() const {
    std::string s;
    const char* dn[3] = {"d1", "d2", "d3"};
    const char* on[3] = {"O1", "O2", "O3"};
    for (int i = 0; i < 3; ++i)
      for (int r = 0; r < alpha[i]; ++r) s += dn[i];
    for (int i = 0; i < 3; ++i)
      for (int r = 0; r < beta[i]; ++r) s += on[i];
    return s.empty() ? "id" : s;
  }
};

inline std::vector<VmOp> vm_enumerate(int m) {
  if (m < 0) throw RangeError("vm_enumerate: order must be nonnegative");
  std::vector<VmOp> ops;
  for (int total = 0; total <= m; ++total) {
    for (int a1 = 0; a1 <= total; ++a1)
      for (int a2 = 0; a2 + a1 <= total; ++a2)
        for (int a3 = 0; a3 + a2 + a1 <= total; ++a3)
          for (int b1 = 0; b1 + a3 + a2 + a1 <= total; ++b1)
            for (int b2 = 0; b2 + b1 + a3 + a2 + a1 <= total; ++b2) {
              int b3 = total - (a1 + a2 + a3 + b1 + b2);
              ops.push_back(VmOp{{a1, a2, a3}, {b1, b2, b3}});
            }
  }
  return ops;
}

// Multiplier for D^alpha = prod_j (i xi_j)^alpha_j.
inline Multiplier mult_derivative_multi(const std::array<int, 3>& alpha) {
  Multiplier m;
  m.general = [alpha](const Vec3& xi) {
    Complex w(1.0, 0.0);
    for (int j = 0; j < 3; ++j)
      for (int r = 0; r < alpha[j]; ++r) w *= Complex(0.0, xi[j]);
    return w;
  };
  m.conj_symmetric = true;
  for (int j = 0; j < 3; ++j)
    if (alpha[j] % 2 == 1) m.odd_axis_mask |= 1 << j;
  m.name = "D^alpha";
  return m;
}

namespace detail {

template <class FieldT, class InverseFn>
FieldT vm_apply_impl(const VmOp& op, const FieldT& f, double rotation_tol, InverseFn inverse) {
  FieldT g = f;
  for (int axis = 2; axis >= 0; --axis)
    for (int r = 0; r < op.beta[axis]; ++r) g = rotation_apply(g, axis, rotation_tol);
  if (op.alpha[0] + op.alpha[1] + op.alpha[2] > 0)
    g = inverse(apply_symbol(transform(g), mult_derivative_multi(op.alpha)));
  return g;
}

}  // namespace detail

inline RealField vm_apply(const VmOp& op, const RealField& f,
                          double rotation_tol = kDefaultRotationMassTol) {
  return detail::vm_apply_impl(op, f, rotation_tol,
                               [](const SpectralField& c) { return inverse_transform_real(c); });
}

inline ComplexField vm_apply(const VmOp& op, const ComplexField& f,
                             double rotation_tol = kDefaultRotationMassTol) {
  return detail::vm_apply_impl(op, f, rotation_tol,
                               [](const SpectralField& c) { return inverse_transform(c); });
}

}  // namespace eml
