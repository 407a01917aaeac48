// Dispersive variables: the diagonalization of the linearized system.
//
// With Lambda_e = sqrt(1 + d|grad|^2) and Lambda_b = sqrt(1 + |grad|^2),
//   U_e = Lambda_e Z + i F
//   U_b = W + i Lambda_b G + i Lambda_b^-1 |grad| Y
// turn the wave part of the dynamics into two scalar half-Klein-Gordon
// flows (dt + i Lambda_sigma) U_sigma = nonlinear terms, while Y = B - curl v
// is purely transported. The inverse map is
//   F = Im U_e,  Z = Lambda_e^-1 Re U_e,  W = Re U_b,
//   G = Lambda_b^-1 Im U_b - Lambda_b^-2 |grad| Y,
// and the physical fields follow from the Hodge formulas. Profiles
// V_sigma(t) = e^{i t Lambda_sigma} U_sigma(t) freeze the linear evolution so
// that scattering-type diagnostics act on slowly varying data.
//
// On the periodic box the spatial means of v and E fall outside the Riesz
// calculus (no zero-frequency inverse), yet they are dynamical: the means obey
//   d/dt mean(E) =  mean(v) + mean(n v)
//   d/dt mean(v) = -mean(E) - mean(v x B)
// a three-component oscillator at the plasma frequency Lambda(0) = 1. The
// state carries it as mu_a = mean(E_a) + i mean(v_a), so (dt + i) mu = sources,
// mirroring the U_sigma equations at xi = 0. diagonalize() splits the means
// off before the Hodge step and undiagonalize_physical() restores them; the
// pure Hodge-variable roundtrip stays mean-free.
#pragma once

#include <array>

#include "eml/hodge.hpp"

namespace eml {

struct DispersiveState {
  Grid grid;
  double d = 0.5;
  double time = 0.0;
  ComplexField U_e;
  ComplexVectorField U_b;
  VectorField Y;
  std::array<Complex, 3> mu{};  // mean oscillator, mu_a = mean(E_a) + i mean(v_a)

  DispersiveState(const Grid& g, double d_)
      : grid(g), d(d_), U_e(g), U_b(make_complex_vector_field(g)), Y(make_vector_field(g)) {
    check_sound_parameter(d);
  }

  bool all_finite() const {
    if (!U_e.all_finite()) return false;
    for (int c = 0; c < 3; ++c)
      if (!U_b[c].all_finite() || !Y[c].all_finite() || !finite(mu[c])) return false;
    return true;
  }
};

inline DispersiveState diagonalize(const HodgeVars& h) {
  DispersiveState u(h.grid, h.d);
  u.time = h.time;
  RealField le_z = apply_physical(h.Z, mult_dispersion(Branch::e, h.d));
  u.U_e = complex_combined(le_z, h.F);
  Multiplier lb = mult_dispersion(Branch::b, h.d);
  Multiplier grad_over_lb = mult_radial(
      [dd = h.d](double r) { return r / dispersion(Branch::b, r, dd); }, "|grad| Lambda_b^-1");
  for (int c = 0; c < 3; ++c) {
    RealField im = added(apply_physical(h.G[c], lb), apply_physical(h.Y[c], grad_over_lb));
    u.U_b[c] = complex_combined(h.W[c], im);
  }
  u.Y = h.Y;
  return u;
}

inline HodgeVars undiagonalize(const DispersiveState& u) {
  HodgeVars h(u.grid, u.d);
  h.time = u.time;
  h.F = imag_part(u.U_e);
  h.Z = apply_physical(real_part(u.U_e), mult_inv_dispersion(Branch::e, u.d));
  Multiplier inv_lb = mult_inv_dispersion(Branch::b, u.d);
  Multiplier grad_over_lb2 = mult_radial(
      [dd = u.d](double r) {
        double lb = dispersion(Branch::b, r, dd);
        return r / (lb * lb);
      },
      "|grad| Lambda_b^-2");
  for (int c = 0; c < 3; ++c) {
    h.W[c] = real_part(u.U_b[c]);
    h.G[c] = subtracted(apply_physical(imag_part(u.U_b[c]), inv_lb),
                        apply_physical(u.Y[c], grad_over_lb2));
  }
  h.Y = u.Y;
  return h;
}

inline DispersiveState diagonalize(const PlasmaState& s, double mean_tol = 1e-6) {
  PlasmaState tilde = s;
  std::array<Complex, 3> mu;
  for (int c = 0; c < 3; ++c) {
    double me = tilde.E[c].mean();
    double mv = tilde.v[c].mean();
    mu[c] = Complex(me, mv);
    for (auto& x : tilde.E[c].a) x -= me;
    for (auto& x : tilde.v[c].a) x -= mv;
  }
  DispersiveState u = diagonalize(hodge_decompose(tilde, mean_tol));
  u.mu = mu;
  return u;
}
inline PlasmaState undiagonalize_physical(const DispersiveState& u, double div_tol = 1e-8) {
  PlasmaState s = hodge_reconstruct(undiagonalize(u), div_tol);
  for (int c = 0; c < 3; ++c) {
    for (auto& x : s.E[c].a) x += u.mu[c].real();
    for (auto& x : s.v[c].a) x += u.mu[c].imag();
  }
  return s;
}

// V_sigma = e^{+ i t Lambda_sigma} U_sigma at the state's own time.
inline ComplexField profile_e(const DispersiveState& u) {
  return apply_physical(u.U_e, mult_half_wave(Wave::e, u.d, -u.time));
}
inline ComplexVectorField profile_b(const DispersiveState& u) {
  Multiplier m = mult_half_wave(Wave::b, u.d, -u.time);
  return {apply_physical(u.U_b[0], m), apply_physical(u.U_b[1], m), apply_physical(u.U_b[2], m)};
}

}  // namespace eml
