// Physical plasma state and its pointwise invariants.
//
// The model evolves a density perturbation n, a velocity v, and
// electromagnetic fields E, B with sound-speed parameter d in (0,1):
//
//   dt n + div((1+n) v)                    = 0
//   dt v + v.grad v + d grad n + E + v x B = 0
//   dt E - curl B - (1+n) v               = 0
//   dt B + curl E                         = 0
//
// subject to the constraints div B = 0 and div E + n = 0. The quantity
//   energy = int { d n^2 + (1+n)|v|^2 + |E|^2 + |B|^2 } dx
// is conserved by the flow, and Y = B - curl v is transported (stretched but
// never created by the wave part).
//
// All dynamical fields are taken mean-free at initialization: the torus
// admits constant modes that whole-space decay forbids. Means are not
// projected away during evolution; they are monitored through max_mean_abs.
#pragma once

#include <algorithm>

#include "eml/multiplier.hpp"

namespace eml {

struct PlasmaState {
  Grid grid;
  double d = 0.5;
  double time = 0.0;
  RealField n;
  VectorField v, E, B;

  PlasmaState(const Grid& g, double d_)
      : grid(g), d(d_), n(g), v(make_vector_field(g)), E(make_vector_field(g)),
        B(make_vector_field(g)) {
    check_sound_parameter(d);
  }

  bool all_finite() const {
    if (!n.all_finite()) return false;
    for (int c = 0; c < 3; ++c)
      if (!v[c].all_finite() || !E[c].all_finite() || !B[c].all_finite()) return false;
    return true;
  }
};

inline VectorField vorticity(const PlasmaState& s) { return vec_subtracted(s.B, curl(s.v)); }

// L2 sizes of the constraint residuals div(E) + n and div(B).
inline double residual_gauss(const PlasmaState& s) { return added(divergence(s.E), s.n).l2(); }
inline double residual_div_b(const PlasmaState& s) { return divergence(s.B).l2(); }

// min over the lattice of 1 + n; the state leaves the physical regime when
// this reaches zero.
inline double vacuum_margin(const PlasmaState& s) {
  double m = 1.0 + s.n.a[0];
  for (double x : s.n.a) m = std::min(m, 1.0 + x);
  return m;
}

inline double conserved_energy(const PlasmaState& s) {
  if (vacuum_margin(s) <= 0.0)
    throw NumericError("conserved_energy: vacuum state, 1 + n <= 0 somewhere on the lattice");
  KahanSum sum;
  for (std::size_t i = 0; i < s.n.a.size(); ++i) {
    double nn = s.n.a[i];
    double vv = s.v[0].a[i] * s.v[0].a[i] + s.v[1].a[i] * s.v[1].a[i] + s.v[2].a[i] * s.v[2].a[i];
    double ee = s.E[0].a[i] * s.E[0].a[i] + s.E[1].a[i] * s.E[1].a[i] + s.E[2].a[i] * s.E[2].a[i];
    double bb = s.B[0].a[i] * s.B[0].a[i] + s.B[1].a[i] * s.B[1].a[i] + s.B[2].a[i] * s.B[2].a[i];
    sum.add(s.d * nn * nn + (1.0 + nn) * vv + ee + bb);
  }
  return sum.value() * s.grid.cell_volume();
}

// Largest constant-mode magnitude across all components (monitoring only).
inline double max_mean_abs(const PlasmaState& s) {
  double m = std::abs(s.n.mean());
  for (int c = 0; c < 3; ++c) {
    m = std::max(m, std::abs(s.v[c].mean()));
    m = std::max(m, std::abs(s.E[c].mean()));
    m = std::max(m, std::abs(s.B[c].mean()));
  }
  return m;
}

inline void project_zero_mean(RealField& f) {
  double m = f.mean();
  for (double& x : f.a) x -= m;
}

// Remove the constant mode by subtracting a multiple of a localized profile
// with the same integral. A flat shift would smear mass out to the box
// boundary and trip the rotation operators' localization gate.
inline void project_zero_mean_localized(RealField& f, const RealField& profile) {
  double pm = profile.mean();
  if (pm == 0.0) throw RangeError("project_zero_mean_localized: profile has zero mean");
  double c = f.mean() / pm;
  for (std::size_t i = 0; i < f.a.size(); ++i) f.a[i] -= c * profile.a[i];
}

}  // namespace eml
