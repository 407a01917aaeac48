// Hodge decomposition of the plasma state.
//
// The mean-free fields v and E split into potential and solenoidal parts
// through the scalar/vector potentials
//   F = |grad|^-1 div v,   G = |grad|^-1 curl v,
//   Z = |grad|^-1 div E,   W = |grad|^-1 curl E,
// together with Y = B - curl v. The state is recovered elliptically:
//   v = -R F + R x G,  E = -R Z + R x W,  n = -|grad| Z,  B = Y + |grad| G,
// where R is the Riesz transform vector. div G = div W = div Y = 0 by
// construction, and the reconstruction satisfies both constraints as an
// algebraic identity: div(R x .) = 0 and div(-R Z) = |grad| Z = -n, so
// div E + n = 0 mode by mode.
#pragma once

#include "eml/state.hpp"

namespace eml {

struct HodgeVars {
  Grid grid;
  double d = 0.5;
  double time = 0.0;
  RealField F, Z;
  VectorField G, W, Y;

  HodgeVars(const Grid& g, double d_)
      : grid(g), d(d_), F(g), Z(g), G(make_vector_field(g)), W(make_vector_field(g)),
        Y(make_vector_field(g)) {
    check_sound_parameter(d);
  }
};

// Largest mean magnitude among the components of v and E; the potentials see
// none of it (singular symbols drop the zero mode), so decomposition refuses
// states whose constant modes carry more than mean_tol.
inline double hodge_mean_defect(const PlasmaState& s) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) {
    m = std::max(m, std::abs(s.v[c].mean()));
    m = std::max(m, std::abs(s.E[c].mean()));
  }
  return m;
}

inline HodgeVars hodge_decompose(const PlasmaState& s, double mean_tol = 1e-6) {
  double defect = hodge_mean_defect(s);
  if (!(defect <= mean_tol))
    throw RangeError("hodge_decompose: v or E has constant mode of size " +
                     std::to_string(defect) + ", above tolerance " + std::to_string(mean_tol));
  HodgeVars h(s.grid, s.d);
  h.time = s.time;
  h.F = riesz_dot(s.v);
  h.G = riesz_cross(s.v);
  h.Z = riesz_dot(s.E);
  h.W = riesz_cross(s.E);
  h.Y = vec_subtracted(s.B, curl(s.v));
  return h;
}

// Relative size of the divergence of a nominally solenoidal field.
inline double solenoidal_defect(const VectorField& g) {
  double scale = std::max(1e-300, l2(g));
  return divergence(g).l2() / scale;
}

inline PlasmaState hodge_reconstruct(const HodgeVars& h, double div_tol = 1e-8) {
  // A potential is exempt from the solenoidality check when its mass is
  // negligible against the state (roundoff debris, e.g. Y = B - curl v
  // evaluated twice along slightly different paths): whatever its relative
  // divergence, its contribution to the reconstruction is below div_tol.
  double state_scale = std::max({h.F.l2(), h.Z.l2(), l2(h.G), l2(h.W), l2(h.Y)});
  for (const auto* p : {&h.G, &h.W, &h.Y}) {
    if (l2(*p) <= div_tol * state_scale) continue;
    double defect = solenoidal_defect(*p);
    if (!(defect <= div_tol))
      throw RangeError("hodge_reconstruct: input vector potential has relative divergence " +
                       std::to_string(defect) + ", above tolerance " + std::to_string(div_tol));
  }
  PlasmaState s(h.grid, h.d);
  s.time = h.time;
  s.v = vec_subtracted(riesz_cross(h.G), riesz(h.F));
  s.E = vec_subtracted(riesz_cross(h.W), riesz(h.Z));
  s.n = scaled(apply_physical(h.Z, mult_modulus()), -1.0);
  s.B = vec_added(h.Y, apply_physical(h.G, mult_modulus()));
  return s;
}

}  // namespace eml
