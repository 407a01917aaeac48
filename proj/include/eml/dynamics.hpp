// Time evolution of the plasma system in both formulations.
//
// The physical route steps (n, v, E, B) with classical RK4:
//   n' = -div((1+n)v)
//   v' = -v.grad v - d grad n - E - v x B
//   E' = curl B + (1+n)v
//   B' = -curl E
// The dispersive route steps (U_e, U_b, Y, mu) with integrating-factor RK4,
// treating the half-Klein-Gordon phases e^{-i t Lambda_sigma} exactly:
//   (dt + i Lambda_e) U_e = Lambda_e (R.[nv]) + i |grad| (|v|^2)/2 - i R.(v x Y)
//   (dt + i Lambda_b) U_b = R x [nv] - i Lambda_b^-1 R x (v x Y)
//   dt Y  = curl(v x Y)
//   (dt + i) mu = mean(nv) - i mean(v x Y)
// with n, v reconstructed from (U, Y, mu) at every stage. The two routes are
// the same flow written in different variables, and "both" mode runs them in
// lockstep and records the reconstructed-state gap.
//
// Nonlinear products are formed pointwise in physical space from factors
// truncated to the spherical 2/3 ball, and the products are truncated again;
// quadratic aliases then land outside the kept ball, so the retained spectrum
// of every product is the exact convolution. Linear terms are never truncated.
//
// Breakdown (norm growth past blowup_factor, vacuum loss, non-finite fields)
// ends a run early and is recorded on the trajectory, never thrown.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "eml/dispersive.hpp"
#include "eml/dyadic_ops.hpp"
#include "eml/initial_data.hpp"
#include "eml/multiplier.hpp"
#include "eml/vm_norms.hpp"
#include "eml/znorm.hpp"

namespace eml {

enum class Formulation { physical, dispersive, both };

inline const char* formulation_name(Formulation f) {
  switch (f) {
    case Formulation::physical: return "physical";
    case Formulation::dispersive: return "dispersive";
    case Formulation::both: return "both";
  }
  throw RangeError("formulation_name: unknown formulation");
}

inline Formulation parse_formulation(const std::string& s) {
  if (s == "physical") return Formulation::physical;
  if (s == "dispersive") return Formulation::dispersive;
  if (s == "both") return Formulation::both;
  throw ConfigError("formulation must be physical, dispersive, or both (got '" + s + "')");
}

// ---------------------------------------------------------------------------
// Run configuration.
// ---------------------------------------------------------------------------
struct SimConfig {
  int grid_n = 32;
  double box_length = 32.0;
  double d = 0.5;
  double dt = 0.0;  // <= 0 picks the default 0.5 / max|xi|
  double t_end = 1.0;
  Formulation formulation = Formulation::physical;
  bool dealias = true;
  double blowup_factor = 10.0;
  int output_stride = 1;    // record diagnostics every this many steps
  int z_stride = 0;         // profile Z norm every this many recorded rows, 0 = never
  int snapshot_stride = 0;  // keep a state copy every this many recorded rows, 0 = never
  double cfl_limit = 1.0;   // bound on dt * max|xi| * max(1, sqrt(d))
  InitialDataSpec initial;
  NormConfig norms;

  Grid make_grid() const { return Grid(grid_n, box_length); }
  double effective_dt(const Grid& g) const { return dt > 0.0 ? dt : 0.5 / g.max_freq(); }

  void validate(const Grid& g) const {
    if (!(d > 0.0 && d < 1.0)) throw ConfigError("simulation: d must lie in (0,1)");
    if (!(t_end > 0.0) || !std::isfinite(t_end))
      throw ConfigError("simulation: t_end must be positive and finite");
    if (!(blowup_factor > 1.0)) throw ConfigError("simulation: blowup_factor must exceed 1");
    if (output_stride < 1) throw ConfigError("simulation: output_stride must be at least 1");
    if (z_stride < 0) throw ConfigError("simulation: z_stride must be nonnegative");
    if (snapshot_stride < 0) throw ConfigError("simulation: snapshot_stride must be nonnegative");
    if (!(cfl_limit > 0.0)) throw ConfigError("simulation: cfl_limit must be positive");
    double h = effective_dt(g);
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("simulation: dt must be positive");
    double cfl = h * g.max_freq() * std::max(1.0, std::sqrt(d));
    if (cfl >= cfl_limit)
      throw ConfigError("simulation: dt " + std::to_string(h) + " gives CFL number " +
                        std::to_string(cfl) + ", limit " + std::to_string(cfl_limit));
    norms.validate();
  }
};

// ---------------------------------------------------------------------------
// Trajectory: per-row diagnostics plus sparse state snapshots.
// ---------------------------------------------------------------------------
struct TrajectoryRow {
  double t = 0.0;
  double energy = 0.0;
  double res_div_b = 0.0;
  double res_gauss = 0.0;
  double h_norm = 0.0;        // rotation-graded Sobolev of the state; NaN once delocalized
  double vort_norm = 0.0;     // weighted vorticity norm; NaN once delocalized
  double vort_sobolev = 0.0;  // plain derivative Sobolev of Y, gate-free
  double z_norm = 0.0;        // profile Z norm when sampled, NaN otherwise
  double xform_gap = 0.0;     // both mode: reconstructed-state gap, NaN otherwise
};

struct BreakdownInfo {
  double time = 0.0;
  std::string cause;
};

struct Trajectory {
  SimConfig config;
  double dt_used = 0.0;
  std::vector<TrajectoryRow> rows;
  std::optional<BreakdownInfo> breakdown;
  std::vector<std::pair<double, PlasmaState>> snapshots;
  std::optional<PlasmaState> final_physical;
  std::optional<DispersiveState> final_dispersive;
};

inline void write_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,energy,res_divB,res_gauss,h_norm,vort_norm,z_norm,xform_gap\n";
  char buf[40];
  auto put = [&](double x, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf << sep;
  };
  for (const TrajectoryRow& r : traj.rows) {
    put(r.t, ',');
    put(r.energy, ',');
    put(r.res_div_b, ',');
    put(r.res_gauss, ',');
    put(r.h_norm, ',');
    put(r.vort_norm, ',');
    put(r.z_norm, ',');
    put(r.xform_gap, '\n');
  }
}

// First recorded time at which the monitored norm exceeds blowup_factor times
// its initial (first finite) value, or a non-finite energy appears. NaN norm
// entries mean "not evaluable there" and are skipped, not treated as blowup.
inline std::optional<double> breakdown_time(const Trajectory& traj, double blowup_factor) {
  if (!(blowup_factor > 1.0)) throw RangeError("breakdown_time: blowup_factor must exceed 1");
  double h0 = std::numeric_limits<double>::quiet_NaN();
  for (const TrajectoryRow& r : traj.rows) {
    if (!std::isfinite(r.energy)) return r.t;
    if (!std::isfinite(r.h_norm)) continue;
    if (!std::isfinite(h0)) {
      h0 = r.h_norm;
    } else if (h0 > 0.0 && r.h_norm > blowup_factor * h0) {
      return r.t;
    }
  }
  return std::nullopt;
}

namespace detail {

// Gate-free Sobolev norm of a vector field: sqrt(sum over |alpha| <= m of
// |d^alpha f|_2^2). Used where the rotation-graded norms stop being evaluable.
inline double sobolev_norm(const VectorField& f, int m) {
  KahanSum sq;
  for (int c = 0; c < 3; ++c) {
    SpectralField fh = transform(f[c]);
    for (const auto& alpha : alpha_list(m)) sq.add(alpha_l2_sq(fh, alpha));
  }
  return std::sqrt(sq.value());
}

inline RealField truncated_physical(const RealField& f, bool on) {
  if (!on) return f;
  return inverse_transform_real(dealias(transform(f)));
}

// Spectral Riesz contractions: (R.c) and (R x c).
inline SpectralField riesz_dot_spectral(const SpectralVectorField& c) {
  SpectralField out = apply_symbol(c[0], mult_riesz(0));
  out = added(std::move(out), apply_symbol(c[1], mult_riesz(1)));
  out = added(std::move(out), apply_symbol(c[2], mult_riesz(2)));
  return out;
}
inline SpectralVectorField riesz_cross_spectral(const SpectralVectorField& c) {
  SpectralVectorField out;
  constexpr int b_of[3] = {1, 2, 0}, c_of[3] = {2, 0, 1};
  for (int a = 0; a < 3; ++a)
    out[a] = subtracted(apply_symbol(c[c_of[a]], mult_riesz(b_of[a])),
                        apply_symbol(c[b_of[a]], mult_riesz(c_of[a])));
  return out;
}
inline SpectralVectorField curl_spectral(const SpectralVectorField& c) {
  SpectralVectorField out;
  constexpr int b_of[3] = {1, 2, 0}, c_of[3] = {2, 0, 1};
  for (int a = 0; a < 3; ++a)
    out[a] = subtracted(apply_symbol(c[c_of[a]], mult_derivative(b_of[a])),
                        apply_symbol(c[b_of[a]], mult_derivative(c_of[a])));
  return out;
}

inline void daxpy(double s, const PlasmaState& x, PlasmaState& y) {
  axpy(s, x.n, y.n);
  for (int c = 0; c < 3; ++c) {
    axpy(s, x.v[c], y.v[c]);
    axpy(s, x.E[c], y.E[c]);
    axpy(s, x.B[c], y.B[c]);
  }
}
inline void daxpy(double s, const DispersiveState& x, DispersiveState& y) {
  axpy(s, x.U_e, y.U_e);
  for (int c = 0; c < 3; ++c) {
    axpy(s, x.U_b[c], y.U_b[c]);
    axpy(s, x.Y[c], y.Y[c]);
    y.mu[c] += s * x.mu[c];
  }
}

// e^{-i tau Lambda_sigma} on the wave components; Y is phase-free and the mean
// oscillator rotates at the zero-frequency rate Lambda(0) = 1.
inline DispersiveState phase_shifted(const DispersiveState& u, double tau) {
  DispersiveState out = u;
  out.U_e = apply_physical(u.U_e, mult_half_wave(Wave::e, u.d, tau));
  Multiplier mb = mult_half_wave(Wave::b, u.d, tau);
  for (int c = 0; c < 3; ++c) out.U_b[c] = apply_physical(u.U_b[c], mb);
  Complex rot = std::polar(1.0, -tau);
  for (int c = 0; c < 3; ++c) out.mu[c] = rot * u.mu[c];
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Right-hand sides.
// ---------------------------------------------------------------------------
inline PlasmaState rhs_physical(const PlasmaState& s, bool dealias_products = true) {
  const Grid& g = s.grid;
  auto trunc = [&](SpectralField c) { return dealias_products ? dealias(c) : std::move(c); };
  auto deriv = [](const SpectralField& c, int ax) {
    return apply_symbol(c, mult_derivative(ax));
  };

  // Full spectra once, truncated factor copies for the quadratic terms.
  SpectralField nh_full = transform(s.n);
  RealField nt = inverse_transform_real(trunc(nh_full));
  SpectralVectorField vh_full, Bh_full, vth;
  VectorField vt, Bt;
  for (int c = 0; c < 3; ++c) {
    vh_full[c] = transform(s.v[c]);
    Bh_full[c] = transform(s.B[c]);
    vth[c] = trunc(vh_full[c]);
    vt[c] = inverse_transform_real(vth[c]);
    Bt[c] = inverse_transform_real(trunc(Bh_full[c]));
  }

  PlasmaState out(g, s.d);
  out.time = s.time;
  const std::size_t np = g.size();
  constexpr int b_of[3] = {1, 2, 0}, c_of[3] = {2, 0, 1};

  // Shared current product [nv]; it feeds both the density and E equations.
  SpectralVectorField wh;
  VectorField wp = make_vector_field(g);
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < np; ++i) wp[a].a[i] = nt.a[i] * vt[a].a[i];
    wh[a] = trunc(transform(wp[a]));
    wp[a] = inverse_transform_real(wh[a]);
  }

  // n' = -div v - div [nv]; the linear part is never truncated.
  SpectralField divw = deriv(vh_full[0], 0);
  divw = added(std::move(divw), deriv(vh_full[1], 1));
  divw = added(std::move(divw), deriv(vh_full[2], 2));
  for (int a = 0; a < 3; ++a) divw = added(std::move(divw), deriv(wh[a], a));
  out.n = scaled(inverse_transform_real(divw), -1.0);

  // v' = -(v.grad v) - (v x B) - E - d grad n.
  VectorField gn = make_vector_field(g);
  for (int a = 0; a < 3; ++a) gn[a] = inverse_transform_real(deriv(nh_full, a));
  for (int a = 0; a < 3; ++a) {
    RealField adv(g);
    for (int b = 0; b < 3; ++b) {
      RealField dva = inverse_transform_real(deriv(vth[a], b));
      for (std::size_t i = 0; i < np; ++i) adv.a[i] += vt[b].a[i] * dva.a[i];
    }
    adv = detail::truncated_physical(adv, dealias_products);
    RealField cross(g);
    for (std::size_t i = 0; i < np; ++i)
      cross.a[i] = vt[b_of[a]].a[i] * Bt[c_of[a]].a[i] - vt[c_of[a]].a[i] * Bt[b_of[a]].a[i];
    cross = detail::truncated_physical(cross, dealias_products);
    for (std::size_t i = 0; i < np; ++i)
      out.v[a].a[i] = -adv.a[i] - cross.a[i] - s.E[a].a[i] - s.d * gn[a].a[i];
  }

  // E' = curl B + v + [nv];  B' = -curl E.
  SpectralVectorField cbh = detail::curl_spectral(Bh_full);
  for (int a = 0; a < 3; ++a) {
    RealField cb = inverse_transform_real(cbh[a]);
    for (std::size_t i = 0; i < np; ++i)
      out.E[a].a[i] = cb.a[i] + s.v[a].a[i] + wp[a].a[i];
  }
  out.B = vec_scaled(curl(s.E), -1.0);
  return out;
}

namespace detail {

// Nonlinear sources of the dispersive system (the -i Lambda U terms excluded,
// they are what the integrating factor handles exactly).
inline DispersiveState dispersive_sources(const DispersiveState& u, bool dealias_products) {
  const Grid& g = u.grid;
  auto trunc = [&](SpectralField c) { return dealias_products ? dealias(c) : std::move(c); };

  // Mean-free n, v from the wave variables, then the full v with means.
  HodgeVars h = undiagonalize(u);
  RealField n = scaled(apply_physical(h.Z, mult_modulus()), -1.0);
  VectorField v = vec_subtracted(riesz_cross(h.G), riesz(h.F));
  for (int c = 0; c < 3; ++c) {
    double mv = u.mu[c].imag();
    for (auto& x : v[c].a) x += mv;
  }

  RealField nt = truncated_physical(n, dealias_products);
  VectorField vt, Yt;
  for (int c = 0; c < 3; ++c) {
    vt[c] = truncated_physical(v[c], dealias_products);
    Yt[c] = truncated_physical(u.Y[c], dealias_products);
  }

  const std::size_t np = g.size();
  constexpr int b_of[3] = {1, 2, 0}, c_of[3] = {2, 0, 1};
  RealField vsq(g);
  VectorField nv = make_vector_field(g), vxy = make_vector_field(g);
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < np; ++i) {
      nv[a].a[i] = nt.a[i] * vt[a].a[i];
      vxy[a].a[i] = vt[b_of[a]].a[i] * Yt[c_of[a]].a[i] - vt[c_of[a]].a[i] * Yt[b_of[a]].a[i];
      vsq.a[i] += vt[a].a[i] * vt[a].a[i];
    }
  }

  DispersiveState out(g, u.d);
  out.time = u.time;
  // Mean oscillator sources come straight from the grid products; truncation
  // never touches the zero mode.
  for (int a = 0; a < 3; ++a) out.mu[a] = Complex(nv[a].mean(), -vxy[a].mean());

  SpectralVectorField nvh, vxyh;
  for (int a = 0; a < 3; ++a) {
    nvh[a] = trunc(transform(nv[a]));
    vxyh[a] = trunc(transform(vxy[a]));
  }
  SpectralField vsqh = trunc(transform(vsq));

  // U_e source: Lambda_e (R.[nv]) + i ( |grad| |v|^2 / 2 - R.(v x Y) ).
  SpectralField re_h = apply_symbol(riesz_dot_spectral(nvh), mult_dispersion(Branch::e, u.d));
  SpectralField im_h = subtracted(scaled(apply_symbol(vsqh, mult_modulus()), 0.5),
                                  riesz_dot_spectral(vxyh));
  out.U_e = complex_combined(inverse_transform_real(re_h), inverse_transform_real(im_h));

  // U_b source: R x [nv] - i Lambda_b^-1 R x (v x Y).
  SpectralVectorField rnv = riesz_cross_spectral(nvh);
  SpectralVectorField rvy = riesz_cross_spectral(vxyh);
  Multiplier inv_lb = mult_inv_dispersion(Branch::b, u.d);
  for (int a = 0; a < 3; ++a)
    out.U_b[a] = complex_combined(
        inverse_transform_real(rnv[a]),
        scaled(inverse_transform_real(apply_symbol(rvy[a], inv_lb)), -1.0));

  // Y' = curl(v x Y).
  SpectralVectorField cy = curl_spectral(vxyh);
  for (int a = 0; a < 3; ++a) out.Y[a] = inverse_transform_real(cy[a]);
  return out;
}

}  // namespace detail

inline DispersiveState rhs_dispersive(const DispersiveState& u, bool dealias_products = true) {
  DispersiveState out = detail::dispersive_sources(u, dealias_products);
  ComplexField le = apply_physical(u.U_e, mult_dispersion(Branch::e, u.d));
  const Complex mi(0.0, -1.0);
  for (std::size_t i = 0; i < out.U_e.a.size(); ++i) out.U_e.a[i] += mi * le.a[i];
  Multiplier lb = mult_dispersion(Branch::b, u.d);
  for (int c = 0; c < 3; ++c) {
    ComplexField lbc = apply_physical(u.U_b[c], lb);
    for (std::size_t i = 0; i < out.U_b[c].a.size(); ++i) out.U_b[c].a[i] += mi * lbc.a[i];
    out.mu[c] += mi * u.mu[c];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Steppers: classical RK4 for the physical form, integrating-factor RK4 for
// the dispersive form (linear phases handled exactly).
// ---------------------------------------------------------------------------
inline void step_physical(PlasmaState& s, double h, bool dealias_products = true) {
  PlasmaState k1 = rhs_physical(s, dealias_products);
  PlasmaState s2 = s;
  detail::daxpy(0.5 * h, k1, s2);
  PlasmaState k2 = rhs_physical(s2, dealias_products);
  PlasmaState s3 = s;
  detail::daxpy(0.5 * h, k2, s3);
  PlasmaState k3 = rhs_physical(s3, dealias_products);
  PlasmaState s4 = s;
  detail::daxpy(h, k3, s4);
  PlasmaState k4 = rhs_physical(s4, dealias_products);
  detail::daxpy(h / 6.0, k1, s);
  detail::daxpy(h / 3.0, k2, s);
  detail::daxpy(h / 3.0, k3, s);
  detail::daxpy(h / 6.0, k4, s);
  s.time += h;
}

inline void step_dispersive(DispersiveState& u, double h, bool dealias_products = true) {
  using detail::daxpy;
  using detail::dispersive_sources;
  using detail::phase_shifted;
  DispersiveState n1 = dispersive_sources(u, dealias_products);
  DispersiveState eu = phase_shifted(u, 0.5 * h);
  DispersiveState stage = eu;
  daxpy(0.5 * h, phase_shifted(n1, 0.5 * h), stage);
  DispersiveState n2 = dispersive_sources(stage, dealias_products);
  stage = eu;
  daxpy(0.5 * h, n2, stage);
  DispersiveState n3 = dispersive_sources(stage, dealias_products);
  DispersiveState e2u = phase_shifted(u, h);
  DispersiveState en3 = phase_shifted(n3, 0.5 * h);
  stage = e2u;
  daxpy(h, en3, stage);
  DispersiveState n4 = dispersive_sources(stage, dealias_products);
  u = std::move(e2u);
  daxpy(h / 6.0, phase_shifted(n1, h), u);
  daxpy(h / 3.0, phase_shifted(n2, 0.5 * h), u);
  daxpy(h / 3.0, en3, u);
  daxpy(h / 6.0, n4, u);
  u.time += h;
}

// ---------------------------------------------------------------------------
// run(): evolve to t_end or breakdown, recording diagnostics at the stride.
// ---------------------------------------------------------------------------
inline Trajectory run(const SimConfig& cfg) {
  Grid g = cfg.make_grid();
  cfg.validate(g);
  const double h = cfg.effective_dt(g);
  const bool want_p = cfg.formulation != Formulation::dispersive;
  const bool want_d = cfg.formulation != Formulation::physical;
  const double qnan = std::numeric_limits<double>::quiet_NaN();

  PlasmaState sp = make_initial_data(cfg.initial, g, cfg.d);
  std::optional<DispersiveState> ud;
  if (want_d) ud = diagonalize(sp);

  Trajectory traj;
  traj.config = cfg;
  traj.dt_used = h;

  std::optional<ZNormContext> zctx;
  double h_first = qnan;

  auto gated = [](auto&& eval) {
    try {
      return eval();
    } catch (const LocalizationError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  // Records one diagnostics row; returns false when the row itself reveals
  // breakdown (vacuum loss or norm blowup) and the run must stop.
  auto record = [&](double t) -> bool {
    std::optional<PlasmaState> recon;
    if (want_d && (!want_p || cfg.formulation == Formulation::both))
      recon = undiagonalize_physical(*ud);
    const PlasmaState& src = want_p ? sp : *recon;

    TrajectoryRow row;
    row.t = t;
    double margin = vacuum_margin(src);
    bool vacuum_ok = std::isfinite(margin) && margin > 0.0;
    row.energy = vacuum_ok ? conserved_energy(src) : qnan;
    row.res_div_b = residual_div_b(src);
    row.res_gauss = residual_gauss(src);
    // The graded norm is a norm of the mean-free sector; the box means are
    // dynamical on the torus (see the dispersive header) but carry no
    // localized content, so they are split off before the rotation calculus.
    PlasmaState tilde = src;
    for (int c = 0; c < 3; ++c) {
      double me = tilde.E[c].mean(), mv = tilde.v[c].mean();
      for (auto& x : tilde.E[c].a) x -= me;
      for (auto& x : tilde.v[c].a) x -= mv;
    }
    double mtol = cfg.norms.monitor_rotation_tol;
    row.h_norm = gated([&] { return htilde_norm(tilde, cfg.norms.n0_eff, mtol); });
    VectorField Yf = vorticity(src);
    // Irrotational data keeps Y at the roundoff floor, where the field is
    // noise spread over the whole box and a localization gate is meaningless;
    // evaluate ungated there, the value itself is negligible.
    double vort_tol = l2(Yf) <= 1e-12 * (l2(src.v) + l2(src.E) + l2(src.B))
                          ? std::numeric_limits<double>::infinity()
                          : mtol;
    row.vort_norm = gated([&] {
      return weighted_norm(Yf, cfg.norms.n1_eff, cfg.norms.weight_exponent, vort_tol);
    });
    row.vort_sobolev = detail::sobolev_norm(Yf, cfg.norms.n1_eff);

    std::size_t row_index = traj.rows.size();
    row.z_norm = qnan;
    if (cfg.z_stride > 0 && row_index % static_cast<std::size_t>(cfg.z_stride) == 0) {
      if (!zctx) {
        NormConfig zcfg = cfg.norms;
        zcfg.rotation_tol = mtol;
        zctx = ZNormContext::build(g, cfg.d, zcfg);
      }
      std::optional<DispersiveState> tmp;
      const DispersiveState* us = ud ? &*ud : (tmp = diagonalize(sp), tmp->time = t, &*tmp);
      row.z_norm =
          gated([&] { return z_norm(profile_e(*us), profile_b(*us), *zctx).value; });
    }

    row.xform_gap = qnan;
    if (cfg.formulation == Formulation::both) {
      double gap = max_abs_diff(sp.n, recon->n);
      gap = std::max(gap, vec_max_abs_diff(sp.v, recon->v));
      gap = std::max(gap, vec_max_abs_diff(sp.E, recon->E));
      gap = std::max(gap, vec_max_abs_diff(sp.B, recon->B));
      row.xform_gap = gap;
    }

    if (cfg.snapshot_stride > 0 &&
        row_index % static_cast<std::size_t>(cfg.snapshot_stride) == 0)
      traj.snapshots.emplace_back(t, src);
    traj.rows.push_back(row);

    if (!vacuum_ok) {
      traj.breakdown = BreakdownInfo{t, "vacuum margin lost"};
      return false;
    }
    if (!std::isfinite(row.energy)) {
      traj.breakdown = BreakdownInfo{t, "non-finite energy"};
      return false;
    }
    if (std::isfinite(row.h_norm)) {
      if (!std::isfinite(h_first)) {
        h_first = row.h_norm;
      } else if (h_first > 0.0 && row.h_norm > cfg.blowup_factor * h_first) {
        traj.breakdown = BreakdownInfo{t, "norm growth past the blowup factor"};
        return false;
      }
    }
    return true;
  };

  bool alive = record(0.0);
  if (alive) {
    long long nsteps = static_cast<long long>(std::ceil(cfg.t_end / h - 1e-9));
    if (nsteps < 1) nsteps = 1;
    for (long long k = 1; k <= nsteps; ++k) {
      bool last = (k == nsteps);
      double step_h = last ? cfg.t_end - static_cast<double>(k - 1) * h : h;
      double t_next = last ? cfg.t_end : static_cast<double>(k) * h;
      if (want_p) step_physical(sp, step_h, cfg.dealias);
      if (want_d) step_dispersive(*ud, step_h, cfg.dealias);
      bool finite_ok = (!want_p || sp.all_finite()) && (!want_d || ud->all_finite());
      if (!finite_ok) {
        TrajectoryRow row;
        row.t = t_next;
        row.energy = row.res_div_b = row.res_gauss = qnan;
        row.h_norm = row.vort_norm = row.vort_sobolev = row.z_norm = row.xform_gap = qnan;
        traj.rows.push_back(row);
        traj.breakdown = BreakdownInfo{t_next, "non-finite fields"};
        break;
      }
      if (k % cfg.output_stride == 0 || last) {
        if (!record(t_next)) break;
      }
    }
  }

  if (want_p) traj.final_physical = std::move(sp);
  if (want_d) traj.final_dispersive = std::move(*ud);
  return traj;
}

}  // namespace eml
