#include <catch2/catch_amalgamated.hpp>

#include "eml/decay.hpp"
#include "eml/znorm.hpp"
#include "oracles.hpp"

using namespace eml;

namespace {

constexpr double kD = 0.5;

const Grid& norm_grid() {
  static Grid g(32, 32.0);
  return g;
}

// Context builds run the stationary-point searches for every shell, so share
// one per depth normalization across the suite.
const ZNormContext& base_ctx() {
  static ZNormContext ctx = ZNormContext::build(norm_grid(), kD);
  return ctx;
}

const ZNormContext& shallow_ctx() {
  static ZNormContext ctx = [] {
    NormConfig cfg;
    cfg.d0_exponent = 0;
    return ZNormContext::build(norm_grid(), kD, cfg);
  }();
  return ctx;
}

ComplexField complex_band(const Grid& g, std::uint64_t seed, double lo, double hi) {
  RealField re = oracle::random_band_field(g, seed, lo, hi);
  RealField im = oracle::random_band_field(g, seed + 1000, lo, hi);
  ComplexField f(g);
  for (std::size_t i = 0; i < f.a.size(); ++i) f.a[i] = Complex(re.a[i], im.a[i]);
  return f;
}

ComplexField localized_field(const Grid& g, std::uint64_t seed) {
  RealField env = oracle::gaussian_envelope(g, 2.5);
  ComplexField f = complex_band(g, seed, 0.4, 2.0);
  for (std::size_t i = 0; i < f.a.size(); ++i) f.a[i] *= env.a[i];
  return f;
}

ComplexField scaled_complex(ComplexField f, double c) {
  for (auto& v : f.a) v *= c;
  return f;
}

}  // namespace

TEST_CASE("norm config: defaults valid, violations rejected", "[norms]") {
  NormConfig good;
  CHECK_NOTHROW(good.validate());

  auto expect_bad = [](NormConfig c) { CHECK_THROWS_AS(c.validate(), ConfigError); };
  NormConfig c;
  c.n1_eff = 5;  // above n0_eff
  expect_bad(c);
  c = {};
  c.beta_eff = 0.0;
  expect_bad(c);
  c = {};
  c.beta_eff = 0.2;
  expect_bad(c);
  c = {};
  c.alpha_max = -1;
  expect_bad(c);
  c = {};
  c.d0_exponent = -3;
  expect_bad(c);
  c = {};
  c.k_lo = 2;
  c.k_hi = 1;
  expect_bad(c);

  // Composite enumeration: order-2 family with one extra derivative.
  CHECK(z_composites(2, 1).size() == 74);
  auto ident = z_composites(0, 0);
  REQUIRE(ident.size() == 1);
  CHECK(ident[0].gamma == std::array<int, 3>{0, 0, 0});
  CHECK(ident[0].beta == std::array<int, 3>{0, 0, 0});
  CHECK_THROWS_AS(z_composites(-1, 0), RangeError);
}

TEST_CASE("context tables match the direct resonance depth", "[norms]") {
  const Grid& g = norm_grid();
  const ZNormContext& ctx = base_ctx();
  const auto& radii = g.shell_radii();
  REQUIRE(ctx.dagger_e.size() == radii.size());
  REQUIRE(ctx.dagger_b.size() == radii.size());
  for (std::size_t s = 0; s < radii.size(); s += 97) {
    CHECK(ctx.dagger_e[s] == psi_dagger(Wave::e, kD, 10, radii[s]));
    CHECK(ctx.dagger_b[s] == psi_dagger(Wave::b, kD, 10, radii[s]));
  }
  Grid other(16, 16.0);
  CHECK_THROWS_AS(ctx.check_grid(other), ConfigError);
  CHECK_THROWS_AS(ZNormContext::build(g, 1.2), RangeError);
  CHECK_THROWS_AS(ctx.dagger(Wave::zero), RangeError);
}

TEST_CASE("partition identities: shells, windows, depth layers", "[norms]") {
  const Grid& g = norm_grid();

  // The folded spectral shells sum to the identity.
  ComplexField f = complex_band(g, 21u, 0.2, 0.9 * g.nyquist());
  SpectralField spec = transform(f);
  KRange kr = resolvable_k_range(g);
  SpectralField sum(g);
  for (int k = kr.lo; k <= kr.hi; ++k) {
    SpectralField pk = lp_project(spec, k);
    for (std::size_t p = 0; p < sum.a.size(); ++p) sum.a[p] += pk.a[p];
  }
  CHECK(max_abs_diff(sum, spec) < 1e-12);

  // The physical windows at fixed k sum back to the shell.
  for (int k : {0, 2}) {
    ComplexField pk = inverse_transform(lp_project(spec, k));
    JRange jr = j_range(g, k);
    ComplexField acc(g);
    for (int j = jr.lo; j <= jr.top; ++j) {
      ComplexField piece = q_jk(f, j, k);
      for (std::size_t p = 0; p < acc.a.size(); ++p) acc.a[p] += piece.a[p];
    }
    CHECK(max_abs_diff(acc, pk) < 1e-12);
  }

  // The aggregate depth layers sum to the identity, as weights and as
  // operators driven by the true resonance depth.
  DyadicCutoff cut;
  for (double y : {1e-9, 1e-3, 0.2, 1.0, 1.6, 7.0, 1e4}) {
    for (int j : {0, 2, 5}) {
      double total = 0.0;
      for (int n = 0; n <= j + 1; ++n) total += a_n_aggregate_weight(cut, y, n, j);
      CHECK(total == Catch::Approx(1.0).margin(1e-15));
    }
  }
  RadialFn depth = [](double r) { return psi_dagger(Wave::b, kD, 10, r); };
  SpectralField aop_sum(g);
  int j = 2;
  for (int n = 0; n <= j + 1; ++n) {
    SpectralField an = a_n_aggregate(spec, n, j, depth);
    for (std::size_t p = 0; p < aop_sum.a.size(); ++p) aop_sum.a[p] += an.a[p];
  }
  CHECK(max_abs_diff(aop_sum, spec) < 1e-12);
}

TEST_CASE("b_j: shellwise sums agree with the operator route, e collapses", "[norms]") {
  const Grid& g = norm_grid();
  const ZNormContext& ctx = base_ctx();
  ComplexField f = localized_field(g, 33u);
  SpectralField spec = transform(f);

  // The per-shell Parseval route equals applying the operator and norming.
  for (int j : {1, 3}) {
    for (int n = 0; n <= j + 1; ++n) {
      double direct = std::sqrt(detail::a_aggregate_l2_sq(&spec, 1, n, j, ctx.dagger_b));
      RadialFn depth = [](double r) { return psi_dagger(Wave::b, kD, 10, r); };
      double op_route = a_n_aggregate(spec, n, j, depth).l2();
      CHECK(direct == Catch::Approx(op_route).margin(1e-12 * (1.0 + op_route)));
    }
  }

  // On the e branch the depth stays above the outermost cutoff support, so
  // only the n = 0 layer survives and B_j collapses to a multiple of the L2
  // norm. At j = 0 the multiple is 1 for every beta_eff.
  double l2 = spec.l2();
  for (int j : {0, 1, 3}) {
    BjResult r = b_j_norm(f, j, Wave::e, ctx);
    double expect = std::exp2((1.0 + ctx.cfg.beta_eff) * j) * l2;
    CHECK(r.value == Catch::Approx(expect).epsilon(1e-12));
    CHECK(r.n == 0);
  }
  ZNormContext other = ctx;
  other.cfg.beta_eff = 0.05;
  CHECK(b_j_norm(f, 0, Wave::e, other).value ==
        Catch::Approx(b_j_norm(f, 0, Wave::e, ctx).value).epsilon(1e-14));

  CHECK_THROWS_AS(b_j_norm(f, -1, Wave::e, ctx), RangeError);
}

TEST_CASE("z1 on the e branch equals the collapsed two-index formula", "[norms]") {
  const Grid& g = norm_grid();
  const ZNormContext& ctx = base_ctx();
  ComplexField f = localized_field(g, 41u);

  double beta = ctx.cfg.beta_eff;
  KRange kr = resolvable_k_range(g);
  double sup = 0.0;
  int arg_k = kr.lo, arg_j = 0;
  for (int k = kr.lo; k <= kr.hi; ++k) {
    JRange jr = j_range(g, k);
    for (int j = jr.lo; j <= jr.top; ++j) {
      double v = std::exp2((1.0 + beta) * j) * q_jk(f, j, k).l2();
      if (v > sup) {
        sup = v;
        arg_k = k;
        arg_j = j;
      }
    }
  }
  Z1Result r = z1_norm(f, Wave::e, ctx);
  CHECK(r.value == Catch::Approx(sup).epsilon(1e-10));
  CHECK(r.witness.k == arg_k);
  CHECK(r.witness.j == arg_j);
  CHECK(r.witness.n == 0);
}

TEST_CASE("annulus on the resonant sphere drives the depth index up", "[norms]") {
  const Grid& g = norm_grid();
  auto [g1, g2] = find_resonant_spheres(kD);
  (void)g2;
  ComplexField f = complex_band(g, 55u, g1 - 0.05, g1 + 0.05);

  // With the depth normalization removed the annulus sits at tiny psi_dagger,
  // so the deep aggregate layer absorbs it.
  const ZNormContext& shallow = shallow_ctx();
  int j = 3;
  BjResult r = b_j_norm(f, j, Wave::b, shallow);
  INFO("witness depth index n = " << r.n << " of " << j + 1);
  CHECK(r.n >= 3);
  CHECK(r.value > 0.0);

  // The depth discount makes the value strictly decreasing in beta_eff when
  // the mass sits at n >= 1.
  ZNormContext faster = shallow;
  faster.cfg.beta_eff = 0.05;
  CHECK(b_j_norm(f, j, Wave::b, faster).value < r.value);

  // Under the standard normalization the closest lattice shell still sits a
  // few 1e-3 away from the sphere in radius, which leaves the scaled depth
  // above the outermost cutoff support. Both branches therefore stay at
  // n = 0 on this grid; only the depth tables, not the windows, can tell
  // the resonant sphere apart at this resolution.
  const auto& radii = g.shell_radii();
  const auto& dag_b = base_ctx().dagger_b;
  double band_min = 1e300;
  for (std::size_t s = 0; s < radii.size(); ++s)
    if (radii[s] > g1 - 0.05 && radii[s] < g1 + 0.05) band_min = std::min(band_min, dag_b[s]);
  INFO("smallest normalized depth on the annulus shells: " << band_min);
  CHECK(band_min > 1.6);
  CHECK(b_j_norm(f, j, Wave::b, base_ctx()).n == 0);
  CHECK(b_j_norm(f, j, Wave::e, base_ctx()).n == 0);
}

TEST_CASE("z norm: zero, homogeneity, witness budget", "[norms]") {
  const Grid& g = norm_grid();
  ZNormContext ctx = base_ctx();
  ctx.cfg.n1_eff = 1;  // keep the composite family small for the test

  ComplexField ze(g);
  ComplexVectorField zb = make_complex_vector_field(g);
  ZResult zero = z_norm(ze, zb, ctx);
  CHECK(zero.value == 0.0);

  ComplexField fe = localized_field(g, 61u);
  ComplexVectorField fb = {localized_field(g, 62u), localized_field(g, 63u),
                           localized_field(g, 64u)};
  ZResult base = z_norm(fe, fb, ctx);
  CHECK(base.value > 0.0);

  // The identity composite is part of the sup.
  double ident = z1_norm(fe, Wave::e, ctx).value + z1_norm(fb, Wave::b, ctx).value;
  CHECK(base.value >= ident * (1.0 - 1e-12));

  // Witness respects the budget |gamma| <= n1 - |beta| + alpha_max.
  int gsum = base.op.gamma[0] + base.op.gamma[1] + base.op.gamma[2];
  int bsum = base.op.beta[0] + base.op.beta[1] + base.op.beta[2];
  CHECK(bsum <= ctx.cfg.n1_eff);
  CHECK(gsum <= ctx.cfg.n1_eff - bsum + ctx.cfg.alpha_max);
  CHECK(base.e_part.value + base.b_part.value == Catch::Approx(base.value).epsilon(1e-14));

  ZResult scaled = z_norm(scaled_complex(fe, 3.5),
                          {scaled_complex(fb[0], 3.5), scaled_complex(fb[1], 3.5),
                           scaled_complex(fb[2], 3.5)},
                          ctx);
  CHECK(scaled.value == Catch::Approx(3.5 * base.value).epsilon(1e-12));
}

TEST_CASE("symbol stability: Riesz images keep a bounded z1 ratio", "[norms]") {
  const Grid& g = norm_grid();
  const ZNormContext& ctx = base_ctx();
  double worst = 0.0;
  for (std::uint64_t seed : {71u, 72u, 73u}) {
    ComplexField f = localized_field(g, seed);
    SpectralField spec = transform(f);
    ComplexField rf = inverse_transform(apply_symbol(spec, mult_riesz(0)));
    double num = z1_norm(rf, Wave::b, ctx).value;
    double den = z1_norm(f, Wave::b, ctx).value;
    REQUIRE(den > 0.0);
    worst = std::max(worst, num / den);
  }
  INFO("largest measured z1 ratio under a Riesz symbol: " << worst);
  CHECK(worst > 1e-3);
  CHECK(worst < 1e3);
}

TEST_CASE("decay probe: flat start, dispersive slopes, refusals", "[norms]") {
  // Smooth compact bump for the b branch, and its image under the exact
  // branch symmetry lambda_e(r) = lambda_b(sqrt(d) r): evolving
  // fhat_e(r) = fhat_b(sqrt(d) r) on the e branch reproduces the b-branch
  // wave up to the spatial dilation x -> x/sqrt(d), so the two runs must
  // decay identically and their amplitudes must differ by exactly d^-3/2.
  double r_lo = 0.34, r_hi = 1.68;
  RadialFn fhat = [r_lo, r_hi](double r) {
    double u = (r - 0.5 * (r_lo + r_hi)) / (0.5 * (r_hi - r_lo));
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
  };
  double sd = std::sqrt(kD);
  RadialFn fhat_e = [fhat, sd](double r) { return fhat(sd * r); };

  // t = 0 recovers the peak at the origin, against an independent quadrature.
  DecayProbeResult flat = linear_decay_probe(fhat, r_lo, r_hi, Wave::b, kD, {0.0}, 16);
  double direct = 0.0;
  {
    int n = 200001;
    double h = (r_hi - r_lo) / (n - 1);
    KahanSum s;
    for (int i = 0; i < n; ++i) {
      double r = r_lo + i * h;
      double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      s.add(w * r * r * fhat(r));
    }
    direct = s.value() * h * 4.0 * kPi / (8.0 * kPi * kPi * kPi);
  }
  CHECK(flat.sup_amplitude[0] == Catch::Approx(direct).epsilon(1e-6));
  CHECK(flat.arg_radius[0] == 0.0);

  std::vector<double> times;
  for (int i = 0; i < 9; ++i) times.push_back(10.0 * std::pow(10.0, double(i) / 8.0));
  DecayProbeResult b = linear_decay_probe(fhat, r_lo, r_hi, Wave::b, kD, times, 256);
  DecayProbeResult e = linear_decay_probe(fhat_e, r_lo / sd, r_hi / sd, Wave::e, kD, times, 256);
  INFO("slope b = " << b.slope << ", slope e = " << e.slope
                    << ", quad gaps " << b.quad_error << " / " << e.quad_error);
  CHECK(b.slope == Catch::Approx(-1.5).margin(0.1));
  CHECK(e.slope == Catch::Approx(-1.5).margin(0.1));
  CHECK(e.slope == Catch::Approx(b.slope).margin(2e-3));
  for (std::size_t i = 0; i < times.size(); i += 4)
    CHECK(e.sup_amplitude[i] / b.sup_amplitude[i] ==
          Catch::Approx(std::pow(kD, -1.5)).epsilon(1e-8));
  CHECK(b.quad_error < 1e-6);

  // Independent check of the fitted slope.
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < times.size(); ++i) {
    lx.push_back(std::log(times[i]));
    ly.push_back(std::log(b.sup_amplitude[i]));
  }
  CHECK(b.slope == Catch::Approx(oracle::ols_slope(lx, ly)).margin(1e-12));

  CHECK_THROWS_AS(linear_decay_probe(fhat, 0.5, 2.0, Wave::zero, kD, {1.0}), RangeError);
  CHECK_THROWS_AS(linear_decay_probe(fhat, 0.5, 2.0, Wave::b, 1.5, {1.0}), RangeError);
  CHECK_THROWS_AS(linear_decay_probe(fhat, 2.0, 0.5, Wave::b, kD, {1.0}), RangeError);
  CHECK_THROWS_AS(linear_decay_probe(fhat, 0.5, 2.0, Wave::b, kD, {}), RangeError);
  CHECK_THROWS_AS(linear_decay_probe(fhat, 0.5, 2.0, Wave::b, kD, {-1.0}), RangeError);
  CHECK_THROWS_AS(linear_decay_probe(fhat, 0.5, 2.0, Wave::b, kD, {50.0}, 8, 1e-15),
                  NumericError);
}
