// Resonance geometry for the two dispersion branches.
//
// Wave labels live in {e, b, -e, -b, 0} with
//   lambda_e(r) = sqrt(1 + d r^2),  lambda_b(r) = sqrt(1 + r^2),
//   lambda_{-s} = -lambda_s,        lambda_0 = 0,
// and the phase of a (sigma, mu, nu) interaction is
//   Phi(xi, eta) = Lambda_sigma(xi) - Lambda_mu(xi - eta) - Lambda_nu(eta).
// For mu + nu != 0 the eta-stationary point is radial, eta = p_plus(|xi|) xi/|xi|,
// and Psi(|xi|) = Phi(xi, p(xi)) measures the time resonance at the space
// resonance. Psi_dagger multiplies the worst case over all admissible (mu, nu)
// by 2^D0 (1 + r); its zeros for sigma = b are the two resonant spheres
// gamma1 < gamma2, while for sigma = e it stays above a positive floor.
#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "eml/core.hpp"
#include "eml/dispersion.hpp"
#include "eml/random.hpp"

namespace eml {

struct PhaseTriple {
  Wave sigma, mu, nu;
  double d;

  PhaseTriple(Wave sigma_, Wave mu_, Wave nu_, double d_)
      : sigma(sigma_), mu(mu_), nu(nu_), d(d_) {
    if (!(d > 0.0 && d < 1.0)) throw RangeError("phase triple: d must lie in (0,1)");
  }
};

inline double phase(const PhaseTriple& t, const Vec3& xi, const Vec3& eta) {
  Vec3 diff{xi[0] - eta[0], xi[1] - eta[1], xi[2] - eta[2]};
  return lambda(t.sigma, t.d, norm(xi)) - lambda(t.mu, t.d, norm(diff)) -
         lambda(t.nu, t.d, norm(eta));
}

// Collinear reduction Phi(alpha e, beta e); lambda is even so signs of the
// scalar arguments take care of themselves.
inline double phase_radial(const PhaseTriple& t, double alpha, double beta) {
  return lambda(t.sigma, t.d, alpha) - lambda(t.mu, t.d, alpha - beta) -
         lambda(t.nu, t.d, beta);
}

// d/dbeta of the collinear phase: lambda_mu'(alpha - beta) - lambda_nu'(beta).
inline double phase_radial_dbeta(const PhaseTriple& t, double alpha, double beta) {
  return lambda_prime(t.mu, t.d, alpha - beta) - lambda_prime(t.nu, t.d, beta);
}

namespace detail {

inline void require_admissible_pair(Wave mu, Wave nu, const char* who) {
  if (mu == Wave::zero || nu == Wave::zero)
    throw RangeError(std::string(who) + ": the vorticity label has no stationary point");
  if (conjugate(mu) == nu)
    throw RangeError(std::string(who) + ": mu + nu = 0 admits no space resonance point");
}

}  // namespace detail

// The unique beta with lambda_mu'(s - beta) = lambda_nu'(beta): scan an
// expanding interval for the sign change, refuse if more than one shows up
// (the derivative of the phase is asserted to have a single zero), then
// bisect and polish with secant steps to |d/dbeta Phi| <= 1e-13.
inline double p_plus(Wave mu, Wave nu, double d, double s) {
  detail::require_admissible_pair(mu, nu, "p_plus");
  PhaseTriple t(Wave::e, mu, nu, d);  // sigma is irrelevant to the derivative
  auto g = [&](double y) { return phase_radial_dbeta(t, s, y); };

  double half = 2.0 + 2.0 * std::abs(s);
  double lo = 0.0, hi = 0.0;
  bool found = false;
  for (int expand = 0; expand < 24 && !found; ++expand, half *= 2.0) {
    const int cells = 256;
    double a = -half, b = half, ga = g(a);
    int changes = 0;
    for (int i = 1; i <= cells; ++i) {
      double x = a + (b - a) * double(i) / cells;
      double gx = g(x);
      if (ga == 0.0) {
        lo = hi = a + (b - a) * double(i - 1) / cells;
        ++changes;
      } else if (ga * gx < 0.0) {
        lo = a + (b - a) * double(i - 1) / cells;
        hi = x;
        ++changes;
      }
      ga = gx;
    }
    if (changes > 1)
      throw NumericError("p_plus: multiple stationary points for " +
                         std::string(wave_name(mu)) + "," + wave_name(nu) + " at s=" +
                         std::to_string(s));
    found = changes == 1;
  }
  if (!found)
    throw NumericError("p_plus: no sign change of the phase derivative for " +
                       std::string(wave_name(mu)) + "," + wave_name(nu) + " at s=" +
                       std::to_string(s));

  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(s)); ++it) {
    double mid = 0.5 * (lo + hi);
    double gm = g(mid);
    if (gm == 0.0) return mid;
    if (glo * gm < 0.0) {
      hi = mid;
      ghi = gm;
    } else {
      lo = mid;
      glo = gm;
    }
  }
  double y = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {  // secant polish inside the bracket
    double gy = g(y);
    if (gy == 0.0) break;
    double h = 1e-7 * (1.0 + std::abs(y));
    double slope = (g(y + h) - g(y - h)) / (2.0 * h);
    if (slope == 0.0) break;
    double ynext = y - gy / slope;
    if (ynext > lo && ynext < hi) y = ynext;
  }
  if (std::abs(g(y)) > 1e-13)
    throw NumericError("p_plus: stationarity residual " + std::to_string(std::abs(g(y))) +
                       " after polish at s=" + std::to_string(s));
  return y;
}

// Psi(r) = Phi(r, p_plus(r)) along the collinear direction.
inline double psi(const PhaseTriple& t, double r) {
  return phase_radial(t, r, p_plus(t.mu, t.nu, t.d, r));
}

// 2^D0 (1 + r) inf |Psi_{sigma mu nu}(r)| over the 12 pairs with mu + nu != 0.
inline double psi_dagger(Wave sigma, double d, int D0_exponent, double r) {
  if (sigma == Wave::zero) throw RangeError("psi_dagger: sigma must be a dispersive label");
  double best = std::numeric_limits<double>::infinity();
  for (Wave mu : kDispersiveWaves)
    for (Wave nu : kDispersiveWaves) {
      if (conjugate(mu) == nu) continue;
      PhaseTriple t(sigma, mu, nu, d);
      best = std::min(best, std::abs(psi(t, r)));
    }
  return std::ldexp(1.0, D0_exponent) * (1.0 + r) * best;
}

inline double psi_dagger(Wave sigma, double d, int D0_exponent, const Vec3& xi) {
  return psi_dagger(sigma, d, D0_exponent, norm(xi));
}

namespace detail {

// Bisection for a sign change of f on [lo, hi] (values flo, fhi supplied).
template <class F>
double bisect_root(F&& f, double lo, double hi, double flo, double fhi) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-17 * (1.0 + hi); ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

// Unique root of r -> psi(t, r) in (0, 10^3], located on a log grid.
template <class F>
double find_radial_zero(F&& f, const char* who) {
  double prev_r = 1e-3, prev_f = f(prev_r);
  const int steps = 2400;  // 200 points per decade over six decades
  for (int i = 1; i <= steps; ++i) {
    double r = 1e-3 * std::pow(10.0, 6.0 * double(i) / steps);
    double fr = f(r);
    if (prev_f == 0.0) return prev_r;
    if (prev_f * fr < 0.0) return bisect_root(f, prev_r, r, prev_f, fr);
    prev_r = r;
    prev_f = fr;
  }
  throw NumericError(std::string(who) + ": no zero crossing in (0, 1e3]");
}

}  // namespace detail

// gamma1 solves Psi_{bee} = 0, gamma2 solves Psi_{beb} = 0; gamma1 < gamma2.
inline std::pair<double, double> find_resonant_spheres(double d) {
  PhaseTriple bee(Wave::b, Wave::e, Wave::e, d);
  PhaseTriple beb(Wave::b, Wave::e, Wave::b, d);
  double g1 = detail::find_radial_zero([&](double r) { return psi(bee, r); },
                                       "find_resonant_spheres[bee]");
  double g2 = detail::find_radial_zero([&](double r) { return psi(beb, r); },
                                       "find_resonant_spheres[beb]");
  if (!(g1 < g2))
    throw NumericError("find_resonant_spheres: expected gamma1 < gamma2, got " +
                       std::to_string(g1) + " >= " + std::to_string(g2));
  return {g1, g2};
}

// Precomputed atlas: p_plus per admissible pair on a log-spaced radius grid,
// the resonant sphere radii, and direct evaluators for Psi and Psi_dagger.
struct ResonanceTable {
  double d = 0.5;
  int D0_exponent = 10;
  double gamma1 = 0.0, gamma2 = 0.0;
  std::vector<double> radii;  // log-spaced sample grid

  struct PairTab {
    Wave mu, nu;
    std::vector<double> p;  // p_plus at each radius
  };
  std::vector<PairTab> pairs;

  static ResonanceTable build(double d, int D0_exponent, int points_per_decade = 32,
                              double r_min = 1e-2, double r_max = 1e2) {
    if (!(d > 0.0 && d < 1.0)) throw RangeError("resonance table: d must lie in (0,1)");
    if (D0_exponent < 0) throw RangeError("resonance table: negative D0 exponent");
    if (!(r_min > 0.0 && r_max > r_min)) throw RangeError("resonance table: bad radius range");
    ResonanceTable t;
    t.d = d;
    t.D0_exponent = D0_exponent;
    auto spheres = find_resonant_spheres(d);
    t.gamma1 = spheres.first;
    t.gamma2 = spheres.second;
    double decades = std::log10(r_max / r_min);
    int count = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);
    t.radii.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
      t.radii[static_cast<std::size_t>(i)] =
          r_min * std::pow(10.0, decades * double(i) / double(count - 1));
    for (Wave mu : kDispersiveWaves)
      for (Wave nu : kDispersiveWaves) {
        if (conjugate(mu) == nu) continue;
        PairTab pt;
        pt.mu = mu;
        pt.nu = nu;
        pt.p.reserve(t.radii.size());
        for (double r : t.radii) pt.p.push_back(p_plus(mu, nu, d, r));
        t.pairs.push_back(std::move(pt));
      }
    return t;
  }

  double psi_at(Wave sigma, Wave mu, Wave nu, double r) const {
    return psi(PhaseTriple(sigma, mu, nu, d), r);
  }
  double psi_dagger_at(Wave sigma, double r) const {
    return psi_dagger(sigma, d, D0_exponent, r);
  }
};

// Seeded Monte-Carlo estimate of sup_xi of the eta-measure of
//   E = { (xi, eta) : max(|xi|,|eta|) <= 2^k, |xi - eta| <= R, |Phi| <= 2^-k eps },
// reported against the reference envelope 2^{5k} R^3 eps log(1/eps).
struct SublevelEstimate {
  double measure = 0.0;        // largest eta-measure over the xi sample
  double standard_error = 0.0; // Monte-Carlo error of that largest estimate
  double envelope = 0.0;       // 2^{5k} R^3 eps log(1/eps)
  double ratio = 0.0;          // measure / envelope
  std::size_t xi_samples = 0, eta_samples = 0;
};

inline SublevelEstimate sublevel_measure_estimate(const PhaseTriple& t, int k, double R,
                                                  double eps, std::size_t sample_count,
                                                  std::uint64_t seed) {
  if (t.mu == Wave::zero || t.nu == Wave::zero)
    throw RangeError("sublevel estimate: mu, nu must be dispersive labels");
  if (k < 0) throw RangeError("sublevel estimate: k must be nonnegative");
  if (!(R >= 1.0)) throw RangeError("sublevel estimate: R must be at least 1");
  if (!(eps > 0.0 && eps <= 0.5)) throw RangeError("sublevel estimate: eps must lie in (0, 1/2]");
  if (sample_count < 1000) throw NumericError("sublevel estimate: sample count too small");

  Rng rng(seed);
  auto ball_point = [&](double radius, const Vec3& center) {
    // Rejection sampling in the cube keeps the draw sequence seed-stable.
    for (;;) {
      Vec3 u{2.0 * rng.unit_half_open() - 1.0, 2.0 * rng.unit_half_open() - 1.0,
             2.0 * rng.unit_half_open() - 1.0};
      if (dot(u, u) <= 1.0)
        return Vec3{center[0] + radius * u[0], center[1] + radius * u[1],
                    center[2] + radius * u[2]};
    }
  };

  double cap = std::ldexp(1.0, k);      // 2^k
  double level = std::ldexp(eps, -k);   // 2^-k eps
  std::size_t xi_count = 128;
  std::size_t eta_count = std::max<std::size_t>(sample_count / xi_count, 500);
  double eta_vol = 4.0 / 3.0 * kPi * R * R * R;

  SublevelEstimate out;
  out.xi_samples = xi_count;
  out.eta_samples = eta_count;
  for (std::size_t s = 0; s < xi_count; ++s) {
    Vec3 xi = ball_point(cap, {0.0, 0.0, 0.0});
    std::size_t hits = 0;
    for (std::size_t q = 0; q < eta_count; ++q) {
      Vec3 eta = ball_point(R, xi);  // |xi - eta| <= R by construction
      if (norm(eta) > cap) continue;
      if (std::abs(phase(t, xi, eta)) <= level) ++hits;
    }
    double p = double(hits) / double(eta_count);
    double measure = eta_vol * p;
    if (measure > out.measure) {
      out.measure = measure;
      out.standard_error = eta_vol * std::sqrt(std::max(p * (1.0 - p), 0.0) / double(eta_count));
    }
  }
  out.envelope = std::ldexp(1.0, 5 * k) * R * R * R * eps * std::log(1.0 / eps);
  out.ratio = out.measure / out.envelope;
  return out;
}

}  // namespace eml
