// Free linear evolution of a radial frequency profile, evaluated off the
// grid. The half-wave group e^{-it Lambda_sigma} applied to a radial profile
// reduces to a 1D oscillatory integral,
//
//   u(t, x) = (2 pi)^-3 (4 pi / |x|) int r sin(r|x|) e^{-it lambda(r)} fhat(r) dr,
//
// so amplitudes can be measured at any time and any radius with no periodic
// wrap-around. Quadrature is composite Simpson with the node count tied to
// the phase's cycle count across the support; every value is recomputed at
// twice the node count and the worst relative gap is reported (and must meet
// the tolerance, else NumericError).
#pragma once

#include <algorithm>

#include "eml/resonance.hpp"

namespace eml {

struct DecayProbeResult {
  std::vector<double> times;
  std::vector<double> sup_amplitude;  // sup over sampled radii of |u(t, .)|
  std::vector<double> arg_radius;     // radius attaining each sup
  double slope = 0.0;                 // least-squares slope of log sup vs log t (t > 0)
  double quad_error = 0.0;            // worst node-doubling gap, relative to each sup
};

namespace detail {

inline Complex radial_wave_amplitude(const RadialFn& fhat, double r_lo, double r_hi, Wave sigma,
                                     double d, double t, double x, int nodes) {
  if (nodes % 2 != 0) ++nodes;
  double h = (r_hi - r_lo) / nodes;
  auto integrand = [&](double r) {
    double phase = -t * lambda(sigma, d, r);
    Complex osc(std::cos(phase), std::sin(phase));
    double kernel = x == 0.0 ? r * r : r * std::sin(r * x);
    return kernel * fhat(r) * osc;
  };
  Complex sum = integrand(r_lo) + integrand(r_hi);
  for (int i = 1; i < nodes; ++i) {
    double w = (i % 2 == 1) ? 4.0 : 2.0;
    sum += w * integrand(r_lo + i * h);
  }
  sum *= h / 3.0;
  double front = 4.0 * kPi / (8.0 * kPi * kPi * kPi);
  return sum * (x == 0.0 ? front : front / x);
}

}  // namespace detail

inline DecayProbeResult linear_decay_probe(const RadialFn& fhat, double r_lo, double r_hi,
                                           Wave sigma, double d, const std::vector<double>& times,
                                           int radius_samples = 64, double quad_tol = 1e-8) {
  if (sigma != Wave::e && sigma != Wave::b)
    throw RangeError("linear_decay_probe: branch must be e or b");
  if (!(d > 0.0 && d < 1.0)) throw RangeError("linear_decay_probe: d must lie in (0,1)");
  if (!(r_hi > r_lo) || r_lo < 0.0) throw RangeError("linear_decay_probe: bad support interval");
  if (times.empty()) throw RangeError("linear_decay_probe: no times");
  if (radius_samples < 2) throw RangeError("linear_decay_probe: need at least two radii");

  DecayProbeResult out;
  out.times = times;
  double v_lo = lambda_prime(sigma, d, r_lo);
  double v_hi = lambda_prime(sigma, d, r_hi);
  for (double t : times) {
    if (t < 0.0) throw RangeError("linear_decay_probe: negative time");
    // Sample radii across the group-velocity cone, plus the origin.
    double x_lo = 0.7 * v_lo * t;
    double x_hi = std::max(1.0, 1.3 * v_hi * t);
    double sup = 0.0, sup2 = 0.0, arg = 0.0;
    for (int i = -1; i < radius_samples; ++i) {
      double x = i < 0 ? 0.0 : x_lo + (x_hi - x_lo) * double(i) / (radius_samples - 1);
      double cycles = (r_hi - r_lo) * (x + t) / (2.0 * kPi);
      int nodes = std::max(800, 32 * static_cast<int>(std::ceil(cycles)));
      double a = std::abs(detail::radial_wave_amplitude(fhat, r_lo, r_hi, sigma, d, t, x, nodes));
      double a2 =
          std::abs(detail::radial_wave_amplitude(fhat, r_lo, r_hi, sigma, d, t, x, 2 * nodes));
      if (a2 > sup2) {
        sup = a;
        sup2 = a2;
        arg = x;
      }
    }
    if (sup2 <= 0.0)
      throw NumericError("linear_decay_probe: amplitude vanished across the sample window");
    out.quad_error = std::max(out.quad_error, std::abs(sup - sup2) / sup2);
    out.sup_amplitude.push_back(sup2);
    out.arg_radius.push_back(arg);
  }
  if (out.quad_error > quad_tol)
    throw NumericError("linear_decay_probe: quadrature gap " + std::to_string(out.quad_error) +
                       " above tolerance " + std::to_string(quad_tol));

  // Log-log fit over the strictly positive times.
  KahanSum sx, sy, sxx, sxy;
  int m = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) continue;
    double lx = std::log(times[i]), ly = std::log(out.sup_amplitude[i]);
    sx.add(lx);
    sy.add(ly);
    sxx.add(lx * lx);
    sxy.add(lx * ly);
    ++m;
  }
  if (m >= 2) {
    double det = m * sxx.value() - sx.value() * sx.value();
    if (det != 0.0) out.slope = (m * sxy.value() - sx.value() * sy.value()) / det;
  }
  return out;
}

}  // namespace eml
