#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kinld/closed_form.hpp"
#include "kinld/grid.hpp"

namespace kinld::front {

/// Conjectured spreading prefactor: X(t) ~ prefactor * t^{1 + 1/gamma},
/// prefactor = ((gamma/(1+gamma)) r)^{1 + 1/gamma} / (1 + r).
[[nodiscard]] inline double rate_conjecture(const RateParams& p) {
  if (!(p.r > 0.0)) throw std::invalid_argument("rate_conjecture requires r > 0");
  if (p.gamma < 1.0) throw std::invalid_argument("rate_conjecture requires gamma >= 1");
  const double g = p.gamma;
  return std::pow(g / (1.0 + g) * p.r, 1.0 + 1.0 / g) / (1.0 + p.r);
}

struct ExpansionBounds {
  double lower = 0.0;  // (r/(r+2))^{3/2}
  double upper = 0.0;  // sqrt(2 r)
};

/// Previously known sandwich for the gamma = 2 spreading constant.
[[nodiscard]] inline ExpansionBounds bounds_check(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("bounds_check requires r > 0");
  return {std::pow(r / (r + 2.0), 1.5), std::sqrt(2.0 * r)};
}

struct FrontLocation {
  double x = 0.0;
  bool exists = false;
  BranchTag branch = BranchTag::PowerLaw;  // branch of mu_gamma at the located front
};

/**
 * Zero level set edge: sup{ x >= 0 : mu_gamma(t, x; w) <= 0 }, by bracketing
 * and bisection to 1e-10 relative. The nonpositivity region is an interval
 * [0, X(t)] (the edge branch is strictly positive and the other two are
 * increasing in x), so bisection is valid. The initial ceiling is the known
 * upper bound sqrt(2r) t^{3/2}, doubled as needed for gamma < 2.
 */
[[nodiscard]] inline FrontLocation front_location(double t, const RateParams& p, double w) {
  if (!(p.r > 0.0)) throw std::invalid_argument("front_location requires r > 0");
  if (!(t > 0.0)) throw std::invalid_argument("front_location requires t > 0");
  const auto value = [&](double x) { return mu_gamma(t, x, w, p); };

  FrontLocation out;
  if (!(value(0.0).value <= ExtendedValue::finite(0.0))) return out;  // no front
  out.exists = true;

  double hi = std::sqrt(2.0 * p.r) * t * std::sqrt(t) * 1.25 + 1.0;
  while (value(hi).value <= ExtendedValue::finite(0.0)) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (value(mid).value <= ExtendedValue::finite(0.0))
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-10 * std::max(1.0, hi)) break;
  }
  out.x = lo;
  out.branch = value(lo).branch;
  return out;
}

/// First time at which the ballistic branch has left the argmin at the front
/// location; beyond it the front follows the power-law rate exactly.
[[nodiscard]] inline double detect_onset(const RateParams& p, double w,
                                         const std::vector<double>& times) {
  for (double t : times) {
    const FrontLocation loc = front_location(t, p, w);
    if (loc.exists && loc.branch != BranchTag::Ballistic) return t;
  }
  return times.empty() ? 0.0 : times.back();
}

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double max_residual = 0.0;  // in log X
};

/// Least squares of log X against log t.
[[nodiscard]] inline PowerLawFit fit_exponent(const std::vector<double>& times,
                                              const std::vector<double>& locations) {
  if (times.size() != locations.size()) throw std::invalid_argument("fit: size mismatch");
  if (times.size() < 5) throw std::invalid_argument("fit needs at least 5 samples");
  const std::size_t n = times.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(times[i] > 0.0) || !(locations[i] > 0.0))
      throw std::invalid_argument("degenerate fit: all samples must be strictly positive");
    const double lx = std::log(times[i]);
    const double ly = std::log(locations[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  const double slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / dn;
  PowerLawFit out;
  out.exponent = slope;
  out.prefactor = std::exp(intercept);
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = intercept + slope * std::log(times[i]);
    out.max_residual = std::max(out.max_residual, std::abs(std::log(locations[i]) - pred));
  }
  return out;
}

struct FrontTrace {
  std::vector<double> times;
  std::vector<double> locations;
  PowerLawFit fit;
  double onset = 0.0;
};

[[nodiscard]] inline FrontTrace trace_front(const std::vector<double>& times,
                                            const RateParams& p, double w) {
  FrontTrace out;
  out.times = times;
  out.locations.reserve(times.size());
  for (double t : times) {
    const FrontLocation loc = front_location(t, p, w);
    if (!loc.exists) throw std::domain_error("no front at t = " + std::to_string(t));
    out.locations.push_back(loc.x);
  }
  out.fit = fit_exponent(out.times, out.locations);
  out.onset = detect_onset(p, w, times);
  return out;
}

struct FreidlinProfile {
  std::vector<double> tau;
  std::vector<double> value;        // mu_r(tau, x(tau); w) along the extremal path
  double switch_time = 0.0;         // end of the linear leg
  bool unimodal = false;            // nondecreasing then nonincreasing, tol 1e-9
  bool concave_linear_leg = false;  // second differences <= tol on the linear leg
};

/**
 * Extremal trajectory diagnostic in the cone Z+ = { x >= 0, v >= 0, t v <= x }:
 * the run-then-rest path with switch time s = min(t, (1+r)^{-1/3} |x|^{2/3}),
 * sampled at n_samples points, carrying mu_r(tau, x(tau); w). Used as
 * evidence for the truncation procedure: profiles must rise then fall, and
 * be concave on the moving leg.
 */
[[nodiscard]] inline FreidlinProfile freidlin_profile(double t, double x, double v, double w,
                                                      const RateParams& p, int n_samples = 256) {
  if (!(t > 0.0)) throw std::invalid_argument("freidlin_profile requires t > 0");
  if (n_samples < 8) throw std::invalid_argument("freidlin_profile needs n_samples >= 8");
  const bool in_zone = x >= 0.0 && v >= 0.0 && t * v <= x * (1.0 + 1e-12) + 1e-300;
  if (!in_zone) throw std::domain_error("freidlin_profile: (t, x, v) not in the forward cone");

  FreidlinProfile out;
  out.switch_time = std::min(t, std::cbrt(x * x / (1.0 + p.r)));
  const double s = out.switch_time;
  out.tau.reserve(static_cast<std::size_t>(n_samples));
  out.value.reserve(static_cast<std::size_t>(n_samples));
  for (int k = 1; k <= n_samples; ++k) {
    const double tau = t * k / n_samples;
    const double pos = (s > 0.0 && tau < s) ? x * (tau / s) : x;
    const ExtendedValue m = mu_reaction(tau, pos, w, p).value;
    if (!m.is_finite()) throw std::domain_error("freidlin_profile: infinite cost on path");
    out.tau.push_back(tau);
    out.value.push_back(m.value());
  }

  constexpr double tol = 1e-9;
  bool falling = false;
  out.unimodal = true;
  for (std::size_t k = 0; k + 1 < out.value.size(); ++k) {
    const double d = out.value[k + 1] - out.value[k];
    if (d < -tol) falling = true;
    if (d > tol && falling) out.unimodal = false;
  }
  out.concave_linear_leg = true;
  for (std::size_t k = 0; k + 2 < out.value.size(); ++k) {
    if (out.tau[k + 2] >= s) break;  // only the moving leg
    const double d2 = out.value[k + 2] - 2.0 * out.value[k + 1] + out.value[k];
    if (d2 > tol) out.concave_linear_leg = false;
  }
  return out;
}

/// Values of mu_r on a (t, x) rectangle; row-major in t.
struct TimeSpaceField {
  std::vector<double> times;
  SpatialGrid xgrid;
  std::vector<ExtendedValue> values;

  TimeSpaceField() = default;
  TimeSpaceField(std::vector<double> ts, SpatialGrid xg)
      : times(std::move(ts)),
        xgrid(xg),
        values(times.size() * static_cast<std::size_t>(xg.size()), ExtendedValue::infinity()) {}

  [[nodiscard]] std::size_t index(std::size_t it, int ix) const noexcept {
    return it * static_cast<std::size_t>(xgrid.size()) + static_cast<std::size_t>(ix);
  }
};

/// Minimal-value part of the truncation procedure: clamp mu_r below at zero.
[[nodiscard]] inline TimeSpaceField truncate_min(const TimeSpaceField& in) {
  TimeSpaceField out = in;
  for (ExtendedValue& e : out.values)
    if (e.is_finite() && e.value() < 0.0) e = ExtendedValue::finite(0.0);
  return out;
}

}  // namespace kinld::front
