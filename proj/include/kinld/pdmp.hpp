#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kinld/parallel.hpp"
#include "kinld/rng.hpp"

namespace kinld::pdmp {

/**
 * Velocity-jump process in macroscopic units: ballistic flight interrupted
 * by a Poisson clock of rate 1/eps; at each ring the velocity is redrawn
 * from N(0, eps). The seed fully determines the ensemble.
 */
struct SimConfig {
  double epsilon = 0.1;
  double t_final = 1.0;
  long n_particles = 1;
  std::optional<double> w0;  // nullopt: draw the initial velocity from equilibrium
  std::uint64_t seed = 0;
};

struct PathResult {
  double x = 0.0;
  double v = 0.0;
  long jumps = 0;
};

struct SampleSet {
  std::vector<double> x, v;
  std::vector<long> jumps;
};

[[nodiscard]] inline PathResult simulate_path(const SimConfig& cfg, long particle) {
  if (!(cfg.epsilon > 0.0) || !(cfg.t_final > 0.0))
    throw std::invalid_argument("simulate_path requires epsilon > 0 and t_final > 0");
  Rng rng(cfg.seed, static_cast<std::uint64_t>(particle));
  const double sd = std::sqrt(cfg.epsilon);
  PathResult out;
  out.v = cfg.w0 ? *cfg.w0 : sd * rng.normal();
  double remaining = cfg.t_final;
  for (;;) {
    const double wait = rng.exponential(cfg.epsilon);
    if (wait >= remaining) {
      out.x += out.v * remaining;
      return out;
    }
    out.x += out.v * wait;
    remaining -= wait;
    out.v = sd * rng.normal();
    ++out.jumps;
  }
}

[[nodiscard]] inline SampleSet simulate_ensemble(const SimConfig& cfg, int threads = 1) {
  if (cfg.n_particles < 1) throw std::invalid_argument("need at least one particle");
  SampleSet s;
  const std::size_t n = static_cast<std::size_t>(cfg.n_particles);
  s.x.resize(n);
  s.v.resize(n);
  s.jumps.resize(n);
  parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const PathResult p = simulate_path(cfg, static_cast<long>(i));
      s.x[i] = p.x;
      s.v[i] = p.v;
      s.jumps[i] = p.jumps;
    }
  });
  return s;
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

[[nodiscard]] inline Moments moments(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("moments need at least two samples");
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(n);
  double s2 = 0.0;
  for (double x : xs) s2 += (x - m) * (x - m);
  return {m, s2 / static_cast<double>(n - 1)};
}

/**
 * Variance of the displacement started from the equilibrium velocity:
 * the stationary velocity autocovariance is eps * exp(-|s-u|/eps), and the
 * double time integral gives
 *   Var x(t) = 2 eps^2 t - 2 eps^3 (1 - e^{-t/eps}).
 */
[[nodiscard]] inline double stationary_displacement_variance(double epsilon, double t) {
  return 2.0 * epsilon * epsilon * t -
         2.0 * epsilon * epsilon * epsilon * (1.0 - std::exp(-t / epsilon));
}

struct RateBin {
  double x_center = 0.0;
  double rate = 0.0;  // -eps log(histogram density)
  long count = 0;
};

struct RateTable {
  std::vector<RateBin> bins;
  long suppressed_bins = 0;  // bins with fewer than 10 samples, not reported
};

/// Histogram estimate of the large-deviations rate: bins of the given width,
/// density = count / (n * width), rate = -eps log density. Thin bins are
/// suppressed, not zero-filled.
[[nodiscard]] inline RateTable empirical_rate(const SampleSet& samples, double epsilon,
                                              double bin_width) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  if (samples.x.empty()) throw std::invalid_argument("empty sample set");
  std::map<long, long> counts;
  for (double x : samples.x) counts[static_cast<long>(std::floor(x / bin_width))]++;
  RateTable out;
  const double n = static_cast<double>(samples.x.size());
  for (const auto& [idx, count] : counts) {
    if (count < 10) {
      ++out.suppressed_bins;
      continue;
    }
    const double density = static_cast<double>(count) / (n * bin_width);
    out.bins.push_back({(static_cast<double>(idx) + 0.5) * bin_width,
                        -epsilon * std::log(density), count});
  }
  return out;
}

struct JumpCountCheck {
  double mean = 0.0;
  double variance = 0.0;
  double expected = 0.0;  // t / eps
  double standard_error = 0.0;
  bool ok = false;  // |mean - expected| <= 3 SE
};

[[nodiscard]] inline JumpCountCheck jump_count_check(const SampleSet& samples,
                                                     const SimConfig& cfg) {
  std::vector<double> j(samples.jumps.begin(), samples.jumps.end());
  const Moments m = moments(j);
  JumpCountCheck out;
  out.mean = m.mean;
  out.variance = m.variance;
  out.expected = cfg.t_final / cfg.epsilon;
  out.standard_error = std::sqrt(out.expected / static_cast<double>(j.size()));
  out.ok = std::abs(out.mean - out.expected) <= 3.0 * out.standard_error;
  return out;
}

[[nodiscard]] inline double normal_cdf(double z) noexcept {
  return 0.5 * std::erfc(-z / 1.4142135623730950488);
}

/// Two-sided Kolmogorov-Smirnov statistic against N(0, sigma^2).
[[nodiscard]] inline double ks_statistic_normal(std::vector<double> xs, double sigma) {
  if (xs.empty()) throw std::invalid_argument("ks_statistic_normal: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = normal_cdf(xs[i] / sigma);
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
    d = std::max(d, std::abs(F - static_cast<double>(i + 1) / n));
  }
  return d;
}

/// Asymptotic critical value of the KS statistic at the 1% level.
[[nodiscard]] inline double ks_critical_1pct(std::size_t n) noexcept {
  const double rn = std::sqrt(static_cast<double>(n));
  return 1.62762 / (rn + 0.12 + 0.11 / rn);
}

}  // namespace kinld::pdmp
