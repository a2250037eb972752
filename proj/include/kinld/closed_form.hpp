#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kinld/extended_value.hpp"

namespace kinld {

/// A (time, position, velocity) triple in macroscopic units.
struct PhasePoint {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;
};

/// Reaction rate r >= 0 and velocity-tail exponent gamma >= 1.
struct RateParams {
  double r = 0.0;
  double gamma = 2.0;
};

/// Which candidate realizes a minimum value.
enum class BranchTag {
  Ballistic,     // x/w, initial velocity held then dropped
  PowerLaw,      // (3/2)|x|^{2/3}, interior optimum of the parabola family
  EdgeParabola,  // x^2/(2 t^2) + t, time-saturated parabola
};

[[nodiscard]] inline const char* to_string(BranchTag b) noexcept {
  switch (b) {
    case BranchTag::Ballistic: return "ballistic";
    case BranchTag::PowerLaw: return "powerlaw";
    case BranchTag::EdgeParabola: return "edge";
  }
  return "?";
}

struct MuResult {
  ExtendedValue value;
  BranchTag branch = BranchTag::EdgeParabola;
};

namespace detail {

inline void require_finite_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be finite and >= 0");
}

/// Scaled tolerance of the s2 -> 0 indicator convention: the degenerate
/// parabola contributes its travel time iff its numerator vanishes.
[[nodiscard]] inline double indicator_tol(double x) noexcept {
  return 1e-12 * std::max(1.0, std::abs(x));
}

}  // namespace detail

/**
 * Minimum value started from a point source at rest,
 *   mu(t, x; 0) = min_{0<=s<=t} ( x^2 / (2 s^2) + s ).
 *
 * Equals (3/2)|x|^{2/3} for |x| <= t^{3/2} and x^2/(2t^2) + t beyond.
 * At t = 0 it degenerates to the initial indicator (0 at x = 0, +inf else).
 */
[[nodiscard]] inline MuResult mu_zero(double t, double x) {
  detail::require_finite_time(t);
  const double x2 = x * x;
  const double t3 = t * t * t;
  MuResult best{ExtendedValue::infinity(), BranchTag::EdgeParabola};
  if (x2 <= t3) best = {ExtendedValue::finite(1.5 * std::cbrt(x2)), BranchTag::PowerLaw};
  if (t > 0.0 && x2 >= t3) {
    const ExtendedValue edge = ExtendedValue::finite(x2 / (2.0 * t * t) + t);
    if (edge < best.value) best = {edge, BranchTag::EdgeParabola};
  }
  return best;
}

/**
 * Minimum value of the fundamental solution started from (0, w),
 *   mu(t, x; w) = min over { s1, s2 >= 0, s1 + s2 <= t } of
 *                 |x - s1 w|^2 / (2 s2^2) + s1 + s2.
 *
 * Only three candidates can realize the minimum:
 *   x/w               when 0 <= x/w <= t        (Ballistic)
 *   (3/2)|x|^{2/3}    when |x| <= t^{3/2}       (PowerLaw)
 *   x^2/(2t^2) + t    when |x| >= t^{3/2}       (EdgeParabola)
 * Ties are broken in that fixed order so the branch tag is deterministic.
 */
[[nodiscard]] inline MuResult mu(double t, double x, double w) {
  if (w == 0.0) return mu_zero(t, x);
  detail::require_finite_time(t);
  MuResult best{ExtendedValue::infinity(), BranchTag::EdgeParabola};
  const auto consider = [&best](double val, BranchTag b) {
    const ExtendedValue e = ExtendedValue::finite(val);
    if (e < best.value) best = {e, b};
  };
  const double ratio = x / w;
  if (ratio >= 0.0 && ratio <= t) consider(ratio, BranchTag::Ballistic);
  const double x2 = x * x;
  const double t3 = t * t * t;
  if (x2 <= t3) consider(1.5 * std::cbrt(x2), BranchTag::PowerLaw);
  if (t > 0.0 && x2 >= t3) consider(x2 / (2.0 * t * t) + t, BranchTag::EdgeParabola);
  return best;
}

/**
 * Brute-force oracle for mu: direct minimization over an n x n uniform grid
 * of admissible (s1, s2), boundary faces included, with the s2 = 0 row
 * handled by the indicator convention. On that degenerate row the objective
 * is finite only at s1 = x/w, so this point is appended to the s1 samples
 * whenever it is admissible; the interior scan stays a dumb grid. The
 * samples restrict the feasible set, so mu(t,x;w) <= mu_brute(t,x,w,n)
 * always.
 */
[[nodiscard]] inline ExtendedValue mu_brute(double t, double x, double w, int n) {
  detail::require_finite_time(t);
  if (n < 2) throw std::invalid_argument("mu_brute needs n >= 2");
  const double tol = detail::indicator_tol(x);
  const double ds = t / (n - 1);
  std::vector<double> s1_samples;
  s1_samples.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) s1_samples.push_back(ds * i);
  if (w != 0.0 && x / w >= 0.0 && x / w <= t) s1_samples.push_back(x / w);

  ExtendedValue best = ExtendedValue::infinity();
  for (const double s1 : s1_samples) {
    const double reach = x - s1 * w;
    // s2 = 0: degenerate parabola, indicator on the numerator
    if (std::abs(reach) <= tol) best = min(best, ExtendedValue::finite(s1));
    for (int j = 1; j < n; ++j) {
      const double s2 = ds * j;
      if (s1 + s2 > t + 1e-12 * t) break;
      const double val = reach * reach / (2.0 * s2 * s2) + s1 + s2;
      best = min(best, ExtendedValue::finite(val));
    }
  }
  return best;
}

/**
 * Full fundamental kernel,
 *   phi(t, x, v; w) = v^2/2 + min( mu(t,x;v), mu(t,x;w) ),
 * except in the special case v = w = x/t where phi = x/w. The special case
 * is detected by exact equality of the inputs (v == w and x == t*v): the
 * kernel is discontinuous there and the set has measure zero.
 */
[[nodiscard]] inline ExtendedValue phi(double t, double x, double v, double w) {
  if (!(t > 0.0)) throw std::invalid_argument("phi requires t > 0");
  if (v == w && w != 0.0 && x == t * v) return ExtendedValue::finite(x / w);
  const ExtendedValue m = min(mu(t, x, v).value, mu(t, x, w).value);
  return ExtendedValue::finite(0.5 * v * v) + m;
}

/**
 * Brute-force oracle for phi: the two-branch kernel with the inner minimum
 * taken over an n^3 uniform grid of travel splits (s1, s2, s3),
 * s1 + s2 + s3 <= t, s2 = 0 handled by the indicator convention. As in
 * mu_brute, the s1 and s3 samples are augmented by the points x/w and x/v
 * where the degenerate face has its only finite values.
 */
[[nodiscard]] inline ExtendedValue phi_brute(double t, double x, double v, double w, int n) {
  if (!(t > 0.0)) throw std::invalid_argument("phi_brute requires t > 0");
  if (n < 2) throw std::invalid_argument("phi_brute needs n >= 2");
  const double tol = detail::indicator_tol(x);

  // transport branch: 0_{x = tv} + min(0_{v=w}, v^2/2) + t
  ExtendedValue best = ExtendedValue::infinity();
  if (std::abs(x - t * v) <= tol) {
    const ExtendedValue vpart =
        min(v == w ? ExtendedValue::finite(0.0) : ExtendedValue::infinity(),
            ExtendedValue::finite(0.5 * v * v));
    best = vpart + ExtendedValue::finite(t);
  }

  const double ds = t / (n - 1);
  std::vector<double> s1_samples, s3_samples;
  s1_samples.reserve(static_cast<std::size_t>(n) + 1);
  s3_samples.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) s1_samples.push_back(ds * i);
  for (int k = 0; k < n; ++k) s3_samples.push_back(ds * k);
  if (w != 0.0 && x / w >= 0.0 && x / w <= t) s1_samples.push_back(x / w);
  if (v != 0.0 && x / v >= 0.0 && x / v <= t) s3_samples.push_back(x / v);

  std::vector<double> half_inv_sq(static_cast<std::size_t>(n), 0.0);
  for (int j = 1; j < n; ++j) half_inv_sq[static_cast<std::size_t>(j)] = 0.5 / (ds * j * ds * j);

  ExtendedValue inner = ExtendedValue::infinity();
  for (const double s1 : s1_samples) {
    for (const double s3 : s3_samples) {
      if (s1 + s3 > t + 1e-12 * t) continue;
      const double reach = x - s1 * w - s3 * v;
      if (std::abs(reach) <= tol) inner = min(inner, ExtendedValue::finite(s1 + s3));
      const double r2 = reach * reach;
      double cand = std::numeric_limits<double>::infinity();
      const double budget = t - s1 - s3;
      for (int j = 1; j < n; ++j) {
        if (ds * j > budget + 1e-12 * t) break;
        const double val = r2 * half_inv_sq[static_cast<std::size_t>(j)] + s1 + ds * j + s3;
        if (val < cand) cand = val;
      }
      if (std::isfinite(cand)) inner = min(inner, ExtendedValue::finite(cand));
    }
  }
  return min(best, ExtendedValue::finite(0.5 * v * v) + inner);
}

/// Spatially homogeneous kernel: psi0(t, v; w) = min( t + 0_{v=w}, v^2/2 ).
[[nodiscard]] inline ExtendedValue psi_homog(double t, double v, double w) {
  detail::require_finite_time(t);
  const ExtendedValue held =
      (v == w) ? ExtendedValue::finite(t) : ExtendedValue::infinity();
  return min(held, ExtendedValue::finite(0.5 * v * v));
}

/**
 * Reaction-rescaled minimum value,
 *   mu_r(t, x; w) = mu( (1+r) t, (1+r) x; w ) - r t.
 * Coincides with mu at r = 0. The branch tag is inherited from mu at the
 * rescaled arguments.
 */
[[nodiscard]] inline MuResult mu_reaction(double t, double x, double w, const RateParams& p) {
  if (p.r < 0.0) throw std::invalid_argument("reaction rate must be >= 0");
  MuResult m = mu((1.0 + p.r) * t, (1.0 + p.r) * x, w);
  return {m.value + ExtendedValue::finite(-p.r * t), m.branch};
}

/**
 * Tail-exponent generalization of mu_r for M(v) ~ exp(-|v|^gamma / gamma).
 * On the rescaled arguments (T, X) = ((1+r) t, (1+r) x) the candidates are
 *   X/w                         when 0 <= x/w <= t            (Ballistic)
 *   (1 + 1/g) |X|^{g/(g+1)}     when |X|^{g/(g+1)} <= T       (PowerLaw)
 *   |x|^g/(g t^g) + t  [+ r t]  otherwise                     (EdgeParabola)
 * each shifted by -r t. Reduces to mu_reaction at gamma = 2.
 */
[[nodiscard]] inline MuResult mu_gamma(double t, double x, double w, const RateParams& p) {
  if (p.gamma < 1.0) throw std::invalid_argument("gamma must be >= 1");
  if (p.r < 0.0) throw std::invalid_argument("reaction rate must be >= 0");
  detail::require_finite_time(t);
  const double g = p.gamma;
  const double T = (1.0 + p.r) * t;
  const double X = (1.0 + p.r) * x;
  const double shift = -p.r * t;

  if (t == 0.0) {
    if (x == 0.0) return {ExtendedValue::finite(0.0), BranchTag::PowerLaw};
    return {ExtendedValue::infinity(), BranchTag::EdgeParabola};
  }

  MuResult best{ExtendedValue::infinity(), BranchTag::EdgeParabola};
  const auto consider = [&best](double val, BranchTag b) {
    const ExtendedValue e = ExtendedValue::finite(val);
    if (e < best.value) best = {e, b};
  };
  if (w != 0.0) {
    const double ratio = x / w;
    if (ratio >= 0.0 && ratio <= t) consider(X / w + shift, BranchTag::Ballistic);
  }
  const double s_star = std::pow(std::abs(X), g / (g + 1.0));  // interior optimum
  if (s_star <= T) consider((1.0 + 1.0 / g) * s_star + shift, BranchTag::PowerLaw);
  if (s_star >= T)
    consider(std::pow(std::abs(x), g) / (g * std::pow(t, g)) + t, BranchTag::EdgeParabola);
  return best;
}

/// Brute-force oracle for the gamma family: grid minimization of
/// |X - s1 w|^g / (g s2^g) + s1 + s2 over the rescaled simplex, shifted by
/// -rt, with the degenerate s2 = 0 face sampled at s1 = X/w as in mu_brute.
[[nodiscard]] inline ExtendedValue mu_gamma_brute(double t, double x, double w,
                                                  const RateParams& p, int n) {
  if (n < 2) throw std::invalid_argument("mu_gamma_brute needs n >= 2");
  const double g = p.gamma;
  const double T = (1.0 + p.r) * t;
  const double X = (1.0 + p.r) * x;
  const double tol = detail::indicator_tol(X);
  const double ds = T / (n - 1);
  std::vector<double> s1_samples;
  s1_samples.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) s1_samples.push_back(ds * i);
  if (w != 0.0 && X / w >= 0.0 && X / w <= T) s1_samples.push_back(X / w);

  ExtendedValue best = ExtendedValue::infinity();
  for (const double s1 : s1_samples) {
    const double reach = X - s1 * w;
    if (std::abs(reach) <= tol) best = min(best, ExtendedValue::finite(s1));
    for (int j = 1; j < n; ++j) {
      const double s2 = ds * j;
      if (s1 + s2 > T + 1e-12 * T) break;
      const double val = std::pow(std::abs(reach), g) / (g * std::pow(s2, g)) + s1 + s2;
      best = min(best, ExtendedValue::finite(val));
    }
  }
  return best + ExtendedValue::finite(-p.r * t);
}

/**
 * @brief Extremal phase-space path realizing phi(t, x, v; w).
 *
 * Segments are (duration, velocity) legs covering [0, t]; the path starts at
 * (0, 0, w) and ends at (t, x, v). A terminal redistribution to v at time t
 * is implicit when the last leg's velocity differs from v.
 *
 * The path cost charges, per leg with nonzero velocity, its duration plus
 * |velocity|^2/2 unless the leg is the initial one carried at velocity w.
 * Resting is free. The implicit terminal jump charges v^2/2.
 */
struct Trajectory {
  struct Segment {
    double duration = 0.0;
    double velocity = 0.0;
  };
  std::vector<Segment> segments;
  PhasePoint start;
  PhasePoint end;
  ExtendedValue total_cost;
};

namespace detail {

[[nodiscard]] inline double path_cost(const std::vector<Trajectory::Segment>& segs, double w,
                                      double v_final) noexcept {
  double cost = 0.0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].velocity == 0.0) continue;  // resting is free
    cost += segs[i].duration;
    if (!(i == 0 && segs[i].velocity == w)) cost += 0.5 * segs[i].velocity * segs[i].velocity;
  }
  const double last_v = segs.empty() ? 0.0 : segs.back().velocity;
  if (last_v != v_final) cost += 0.5 * v_final * v_final;
  return cost;
}

}  // namespace detail

/**
 * Extremal trajectory for the kernel phi(t, x, v; w). One velocity
 * redistribution at most, plus the implicit terminal jump:
 *   - run at x/s then rest, s = min(t, |x|^{2/3}), for the parabola branches,
 *   - rest then run at v for duration x/v, when mu(t,x;v) is ballistic,
 *   - run at w for duration x/w then rest, when mu(t,x;w) is ballistic.
 * Throws domain_error if phi is infinite (no admissible path).
 */
[[nodiscard]] inline Trajectory trajectory(double t, double x, double v, double w) {
  if (!(t > 0.0)) throw std::invalid_argument("trajectory requires t > 0");
  Trajectory out;
  out.start = {0.0, 0.0, w};
  out.end = {t, x, v};

  const auto push = [&out](double dur, double vel) {
    if (dur > 0.0) out.segments.push_back({dur, vel});
  };
  const auto run_then_rest = [&](double span) {
    // realizes the PowerLaw/EdgeParabola branch of mu
    if (x == 0.0) return;
    push(span, x / span);
    push(t - span, 0.0);
  };

  if (v == w && w != 0.0 && x == t * v) {
    push(t, w);  // never redistributes
  } else {
    const MuResult mv = mu(t, x, v);
    const MuResult mw = mu(t, x, w);
    if (!mv.value.is_finite() && !mw.value.is_finite())
      throw std::domain_error("no trajectory: phi is infinite");
    if (mw.value <= mv.value) {
      if (mw.branch == BranchTag::Ballistic && w != 0.0) {
        push(x / w, w);
        push(t - x / w, 0.0);
      } else {
        run_then_rest(std::min(t, std::cbrt(x * x)));
      }
    } else {
      if (mv.branch == BranchTag::Ballistic && v != 0.0) {
        push(t - x / v, 0.0);
        push(x / v, v);
      } else {
        run_then_rest(std::min(t, std::cbrt(x * x)));
      }
    }
  }
  if (out.segments.empty()) out.segments.push_back({t, 0.0});
  out.total_cost = ExtendedValue::finite(detail::path_cost(out.segments, w, v));
  return out;
}

}  // namespace kinld
