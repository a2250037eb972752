#pragma once

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kinld/closed_form.hpp"
#include "kinld/grid.hpp"
#include "kinld/parallel.hpp"

namespace kinld::minplus {

/**
 * Projects initial data onto the admissible cone
 *   u <= min_w u(., w) + v^2/2,
 * column by column in x. Idempotent; a column that is identically +inf
 * stays +inf.
 */
[[nodiscard]] inline MinPlusField2 project_initial(const MinPlusField2& u0) {
  MinPlusField2 out(u0.xgrid, u0.vgrid);
  const int nx = u0.xgrid.size();
  const int nv = u0.vgrid.size();
  for (int i = 0; i < nx; ++i) {
    ExtendedValue m = ExtendedValue::infinity();
    for (int j = 0; j < nv; ++j) m = min(m, u0(i, j));
    for (int j = 0; j < nv; ++j) {
      const double vj = u0.vgrid.node(j);
      out.at(i, j) = min(u0(i, j), m + ExtendedValue::finite(0.5 * vj * vj));
    }
  }
  return out;
}

/// Column-wise minimum over velocity.
[[nodiscard]] inline MinPlusField1 min_over_v(const MinPlusField2& u) {
  MinPlusField1 out(u.xgrid);
  for (int i = 0; i < u.xgrid.size(); ++i) {
    ExtendedValue m = ExtendedValue::infinity();
    for (int j = 0; j < u.vgrid.size(); ++j) m = min(m, u(i, j));
    out.at(i) = m;
  }
  return out;
}

/// Documented default half-width of the velocity scan: wide enough that the
/// initial datum is reachable across the whole domain in one step.
[[nodiscard]] inline double default_velocity_half_width(const SpatialGrid& xg, double dt) noexcept {
  return 2.0 * std::max(1.0, xg.hi() - xg.lo()) / dt;
}

/// Point-mass initial condition 0_{x = center} + 0_{v = w} handled in its
/// projected form analytically: its evolution term is evaluated along exact
/// characteristics instead of being sampled on the grid, where the indicator
/// would be invisible between nodes.
struct DiracDatum {
  double center = 0.0;
  double w = 0.0;
};

/**
 * @brief Time-discrete min-plus semigroup for the minimum value mu_n.
 *
 * Carries the projected initial condition u0 on (x, v) and the full history
 * mu_0 ... mu_n (the recursion is non-Markovian in the step index):
 *
 *   mu_{n+1}(x) = min( min_v u0(x - t_{n+1} v, v) + t_{n+1},
 *                      min_{0<=k<=n} min_v ( v^2/2 + mu_{n-k}(x - t_k v) ) + t_k )
 *
 * The inner minima run over the velocity grid; off-grid positions use
 * conservative linear interpolation. For a DiracDatum the first term is
 * computed exactly: the indicator pins v = (x - center)/t_{n+1}, so no grid
 * minimization or interpolation is involved. If a grid scan's argmin in v
 * touches the boundary, a warning counter is bumped (the truncation of the
 * continuum minimization is then detectable).
 */
class SchemeState {
 public:
  SchemeState(const MinPlusField2& u0_raw, double dt)
      : dt_(dt), u0_(project_initial(u0_raw)) {
    if (!(dt > 0.0)) throw std::invalid_argument("scheme needs dt > 0");
    history_.push_back(min_over_v(u0_));
  }

  SchemeState(const DiracDatum& d, const SpatialGrid& xg, const VelocityGrid& vg, double dt)
      : dt_(dt), analytic_(true), dirac_(d) {
    if (!(dt > 0.0)) throw std::invalid_argument("scheme needs dt > 0");
    MinPlusField2 u0(xg, vg);
    const int i0 = xg.nearest(d.center);
    if (std::abs(xg.node(i0) - d.center) > detail::indicator_tol(d.center))
      throw std::invalid_argument("Dirac center must be a spatial grid node");
    for (int j = 0; j < vg.size(); ++j) {
      const double vj = vg.node(j);
      u0.at(i0, j) = ExtendedValue::finite(vj == d.w ? 0.0 : 0.5 * vj * vj);
    }
    u0_ = u0;  // already satisfies the constraint
    history_.push_back(min_over_v(u0_));
  }

  [[nodiscard]] double dt() const noexcept { return dt_; }
  [[nodiscard]] double time(int k) const noexcept { return dt_ * k; }
  [[nodiscard]] int steps() const noexcept { return static_cast<int>(history_.size()) - 1; }
  [[nodiscard]] const MinPlusField2& initial() const noexcept { return u0_; }
  [[nodiscard]] const MinPlusField1& field(int k) const { return history_.at(static_cast<std::size_t>(k)); }
  [[nodiscard]] const std::vector<MinPlusField1>& history() const noexcept { return history_; }
  [[nodiscard]] long boundary_argmin_warnings() const noexcept { return warn_.load(); }

  /// Initial datum at an arbitrary phase point (analytic for a DiracDatum,
  /// conservative bilinear interpolation otherwise).
  [[nodiscard]] ExtendedValue initial_at(double y, double v) const {
    if (!analytic_) return interp(u0_, y, v);
    if (std::abs(y - dirac_.center) > detail::indicator_tol(y)) return ExtendedValue::infinity();
    const double quad = 0.5 * v * v;
    return ExtendedValue::finite(v == dirac_.w ? 0.0 : quad);
  }

  /// Advances to mu_{n+1}; returns the appended field.
  const MinPlusField1& step(int threads = 1) {
    const int n = steps();
    const double t_next = time(n + 1);
    const SpatialGrid& xg = u0_.xgrid;
    const VelocityGrid& vg = u0_.vgrid;
    const int nv = vg.size();
    MinPlusField1 next(xg);

    parallel_for(static_cast<std::size_t>(xg.size()), threads, [&](std::size_t b, std::size_t e) {
      long local_warn = 0;
      for (std::size_t ii = b; ii < e; ++ii) {
        const int i = static_cast<int>(ii);
        const double x = xg.node(i);
        ExtendedValue best = ExtendedValue::infinity();
        int best_j = -1;

        if (analytic_) {
          // the indicator pins the characteristic velocity exactly
          const double y = x - dirac_.center;
          const bool held = std::abs(y - t_next * dirac_.w) <= detail::indicator_tol(x);
          const double vstar = y / t_next;
          best = ExtendedValue::finite((held ? 0.0 : 0.5 * vstar * vstar) + t_next);
        } else {
          for (int j = 0; j < nv; ++j) {
            const double vj = vg.node(j);
            const ExtendedValue c = interp_x(u0_, x - t_next * vj, j);
            if (c + ExtendedValue::finite(t_next) < best) {
              best = c + ExtendedValue::finite(t_next);
              best_j = j;
            }
          }
        }
        // k = 0: the foot is x for every v, so v = 0 is optimal.
        if (history_[static_cast<std::size_t>(n)](i) < best) {
          best = history_[static_cast<std::size_t>(n)](i);
          best_j = vg.zero_index();
        }
        for (int k = 1; k <= n; ++k) {
          const double tk = time(k);
          const MinPlusField1& mu_prev = history_[static_cast<std::size_t>(n - k)];
          for (int j = 0; j < nv; ++j) {
            const double vj = vg.node(j);
            const ExtendedValue c = interp(mu_prev, x - tk * vj);
            if (!c.is_finite()) continue;
            const ExtendedValue val = ExtendedValue::finite(0.5 * vj * vj + tk) + c;
            if (val < best) {
              best = val;
              best_j = j;
            }
          }
        }
        next.at(i) = best;
        if (best.is_finite() && (best_j == 0 || best_j == nv - 1)) ++local_warn;
      }
      if (local_warn != 0) warn_.fetch_add(local_warn);
    });

    history_.push_back(std::move(next));
    return history_.back();
  }

 private:
  double dt_;
  bool analytic_ = false;
  DiracDatum dirac_{};
  MinPlusField2 u0_;
  std::vector<MinPlusField1> history_;
  std::atomic<long> warn_{0};
};

/**
 * Closed-form discrete solution of the recursion started from the projected
 * Dirac at (0, w):
 *   mu_n(x) = min over (i,k) in A_n of |x - t_i w|^2 / (2 t_k^2) + t_{i+k},
 *   A_n = { i + k <= n-1 } u { (n,0) } u { (0,n) },
 * with the k = 0 entries degenerating to indicators at x = t_i w.
 */
[[nodiscard]] inline ExtendedValue mu_n_closed(int n, double dt, double x, double w) {
  if (n < 0) throw std::invalid_argument("mu_n_closed needs n >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("mu_n_closed needs dt > 0");
  ExtendedValue best = ExtendedValue::infinity();
  const auto consider = [&](int i, int k) {
    const double ti = dt * i;
    const double reach = x - ti * w;
    if (k == 0) {
      if (std::abs(reach) <= detail::indicator_tol(x)) best = min(best, ExtendedValue::finite(ti));
      return;
    }
    const double tk = dt * k;
    best = min(best, ExtendedValue::finite(reach * reach / (2.0 * tk * tk) + dt * (i + k)));
  };
  for (int i = 0; i + 1 <= n; ++i)
    for (int k = 0; i + k <= n - 1; ++k) consider(i, k);
  consider(n, 0);
  consider(0, n);
  return best;
}

namespace detail_gs {

template <class F>
[[nodiscard]] ExtendedValue golden_min(const F& f, double a, double b, int iters) {
  constexpr double ratio = 0.6180339887498949;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  ExtendedValue fc = f(c), fd = f(d);
  for (int it = 0; it < iters; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return min(fc, fd);
}

}  // namespace detail_gs

struct HopfLaxOptions {
  bool refine = true;  // one golden-section pass per coordinate off the grid argmin
  int refine_iters = 20;
};

/// Continuum view of the projected point-mass datum at (center, w):
/// 0_{y = center} + min(0_{v = w}, v^2/2).
[[nodiscard]] inline auto dirac_projected(double center, double w) {
  return [center, w](double y, double v) -> ExtendedValue {
    if (std::abs(y - center) > detail::indicator_tol(y)) return ExtendedValue::infinity();
    return ExtendedValue::finite(v == w ? 0.0 : 0.5 * v * v);
  };
}

/**
 * Representation formula,
 *   u(t, x, v) = inf_{(y,w)} ( phi(t, x - y, v; w) + u0(y, w) ),
 * with the infimum taken over the grid nodes and one local golden-section
 * pass per coordinate around the argmin, which removes the O(dx) floor.
 * The datum is a callable on continuous (y, w); singular data should be
 * passed analytically (e.g. dirac_projected), since an interpolated view
 * of a grid field can dip below the datum it represents near a spike.
 */
template <class Datum>
[[nodiscard]] ExtendedValue hopflax_u(const SpatialGrid& yg, const VelocityGrid& wg,
                                      const Datum& u0, double t, double x, double v,
                                      HopfLaxOptions opt = {}) {
  if (!(t > 0.0)) throw std::invalid_argument("hopflax_u requires t > 0");
  ExtendedValue best = ExtendedValue::infinity();
  int bi = -1, bj = -1;
  for (int j = 0; j < wg.size(); ++j) {
    const double w = wg.node(j);
    for (int i = 0; i < yg.size(); ++i) {
      const ExtendedValue base = u0(yg.node(i), w);
      if (!base.is_finite()) continue;
      const ExtendedValue val = phi(t, x - yg.node(i), v, w) + base;
      if (val < best) {
        best = val;
        bi = i;
        bj = j;
      }
    }
  }
  if (!opt.refine || bi < 0) return best;

  const double y0 = yg.node(bi);
  const double w0 = wg.node(bj);
  const auto along_y = [&](double y) { return phi(t, x - y, v, w0) + u0(y, w0); };
  best = min(best, detail_gs::golden_min(along_y, y0 - yg.spacing(), y0 + yg.spacing(),
                                         opt.refine_iters));
  const auto along_w = [&](double w) { return phi(t, x - y0, v, w) + u0(y0, w); };
  best = min(best, detail_gs::golden_min(along_w, w0 - wg.spacing(), w0 + wg.spacing(),
                                         opt.refine_iters));
  return best;
}

/// Grid-field datum: off-node values by conservative bilinear interpolation.
[[nodiscard]] inline ExtendedValue hopflax_u(const MinPlusField2& u0, double t, double x,
                                             double v, HopfLaxOptions opt = {}) {
  return hopflax_u(
      u0.xgrid, u0.vgrid, [&u0](double y, double w) { return interp(u0, y, w); }, t, x, v, opt);
}

/// Same representation for the minimum value:
///   min_v u(t, x, .) = min_{(y,w)} ( mu(t, x - y; w) + u0(y, w) ).
template <class Datum>
[[nodiscard]] ExtendedValue hopflax_min(const SpatialGrid& yg, const VelocityGrid& wg,
                                        const Datum& u0, double t, double x,
                                        HopfLaxOptions opt = {}) {
  if (!(t > 0.0)) throw std::invalid_argument("hopflax_min requires t > 0");
  ExtendedValue best = ExtendedValue::infinity();
  int bi = -1, bj = -1;
  for (int j = 0; j < wg.size(); ++j) {
    const double w = wg.node(j);
    for (int i = 0; i < yg.size(); ++i) {
      const ExtendedValue base = u0(yg.node(i), w);
      if (!base.is_finite()) continue;
      const ExtendedValue val = mu(t, x - yg.node(i), w).value + base;
      if (val < best) {
        best = val;
        bi = i;
        bj = j;
      }
    }
  }
  if (!opt.refine || bi < 0) return best;

  const double y0 = yg.node(bi);
  const double w0 = wg.node(bj);
  const auto along_y = [&](double y) { return mu(t, x - y, w0).value + u0(y, w0); };
  best = min(best, detail_gs::golden_min(along_y, y0 - yg.spacing(), y0 + yg.spacing(),
                                         opt.refine_iters));
  const auto along_w = [&](double w) { return mu(t, x - y0, w).value + u0(y0, w); };
  best = min(best, detail_gs::golden_min(along_w, w0 - wg.spacing(), w0 + wg.spacing(),
                                         opt.refine_iters));
  return best;
}

[[nodiscard]] inline ExtendedValue hopflax_min(const MinPlusField2& u0, double t, double x,
                                               HopfLaxOptions opt = {}) {
  return hopflax_min(
      u0.xgrid, u0.vgrid, [&u0](double y, double w) { return interp(u0, y, w); }, t, x, opt);
}

/**
 * Rebuilds the full unknown from the minimum-value history:
 *   u(t_n, x, v) = min( u0(x - t_n v, v) + t_n,
 *                       v^2/2 + min_{t_k <= t_n} ( mu(t_n - t_k, x - t_k v) + t_k ) ).
 * By construction the second branch enforces the constraint nodewise.
 */
[[nodiscard]] inline ExtendedValue reconstruct_u(const SchemeState& st, int n, double x, double v) {
  if (n < 0 || n > st.steps()) throw std::invalid_argument("reconstruct_u: step out of range");
  const double tn = st.time(n);
  if (n == 0) return st.initial_at(x, v);
  ExtendedValue best = st.initial_at(x - tn * v, v) + ExtendedValue::finite(tn);
  for (int k = 0; k <= n; ++k) {
    const double s = st.time(k);
    const ExtendedValue m = interp(st.field(n - k), x - s * v);
    best = min(best, ExtendedValue::finite(0.5 * v * v + s) + m);
  }
  return best;
}

}  // namespace kinld::minplus
