#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinld/extended_value.hpp"
#include "kinld/grid.hpp"
#include "kinld/parallel.hpp"

namespace kinld::kinetic {

/// Gaussian equilibrium with variance epsilon (one dimension).
[[nodiscard]] inline double maxwellian(double epsilon, double v) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("maxwellian requires epsilon > 0");
  return std::exp(-0.5 * v * v / epsilon) / std::sqrt(2.0 * 3.14159265358979323846 * epsilon);
}

/// Default velocity half-width: Gaussian truncation below 1e-12 quadrature error.
[[nodiscard]] inline double default_velocity_half_width(double epsilon) noexcept {
  return 6.0 * std::sqrt(epsilon * std::abs(std::log(1e-12)));
}

/// Phase-space density f >= 0 on an (x, v) grid, tagged with epsilon.
/// Rows are contiguous per velocity node (index j * nx + i).
struct KineticField {
  double epsilon = 0.1;
  double time = 0.0;
  SpatialGrid xgrid;
  VelocityGrid vgrid;
  std::vector<double> f;

  KineticField() = default;
  KineticField(double eps, SpatialGrid xg, VelocityGrid vg)
      : epsilon(eps),
        xgrid(xg),
        vgrid(vg),
        f(static_cast<std::size_t>(xg.size()) * static_cast<std::size_t>(vg.size()), 0.0) {
    if (!(eps > 0.0)) throw std::invalid_argument("KineticField requires epsilon > 0");
  }

  [[nodiscard]] std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(xgrid.size()) +
           static_cast<std::size_t>(i);
  }
  [[nodiscard]] double operator()(int i, int j) const { return f[index(i, j)]; }
  double& at(int i, int j) { return f[index(i, j)]; }
};

struct TruncationReport {
  double worst_boundary_fraction = 0.0;
  bool warning = false;  // boundary mass exceeded 1e-10 of some column mass
};

/// Macroscopic density by trapezoid quadrature over v, per x node.
[[nodiscard]] inline std::vector<double> rho(const KineticField& fld,
                                             TruncationReport* report = nullptr) {
  const int nx = fld.xgrid.size();
  const int nv = fld.vgrid.size();
  const double dv = fld.vgrid.spacing();
  std::vector<double> out(static_cast<std::size_t>(nx), 0.0);
  double worst = 0.0;
  for (int i = 0; i < nx; ++i) {
    double s = 0.0;
    for (int j = 0; j < nv; ++j) {
      const double wj = (j == 0 || j == nv - 1) ? 0.5 : 1.0;
      s += wj * fld(i, j);
    }
    s *= dv;
    out[static_cast<std::size_t>(i)] = s;
    if (s > 0.0) {
      const double edge = 0.5 * dv * (fld(i, 0) + fld(i, nv - 1));
      worst = std::max(worst, edge / s);
    }
  }
  if (report != nullptr) {
    report->worst_boundary_fraction = worst;
    report->warning = worst > 1e-10;
  }
  return out;
}

/// Total mass by trapezoid quadrature in both variables.
[[nodiscard]] inline double total_mass(const KineticField& fld) {
  const std::vector<double> r = rho(fld);
  const int nx = fld.xgrid.size();
  double s = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double wi = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
    s += wi * r[static_cast<std::size_t>(i)];
  }
  return s * fld.xgrid.spacing();
}

struct DuhamelOptions {
  // Restore each transported row's quadrature mass after interpolation.
  // Exact conservation for the relaxation step; switched off by
  // reaction_step, where the pointwise ceiling must be preserved instead.
  bool mass_fix = true;
  int threads = 1;
};

struct StepDiagnostics {
  bool dt_accuracy_warning = false;  // dt > epsilon
};

namespace detail {

// Semi-Lagrangian shift of a nonnegative row by displacement d, geometric
// (log-linear) interpolation. Exact on exponential profiles, which is what
// the Hopf-Cole structure f = exp(-u/eps) makes of smooth u; never
// overshoots, never goes negative. Zero outside the domain.
inline void shift_row_geometric(const double* src, int n, double pos_shift, double* dst) {
  constexpr double snap = 1e-12;
  for (int i = 0; i < n; ++i) {
    const double pos = i - pos_shift;
    if (pos < -snap || pos > n - 1 + snap) {
      dst[i] = 0.0;
      continue;
    }
    int i0 = static_cast<int>(std::floor(pos));
    if (i0 < 0) i0 = 0;
    if (i0 > n - 2) i0 = n - 2;
    const double theta = pos - i0;
    if (theta <= snap) {
      dst[i] = src[i0];
    } else if (theta >= 1.0 - snap) {
      dst[i] = src[i0 + 1];
    } else {
      const double a = src[i0], b = src[i0 + 1];
      dst[i] = (a > 0.0 && b > 0.0) ? a * std::exp(theta * std::log(b / a)) : 0.0;
    }
  }
}

inline void rescale_to_mass(double* row, int n, double target_mass) {
  double got = 0.0;
  for (int i = 0; i < n; ++i) got += (i == 0 || i == n - 1) ? 0.5 * row[i] : row[i];
  if (got > 0.0 && target_mass > 0.0) {
    const double c = target_mass / got;
    for (int i = 0; i < n; ++i) row[i] *= c;
  }
}

[[nodiscard]] inline double row_mass(const double* row, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += (i == 0 || i == n - 1) ? 0.5 * row[i] : row[i];
  return s;
}

}  // namespace detail

/**
 * One step of the relaxation equation by its integral (Duhamel) form,
 *
 *   f(t+dt, x, v) = f(t, x - dt v, v) e^{-dt/eps}
 *                 + M_eps(v) (1/eps) int_0^dt rho(t, x - s v) e^{-s/eps} ds,
 *
 * with rho frozen at the step start and taken linear in s along the foot of
 * the characteristic; the stiff factor is integrated exactly, so the step is
 * unconditionally stable. First order in dt; a diagnostics warning fires
 * when dt > eps.
 *
 * The discrete equilibrium uses the quadrature-normalized Maxwellian, which
 * makes the uniform equilibrium an exact fixed point and, with mass_fix on,
 * conserves the total quadrature mass to rounding.
 */
[[nodiscard]] inline KineticField duhamel_step(const KineticField& in, double dt,
                                               DuhamelOptions opt = {},
                                               StepDiagnostics* diag = nullptr) {
  if (!(dt > 0.0)) throw std::invalid_argument("duhamel_step requires dt > 0");
  const double eps = in.epsilon;
  if (diag != nullptr) diag->dt_accuracy_warning = dt > eps;
  const int nx = in.xgrid.size();
  const int nv = in.vgrid.size();
  const double dx = in.xgrid.spacing();
  const double dv = in.vgrid.spacing();

  const double delta = dt / eps;
  const double damp = std::exp(-delta);
  const double i0 = eps * (1.0 - damp);                         // int e^{-s/eps}
  const double i1 = eps * eps * (1.0 - (1.0 + delta) * damp);   // int s e^{-s/eps}
  const double c_now = (i0 - i1 / dt) / eps;
  const double c_foot = (i1 / dt) / eps;

  // Quadrature-normalized equilibrium.
  std::vector<double> m_hat(static_cast<std::size_t>(nv));
  double s_m = 0.0;
  for (int j = 0; j < nv; ++j) {
    m_hat[static_cast<std::size_t>(j)] = maxwellian(eps, in.vgrid.node(j));
    s_m += ((j == 0 || j == nv - 1) ? 0.5 : 1.0) * m_hat[static_cast<std::size_t>(j)];
  }
  s_m *= dv;
  for (auto& m : m_hat) m /= s_m;

  const std::vector<double> rho0 = rho(in);

  KineticField out(eps, in.xgrid, in.vgrid);
  out.time = in.time + dt;

  parallel_for(static_cast<std::size_t>(nv), opt.threads, [&](std::size_t jb, std::size_t je) {
    std::vector<double> trans(static_cast<std::size_t>(nx));
    std::vector<double> rho_foot(static_cast<std::size_t>(nx));
    for (std::size_t jj = jb; jj < je; ++jj) {
      const int j = static_cast<int>(jj);
      const double vj = in.vgrid.node(j);
      const double pos_shift = dt * vj / dx;
      const double* src = &in.f[in.index(0, j)];
      detail::shift_row_geometric(src, nx, pos_shift, trans.data());
      if (opt.mass_fix) detail::rescale_to_mass(trans.data(), nx, detail::row_mass(src, nx));
      detail::shift_row_geometric(rho0.data(), nx, pos_shift, rho_foot.data());
      if (opt.mass_fix)
        detail::rescale_to_mass(rho_foot.data(), nx, detail::row_mass(rho0.data(), nx));
      const double mj = m_hat[static_cast<std::size_t>(j)];
      double* dst = &out.f[out.index(0, j)];
      for (int i = 0; i < nx; ++i)
        dst[i] = damp * trans[static_cast<std::size_t>(i)] +
                 mj * (c_now * rho0[static_cast<std::size_t>(i)] +
                       c_foot * rho_foot[static_cast<std::size_t>(i)]);
    }
  });
  return out;
}

class MaxPrincipleViolation : public std::runtime_error {
 public:
  explicit MaxPrincipleViolation(const std::string& what) : std::runtime_error(what) {}
};

/// Worst signed excess of f over [0, sqrt(eps) M_eps(v)], nodewise.
[[nodiscard]] inline double max_principle_excess(const KineticField& fld) {
  const double scale = std::sqrt(fld.epsilon);
  double worst = 0.0;
  for (int j = 0; j < fld.vgrid.size(); ++j) {
    const double cap = scale * maxwellian(fld.epsilon, fld.vgrid.node(j));
    for (int i = 0; i < fld.xgrid.size(); ++i) {
      const double v = fld(i, j);
      worst = std::max(worst, v - cap);
      worst = std::max(worst, -v);
    }
  }
  return worst;
}

/**
 * One split step of the reaction-transport equation: the relaxation part by
 * duhamel_step (mass fix off so the pointwise ceiling survives), then the
 * reaction part integrated exactly with rho frozen:
 *
 *   f <- cap(v) + (f - cap(v)) exp( - r rho dt / eps^{3/2} ),
 *   cap(v) = sqrt(eps) M_eps(v).
 *
 * Both substeps map [0, cap] into itself; a violation beyond rounding is a
 * fatal error (bug or dt too large for the frozen-rho approximation).
 */
[[nodiscard]] inline KineticField reaction_step(const KineticField& in, double dt, double r,
                                                int threads = 1,
                                                StepDiagnostics* diag = nullptr) {
  if (r < 0.0) throw std::invalid_argument("reaction_step requires r >= 0");
  DuhamelOptions opt;
  opt.mass_fix = false;
  opt.threads = threads;
  KineticField out = duhamel_step(in, dt, opt, diag);
  if (r > 0.0) {
    const double eps = in.epsilon;
    const std::vector<double> rho_lin = rho(out);
    const double rate_scale = dt * r / (eps * std::sqrt(eps));
    const int nx = out.xgrid.size();
    const int nv = out.vgrid.size();
    for (int j = 0; j < nv; ++j) {
      const double cap = std::sqrt(eps) * maxwellian(eps, out.vgrid.node(j));
      for (int i = 0; i < nx; ++i) {
        const double relax = std::exp(-rate_scale * rho_lin[static_cast<std::size_t>(i)]);
        double& v = out.at(i, j);
        v = cap + (v - cap) * relax;
      }
    }
  }
  const double excess = max_principle_excess(out);
  const double tol = 1e-9 * std::sqrt(in.epsilon) * maxwellian(in.epsilon, 0.0);
  if (excess > tol)
    throw MaxPrincipleViolation("max principle violated by " + std::to_string(excess));
  return out;
}

/// Hopf-Cole view of a kinetic field: u = -eps log f (+inf where f = 0) and
/// the companion b = u - v^2/2.
struct WKBField {
  double epsilon = 0.1;
  double time = 0.0;
  SpatialGrid xgrid;
  VelocityGrid vgrid;
  std::vector<ExtendedValue> u, b;

  [[nodiscard]] std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(xgrid.size()) +
           static_cast<std::size_t>(i);
  }
};

[[nodiscard]] inline WKBField hopf_cole(const KineticField& fld) {
  WKBField out;
  out.epsilon = fld.epsilon;
  out.time = fld.time;
  out.xgrid = fld.xgrid;
  out.vgrid = fld.vgrid;
  const std::size_t n = fld.f.size();
  out.u.resize(n);
  out.b.resize(n);
  for (int j = 0; j < fld.vgrid.size(); ++j) {
    const double vj = fld.vgrid.node(j);
    for (int i = 0; i < fld.xgrid.size(); ++i) {
      const std::size_t k = fld.index(i, j);
      if (fld.f[k] > 0.0) {
        const double u = -fld.epsilon * std::log(fld.f[k]);
        out.u[k] = ExtendedValue::finite(u);
        out.b[k] = ExtendedValue::finite(u - 0.5 * vj * vj);
      } else {
        out.u[k] = ExtendedValue::infinity();
        out.b[k] = ExtendedValue::infinity();
      }
    }
  }
  return out;
}

struct AprioriBound {
  double observed = 0.0;
  double allowed = 0.0;
  bool ok = true;
};

/// Runtime check of the transported-envelope bounds along a run:
///   (i)  sup |b(t)|      <= sup |b_0|
///   (ii) Lip_x b(t)      <= Lip_x b_0
///   (iv) Lip_v b(t)      <= Lip_v b_0 + t Lip_x b_0
/// each up to `slack` for discretization effects.
struct AprioriReport {
  AprioriBound sup_b, lip_x, lip_v;
  double slack = 0.0;
  [[nodiscard]] bool all_ok() const noexcept { return sup_b.ok && lip_x.ok && lip_v.ok; }
};

namespace detail {

[[nodiscard]] inline double sup_abs_b(const WKBField& w, int guard) {
  double s = 0.0;
  for (int j = 0; j < w.vgrid.size(); ++j)
    for (int i = guard; i < w.xgrid.size() - guard; ++i) {
      const ExtendedValue e = w.b[w.index(i, j)];
      if (e.is_finite()) s = std::max(s, std::abs(e.value()));
    }
  return s;
}

[[nodiscard]] inline double lip_x_b(const WKBField& w, int guard) {
  double s = 0.0;
  const double dx = w.xgrid.spacing();
  for (int j = 0; j < w.vgrid.size(); ++j)
    for (int i = guard; i + 1 < w.xgrid.size() - guard; ++i) {
      const ExtendedValue a = w.b[w.index(i, j)], b = w.b[w.index(i + 1, j)];
      if (a.is_finite() && b.is_finite()) s = std::max(s, std::abs(b.value() - a.value()) / dx);
    }
  return s;
}

[[nodiscard]] inline double lip_v_b(const WKBField& w, int guard) {
  double s = 0.0;
  const double dv = w.vgrid.spacing();
  for (int j = 0; j + 1 < w.vgrid.size(); ++j)
    for (int i = guard; i < w.xgrid.size() - guard; ++i) {
      const ExtendedValue a = w.b[w.index(i, j)], b = w.b[w.index(i, j + 1)];
      if (a.is_finite() && b.is_finite()) s = std::max(s, std::abs(b.value() - a.value()) / dv);
    }
  return s;
}

}  // namespace detail

/**
 * guard_x: boundary cells excluded on each side. The transported-envelope
 * bounds are interior estimates of the whole-line problem; zero-inflow
 * domain truncation maintains a standing kink of width ~ vmax dt near the
 * spatial boundary that is not part of the statement being checked.
 */
[[nodiscard]] inline AprioriReport apriori_report(const std::vector<WKBField>& history,
                                                  double slack = -1.0, int guard_x = 0) {
  if (history.empty()) throw std::invalid_argument("apriori_report needs at least one snapshot");
  const WKBField& first = history.front();
  if (2 * guard_x >= first.xgrid.size() - 1)
    throw std::invalid_argument("apriori_report: guard eats the whole domain");
  const double sup0 = detail::sup_abs_b(first, guard_x);
  const double lipx0 = detail::lip_x_b(first, guard_x);
  const double lipv0 = detail::lip_v_b(first, guard_x);
  if (slack < 0.0) {
    slack = 1e-6 + 2.0 * (first.xgrid.spacing() + first.vgrid.spacing()) *
                       (1.0 + lipx0 + lipv0);
  }

  AprioriReport rep;
  rep.slack = slack;
  rep.sup_b = {sup0, sup0 + slack, true};
  rep.lip_x = {lipx0, lipx0 + slack, true};
  rep.lip_v = {lipv0, lipv0 + slack, true};
  for (const WKBField& w : history) {
    const double t = w.time - first.time;
    const double sup = detail::sup_abs_b(w, guard_x);
    const double lx = detail::lip_x_b(w, guard_x);
    const double lv = detail::lip_v_b(w, guard_x);
    rep.sup_b.observed = std::max(rep.sup_b.observed, sup);
    rep.lip_x.observed = std::max(rep.lip_x.observed, lx);
    if (sup > sup0 + slack) rep.sup_b.ok = false;
    if (lx > lipx0 + slack) rep.lip_x.ok = false;
    const double allowed_v = lipv0 + t * lipx0 + slack;
    rep.lip_v.allowed = std::max(rep.lip_v.allowed, allowed_v);
    rep.lip_v.observed = std::max(rep.lip_v.observed, lv);
    if (lv > allowed_v) rep.lip_v.ok = false;
  }
  return rep;
}

}  // namespace kinld::kinetic
