#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "kinld/closed_form.hpp"
#include "kinld/kinetic.hpp"

using namespace kinld;
using namespace kinld::kinetic;
using Catch::Approx;

namespace {

KineticField make_field(double eps, double xlo, double xhi, int nx, int nv) {
  const double vh = default_velocity_half_width(eps);
  return KineticField(eps, SpatialGrid(xlo, xhi, nx), VelocityGrid::centered(vh, nv));
}

// f0 = exp(-u0/eps), u0 = x^2/(2 sigma^2) + v^2/2: a mollified point source.
void fill_point_source(KineticField& f, double sigma) {
  for (int j = 0; j < f.vgrid.size(); ++j) {
    const double v = f.vgrid.node(j);
    for (int i = 0; i < f.xgrid.size(); ++i) {
      const double x = f.xgrid.node(i);
      const double u0 = 0.5 * x * x / (sigma * sigma) + 0.5 * v * v;
      f.at(i, j) = std::exp(-u0 / f.epsilon);
    }
  }
}

void fill_equilibrium(KineticField& f, double amplitude) {
  for (int j = 0; j < f.vgrid.size(); ++j) {
    const double m = amplitude * std::sqrt(f.epsilon) * maxwellian(f.epsilon, f.vgrid.node(j));
    for (int i = 0; i < f.xgrid.size(); ++i) f.at(i, j) = m;
  }
}

}  // namespace

TEST_CASE("maxwellian values and normalization") {
  CHECK(maxwellian(0.1, 0.0) == Approx(1.2615662610100802).margin(1e-14));
  CHECK(maxwellian(0.1, 1.0) == Approx(1.2615662610100802 * std::exp(-5.0)).margin(1e-16));

  // trapezoid quadrature over the default-width grid integrates to 1
  const VelocityGrid vg = VelocityGrid::centered(default_velocity_half_width(0.1), 201);
  double s = 0.0;
  for (int j = 0; j < vg.size(); ++j)
    s += ((j == 0 || j == vg.size() - 1) ? 0.5 : 1.0) * maxwellian(0.1, vg.node(j));
  CHECK(s * vg.spacing() == Approx(1.0).margin(1e-8));
}

TEST_CASE("rho: quadrature of columns") {
  KineticField f = make_field(0.1, -1.0, 1.0, 11, 201);
  fill_equilibrium(f, 1.0);
  TruncationReport rep;
  const std::vector<double> r = rho(f, &rep);
  for (double v : r) CHECK(v == Approx(std::sqrt(0.1)).margin(1e-9));
  CHECK(!rep.warning);

  // linearity: sum of two scaled Maxwellian fields
  KineticField g = f;
  for (std::size_t k = 0; k < g.f.size(); ++k) g.f[k] = 3.0 * f.f[k] + 0.5 * f.f[k];
  const std::vector<double> rg = rho(g);
  for (int i = 0; i < g.xgrid.size(); ++i)
    CHECK(rg[static_cast<std::size_t>(i)] ==
          Approx(3.5 * r[static_cast<std::size_t>(i)]).margin(1e-12));

  // zero field
  KineticField z = make_field(0.1, -1.0, 1.0, 11, 201);
  for (double v : rho(z)) CHECK(v == 0.0);

  // a narrow grid triggers the truncation warning
  KineticField n(0.1, SpatialGrid(-1.0, 1.0, 5), VelocityGrid::centered(0.5, 11));
  fill_equilibrium(n, 1.0);
  TruncationReport nrep;
  (void)rho(n, &nrep);
  CHECK(nrep.warning);
}

TEST_CASE("duhamel_step: equilibrium is an exact fixed point away from inflow") {
  KineticField f = make_field(0.1, -1.0, 1.0, 31, 201);
  fill_equilibrium(f, 1.0);
  DuhamelOptions opt;
  opt.mass_fix = false;
  const KineticField g = duhamel_step(f, 0.025, opt);
  // zero-inflow boundaries drain the fastest rows over a few cells; the
  // interior sees the exact fixed point
  const int guard = 1 + static_cast<int>(0.025 * f.vgrid.hi() / f.xgrid.spacing());
  for (int j = 0; j < f.vgrid.size(); ++j)
    for (int i = guard; i < f.xgrid.size() - guard; ++i)
      CHECK(g(i, j) == Approx(f(i, j)).epsilon(1e-12));
}

TEST_CASE("duhamel_step: homogeneous relaxation matches the explicit kernel") {
  const double eps = 0.05;
  // half-domain exceeds vmax * t so the center never sees the boundaries
  KineticField f = make_field(eps, -4.0, 4.0, 161, 201);
  const int jw = f.vgrid.nearest(0.4);
  const double w = f.vgrid.node(jw);
  // delta column at v = w, unit column mass
  for (int i = 0; i < f.xgrid.size(); ++i) f.at(i, jw) = 1.0 / f.vgrid.spacing();

  const double dt = eps / 4.0;
  DuhamelOptions opt;
  opt.mass_fix = false;  // zero-inflow boundaries; the center stays exact
  KineticField g = f;
  const int steps = 40;
  for (int n = 0; n < steps; ++n) g = duhamel_step(g, dt, opt);
  const double t = steps * dt;

  // K(t, v, w) = e^{-t/eps} delta_{v=w} + (1 - e^{-t/eps}) M_eps(v),
  // checked at the center, outside the influence cone of the boundaries
  const double damp = std::exp(-t / eps);
  const int ic = f.xgrid.nearest(0.0);
  for (int j = 0; j < g.vgrid.size(); ++j) {
    double expect = (1.0 - damp) * maxwellian(eps, g.vgrid.node(j));
    if (j == jw) expect += damp / g.vgrid.spacing();
    for (int i = ic - 2; i <= ic + 2; ++i) {
      INFO("j=" << j << " v=" << g.vgrid.node(j) << " w=" << w);
      CHECK(g(i, j) == Approx(expect).margin(1e-10 * (1.0 + expect)));
    }
  }
}

TEST_CASE("duhamel_step conserves mass over many steps") {
  const double eps = 0.1;
  const double dt = eps / 4.0;
  KineticField f = make_field(eps, -4.0, 4.0, 201, 161);
  fill_point_source(f, 2.0 * f.xgrid.spacing());
  const double m0 = total_mass(f);
  REQUIRE(m0 > 0.0);
  const int steps = static_cast<int>(std::lround(10.0 / eps));
  StepDiagnostics diag;
  for (int n = 0; n < steps; ++n) f = duhamel_step(f, dt, {}, &diag);
  CHECK(!diag.dt_accuracy_warning);
  CHECK(std::abs(total_mass(f) - m0) / m0 <= 1e-8);

  // the accuracy warning fires when dt > eps
  (void)duhamel_step(f, 2.0 * eps, {}, &diag);
  CHECK(diag.dt_accuracy_warning);
}

TEST_CASE("reaction_step: r = 0 reduces to the relaxation step") {
  KineticField f = make_field(0.1, -2.0, 2.0, 41, 101);
  fill_equilibrium(f, 0.3);
  const KineticField a = reaction_step(f, 0.025, 0.0);
  DuhamelOptions opt;
  opt.mass_fix = false;
  const KineticField b = duhamel_step(f, 0.025, opt);
  REQUIRE(a.f.size() == b.f.size());
  for (std::size_t k = 0; k < a.f.size(); ++k) CHECK(a.f[k] == b.f[k]);
}

TEST_CASE("reaction_step: the saturated state is invariant") {
  KineticField f = make_field(0.1, -2.0, 2.0, 41, 101);
  fill_equilibrium(f, 1.0);  // f = sqrt(eps) M_eps, the ceiling
  const KineticField g = reaction_step(f, 0.025, 1.5);
  const int guard = 2 + static_cast<int>(0.025 * f.vgrid.hi() / f.xgrid.spacing());
  for (int j = 0; j < f.vgrid.size(); ++j)
    for (int i = guard; i < f.xgrid.size() - guard; ++i)
      CHECK(g(i, j) == Approx(f(i, j)).epsilon(1e-12));
  CHECK(max_principle_excess(g) <= 1e-15);
}

TEST_CASE("reaction_step: exact frozen-rho integration and r/eps growth") {
  const double eps = 0.1;
  const double r = 0.1;
  const double dt = eps / 4.0;
  KineticField f = make_field(eps, -4.0, 4.0, 81, 151);
  fill_equilibrium(f, 1e-6);

  // oracle: relaxation substep, then the exact solution of the frozen-rho
  // reaction ODE  f' = (r/eps) rho (M - f/sqrt(eps))
  DuhamelOptions opt;
  opt.mass_fix = false;
  const KineticField lin = duhamel_step(f, dt, opt);
  const std::vector<double> rho_lin = rho(lin);
  const KineticField g = reaction_step(f, dt, r);
  for (int j = 0; j < f.vgrid.size(); ++j) {
    const double cap = std::sqrt(eps) * maxwellian(eps, f.vgrid.node(j));
    for (int i = 0; i < f.xgrid.size(); ++i) {
      const double relax =
          std::exp(-r * rho_lin[static_cast<std::size_t>(i)] * dt / (eps * std::sqrt(eps)));
      const double expect = cap + (lin(i, j) - cap) * relax;
      CHECK(g(i, j) == Approx(expect).margin(1e-15 + 1e-12 * expect));
    }
  }

  // small-population Malthusian rate per macroscopic time is ~ r/eps;
  // measured at the center column, away from boundary outflow
  const int ic = f.xgrid.nearest(0.0);
  double m0 = 0.0, m1 = 0.0;
  for (int j = 0; j < f.vgrid.size(); ++j) {
    const double wj = (j == 0 || j == f.vgrid.size() - 1) ? 0.5 : 1.0;
    m0 += wj * f(ic, j);
    m1 += wj * g(ic, j);
  }
  const double rate = std::log(m1 / m0) / dt;
  CHECK(rate == Approx(r / eps).epsilon(0.05));
}

TEST_CASE("reaction_step: an over-ceiling field is rejected") {
  KineticField f = make_field(0.1, -2.0, 2.0, 41, 101);
  fill_equilibrium(f, 1.5);  // violates f <= sqrt(eps) M_eps from the start
  CHECK_THROWS_AS(reaction_step(f, 0.025, 1.0), MaxPrincipleViolation);
}

TEST_CASE("hopf_cole: values, equilibrium offset, monotonicity") {
  KineticField f = make_field(0.1, -1.0, 1.0, 5, 41);
  for (auto& v : f.f) v = std::exp(-5.0);
  const WKBField w = hopf_cole(f);
  for (int j = 0; j < f.vgrid.size(); ++j)
    for (int i = 0; i < f.xgrid.size(); ++i)
      CHECK(w.u[w.index(i, j)].value() == Approx(0.5).margin(1e-14));

  // equilibrium: b = u - v^2/2 is independent of v
  fill_equilibrium(f, 1.0);
  const WKBField we = hopf_cole(f);
  const double b0 = we.b[we.index(0, 0)].value();
  for (int j = 0; j < f.vgrid.size(); ++j)
    for (int i = 0; i < f.xgrid.size(); ++i)
      CHECK(we.b[we.index(i, j)].value() == Approx(b0).margin(1e-10));
  CHECK(b0 == Approx(0.5 * 0.1 * std::log(2.0 * 3.14159265358979324)).margin(1e-10));

  // f = 0 maps to +inf, and -eps log is order reversing
  KineticField z = f;
  z.f[0] = 0.0;
  CHECK(!hopf_cole(z).u[0].is_finite());
  KineticField bigger = f;
  for (auto& v : bigger.f) v *= 2.0;
  const WKBField wb = hopf_cole(bigger);
  for (std::size_t k = 1; k < wb.u.size(); ++k)
    CHECK(wb.u[k].value() <= we.u[k].value());
}

TEST_CASE("a priori bounds hold on a bounded-data run and catch corruption") {
  const double eps = 0.1;
  const double dt = eps / 4.0;
  // domain wide enough that the inflow transient on the fastest rows decays
  // to nothing before it reaches the measured window [-3, 3]
  KineticField f(eps, SpatialGrid(-8.0, 8.0, 321), VelocityGrid::centered(4.0, 161));
  // b0 = 0.3 tanh(x): bounded with bounded slopes, v-independent
  for (int j = 0; j < f.vgrid.size(); ++j) {
    const double v = f.vgrid.node(j);
    for (int i = 0; i < f.xgrid.size(); ++i) {
      const double b0 = 0.3 * std::tanh(f.xgrid.node(i));
      f.at(i, j) = std::exp(-(0.5 * v * v + b0) / eps);
    }
  }
  const int guard = 100;  // measure on [-3, 3]
  std::vector<WKBField> history;
  history.push_back(hopf_cole(f));
  for (int n = 0; n < 40; ++n) {
    f = duhamel_step(f, dt);
    if (n % 5 == 4) history.push_back(hopf_cole(f));
  }
  const AprioriReport rep = apriori_report(history, -1.0, guard);
  INFO("sup " << rep.sup_b.observed << "/" << rep.sup_b.allowed << " lipx "
              << rep.lip_x.observed << "/" << rep.lip_x.allowed << " lipv "
              << rep.lip_v.observed << "/" << rep.lip_v.allowed);
  CHECK(rep.all_ok());

  // deliberately corrupted field: violation flagged
  std::vector<WKBField> bad = history;
  const std::size_t mid = bad.back().index(160, 80);
  bad.back().b[mid] = ExtendedValue::finite(bad.back().b[mid].value() + 10.0);
  CHECK(!apriori_report(bad, -1.0, guard).all_ok());
}

TEST_CASE("compactly supported data stay above the explicit lower barrier") {
  const double eps = 0.1;
  const double dt = eps / 4.0;
  KineticField f = make_field(eps, -4.0, 4.0, 161, 161);
  // f0 = 1_{(-1,1)}(x) sqrt(eps) M_eps(v)
  for (int j = 0; j < f.vgrid.size(); ++j) {
    const double m = std::sqrt(eps) * maxwellian(eps, f.vgrid.node(j));
    for (int i = 0; i < f.xgrid.size(); ++i)
      f.at(i, j) = (std::abs(f.xgrid.node(i)) < 1.0) ? m : 0.0;
  }
  DuhamelOptions opt;
  opt.mass_fix = false;
  for (int n = 0; n < 40; ++n) f = duhamel_step(f, dt, opt);
  const WKBField w = hopf_cole(f);
  const double t = 40 * dt;
  for (int j = 0; j < f.vgrid.size(); ++j) {
    const double v = f.vgrid.node(j);
    if (std::abs(v) > 1.5) continue;
    for (int i = 0; i < f.xgrid.size(); ++i) {
      const double x = f.xgrid.node(i);
      if (std::abs(x) > 2.5) continue;
      const double apex = (std::abs(x) + 0.5 * t * std::abs(v) + 1.0) / (0.5 * t);
      const double barrier = 0.5 * v * v + t + 0.5 * apex * apex;
      REQUIRE(w.u[w.index(i, j)].is_finite());
      CHECK(w.u[w.index(i, j)].value() <= barrier + 1e-6);
    }
  }
}

TEST_CASE("WKB sanity at one epsilon: u stays near the kernel") {
  const double eps = 0.2;
  const double dt = eps / 4.0;
  KineticField f = make_field(eps, -2.56, 2.56, 201, 151);
  fill_point_source(f, 0.3);
  for (int n = 0; n < 20; ++n) f = duhamel_step(f, dt);
  const WKBField w = hopf_cole(f);
  // phi(1,.,.;0) jumps across the line x = v for |v| > 1 (the ballistic
  // candidate leaves the admissible set); the epsilon-layer around the jump
  // is excluded from the tight comparison and bounded separately.
  double sup_off_line = 0.0;
  double sup_full = 0.0;
  double constraint_excess = 0.0;
  for (int i = 0; i < f.xgrid.size(); ++i) {
    const double x = f.xgrid.node(i);
    if (std::abs(x) > 2.0) continue;
    ExtendedValue colmin = ExtendedValue::infinity();
    for (int j = 0; j < f.vgrid.size(); ++j) colmin = min(colmin, w.u[w.index(i, j)]);
    for (int j = 0; j < f.vgrid.size(); ++j) {
      const double v = f.vgrid.node(j);
      if (std::abs(v) > 2.0) continue;
      REQUIRE(w.u[w.index(i, j)].is_finite());
      const double u = w.u[w.index(i, j)].value();
      const double d = std::abs(u - phi(1.0, x, v, 0.0).value());
      sup_full = std::max(sup_full, d);
      // the mollified datum smears the jump over |x - tv| ~ sigma sqrt(2 jump)
      const bool near_jump = std::abs(v) > 0.9 && std::abs(x - v) < 1.0;
      if (!near_jump) sup_off_line = std::max(sup_off_line, d);
      constraint_excess = std::max(constraint_excess, u - colmin.value() - 0.5 * v * v);
    }
  }
  INFO("sup off line = " << sup_off_line << ", full = " << sup_full
                         << ", constraint excess = " << constraint_excess);
  CHECK(sup_off_line < 0.7);  // coarse epsilon: ~ eps |log eps| + quadrature
  CHECK(sup_full < 2.5);
  CHECK(constraint_excess >= 0.0);
  CHECK(constraint_excess <= 5.0 * eps);
}
