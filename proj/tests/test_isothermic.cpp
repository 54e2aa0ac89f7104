#include <cmath>

#include "doctest.h"
#include "lag/isothermic.hpp"

using namespace lag;

namespace {

double field_max(const Field2<double>& f) {
  double m = 0.0;
  for (double v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("Blaschke residual") {
  const Grid2 g(33, 33, -1.0, 1.0, -1.0, 1.0);
  CHECK(blaschke_residual(catalog_potential("zero", g)).max == 0.0);
  CHECK(blaschke_residual(catalog_potential("linear", g, {{"a", 0.3}, {"b", -0.2}, {"c", 1.0}})).max < 1e-14);
  CHECK(blaschke_residual(catalog_potential("lncosh", g)).max < 1e-13);
  // u = x^2 y: u_xy + u_x u_y = 2x + 2x^3 y, whose Laplacian is 12 x y
  const auto r = blaschke_residual(catalog_potential("x2y", g));
  for (int j = 0; j < g.n2; j += 4)
    for (int i = 0; i < g.n1; i += 4) CHECK(std::abs(r.field(i, j)) == doctest::Approx(std::abs(12.0 * g.x1(i) * g.x2(j))).epsilon(1e-10));
  // the same operator from samples only
  const auto sampled = potential_from_samples(g, catalog_potential("x2y", g).u);
  const auto rs = blaschke_residual(sampled);
  CHECK(std::abs(rs.field(20, 24)) == doctest::Approx(12.0 * g.x1(20) * g.x2(24)).epsilon(1e-6));
}

TEST_CASE("calK integration") {
  const Grid2 g(33, 33, -1.0, 1.0, -1.0, 1.0);
  const auto z = calK_integrate(catalog_potential("zero", g));
  CHECK(field_max(z.value) == 0.0);

  const auto bf = catalog_potential("lncosh", g);
  const auto k = calK_integrate(bf);
  CHECK(k.value(bf.base_i(), bf.base_j()) == 0.0);
  CHECK(k.loop_residual < 1e-8);
  const auto kx = differentiate(k.value, 0, g.h1());
  const auto ky = differentiate(k.value, 1, g.h2());
  for (std::size_t n = 0; n < kx.size(); ++n) {
    CHECK(std::abs(kx[n] - k.eta_x[n]) < 1e-5);
    CHECK(std::abs(ky[n] - k.eta_y[n]) < 1e-5);
  }
  try {
    calK_integrate(catalog_potential("x2y", g));
    FAIL("non-Blaschke potential integrated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotClosed);
  }
}

TEST_CASE("invariants from a potential") {
  const Grid2 g(41, 9, -1.0, 1.0, -0.5, 0.5);
  const auto flat = invariants_from_potential(catalog_potential("zero", g), 0.7);
  for (std::size_t n = 0; n < g.size(); ++n) {
    CHECK(flat.inv.q1[n] == 0.0);
    CHECK(flat.inv.q2[n] == 0.0);
    CHECK(flat.J[n] == 0.0);
    CHECK(flat.W[n] == doctest::Approx(0.7));
    CHECK(flat.inv.p1[n] == doctest::Approx(0.7));
    CHECK(flat.inv.p3[n] == doctest::Approx(0.7));
    CHECK(flat.inv.p2[n] == 0.0);
  }
  const auto bf = catalog_potential("lncosh", g);
  const auto pi = invariants_from_potential(bf, 0.0);
  for (int i : {20, 40}) {
    const double x = g.x1(i);
    REQUIRE(std::abs(x - (i == 20 ? 0.0 : 1.0)) < 1e-15);
    const double sech = 1.0 / std::cosh(x);
    CHECK(std::abs(pi.inv.q1(i, 4)) < 1e-15);
    CHECK(pi.inv.q2(i, 4) == doctest::Approx(std::tanh(x) * sech).epsilon(1e-13));
    CHECK(pi.J(i, 4) == doctest::Approx(-0.5 * std::pow(sech, 4)).epsilon(1e-13));
  }
  // the special member: W e^{2u} is constant
  double lo = 1e300, hi = -1e300;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double k = pi.W[n] * std::exp(2.0 * bf.u[n]);
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  CHECK(hi - lo < 1e-7);
}

TEST_CASE("alpha^(m) entries and flatness") {
  const Grid2 g(17, 17, -1.0, 1.0, -1.0, 1.0);
  const auto a0 = assemble_alpha_m(catalog_potential("zero", g), 0.0);
  CHECK(flatness_residual(a0) < 1e-14);
  CHECK(algebra_residual(a0) < 1e-15);

  const auto bf = catalog_potential("lncosh", g);
  const auto a = assemble_alpha_m(bf, 0.4);
  for (auto [i, j] : {std::pair{0, 0}, {3, 11}, {8, 8}, {16, 2}, {12, 15}}) {
    const double eu = std::exp(bf.u(i, j));
    CHECK(a.mx(i, j)(2, 0) == doctest::Approx(eu).epsilon(1e-14));
    CHECK(a.mx(i, j)(3, 0) == 0.0);
    CHECK(a.my(i, j)(3, 0) == doctest::Approx(eu).epsilon(1e-14));
    CHECK(a.my(i, j)(2, 0) == 0.0);
  }
  CHECK(algebra_residual(a) < 1e-13);

  const Grid2 fine(128, 128, -1.0, 1.0, -1.0, 1.0);
  const auto bff = catalog_potential("lncosh", fine);
  for (double m : {-1.0, 0.0, 1.0}) CHECK(flatness_residual(assemble_alpha_m(bff, m), 6) < 1e-7);

  // noise in W_m breaks integrability
  auto pinv = invariants_from_potential(bf, 0.4);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double e = 1e-2 * std::sin(37.0 * n);
    pinv.inv.p1[n] += e;
    pinv.inv.p3[n] += e;
  }
  CHECK(flatness_residual(assemble_alpha_m(bf, pinv)) > 100 * default_tolerances().flat);
}

TEST_CASE("flatness converges under refinement") {
  std::vector<double> hs, errs;
  for (int n : {17, 33, 65}) {
    const Grid2 g(n, n, -1.0, 1.0, -1.0, 1.0);
    hs.push_back(g.h1());
    errs.push_back(flatness_residual(assemble_alpha_m(catalog_potential("lncosh", g), 0.5)));
  }
  CHECK(observed_order(hs, errs) > 3.5);
}

TEST_CASE("T-transforms of the special potential") {
  const Grid2 g(128, 128, -1.0, 1.0, -1.0, 1.0);
  const auto bf = catalog_potential("lncosh", g);
  const auto base = t_transform(bf, 0.0);
  CHECK(base.surface.legendre < 1e-6);
  CHECK(base.frame_mc < 1e-6);
  CHECK(base.potential_error < 1e-5);
  CHECK(base.frames.drift < 1e-8);
  CHECK(base.surface.invalid == 0);
  const auto fit0 = hyperplane_fit(base.surface.sigma.data());
  CHECK((fit0.kind == FitKind::Spacelike || fit0.kind == FitKind::Timelike || fit0.kind == FitKind::Isotropic));

  for (double m : {-1.0, -0.1, 0.1, 1.0}) {
    const auto r = t_transform(bf, m);
    const auto c = compare_to_base(bf, base, r);
    CHECK(c.J_diff < 1e-6);
    CHECK(c.W_diff < 1e-6);
    CHECK(r.k_recovered == doctest::Approx(m).epsilon(1e-7));
    CHECK(r.k_spread < 1e-6);
    CHECK(r.potential_error < 1e-5);
    CHECK(r.surface.legendre < 1e-6);
    const auto fit = hyperplane_fit(r.surface.sigma.data());
    CHECK((fit.kind == FitKind::SphereLike || fit.kind == FitKind::Lightcone));
  }

  const auto one = t_transform(bf, 1.0);
  const auto cls = classify(one.recomputed, 1e-5);
  CHECK(cls.is_generalized);
  CHECK_FALSE(cls.is_l_minimal);
  const auto audit = generalized_audit(one.recomputed);
  CHECK(audit.holomorphy < 1e-5);
  CHECK(audit.parallel < 1e-5);
  CHECK(audit.P_min > 0.1);
  CHECK(audit.ratio_cv < 1e-6);
  const auto mean = gauss_map_mean_curvature(one.recomputed);
  CHECK(mean.coefficient_max > 0.1);
}

TEST_CASE("special solver") {
  const Grid2 g(33, 33, -1.0, 1.0, -1.0, 1.0);
  const auto lin = solve_special(0.0, g, [](double x, double) { return x; });
  double err = 0.0;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) err = std::max(err, std::abs(lin.field.u(i, j) - g.x1(i)));
  CHECK(err < 1e-10);
  CHECK(lin.residual < 1e-10);

  std::vector<double> hs, errs;
  for (int n : {17, 33, 65}) {
    const Grid2 gn(n, n, -1.0, 1.0, -1.0, 1.0);
    const auto s = solve_special(1.0, gn, [](double x, double) { return std::log(std::cosh(x)); });
    CHECK(s.residual < 1e-10);
    CHECK(s.iterations <= 10);
    double e = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) e = std::max(e, std::abs(s.field.u(i, j) - std::log(std::cosh(gn.x1(i)))));
    hs.push_back(gn.h1());
    errs.push_back(e);
  }
  CHECK(observed_order(hs, errs) > 1.8);

  const Grid2 small(17, 17, -0.5, 0.5, -0.5, 0.5);
  const auto neg = solve_special(-1.0, small, [](double, double) { return 0.0; });
  CHECK(neg.residual < 1e-10);
  CHECK(neg.character_spread < 1e-8);
  CHECK(std::is_sorted(neg.residual_log.rbegin(), neg.residual_log.rend()));

  try {
    solve_special(1.0, g, [](double x, double y) { return 3.0 * x * y; }, 1e-10, 1);
    FAIL("one Newton step reported convergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NewtonDiverged);
  }
}
