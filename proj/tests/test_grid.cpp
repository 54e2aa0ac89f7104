#include <cmath>
#include <random>

#include "doctest.h"
#include "lag/connection.hpp"
#include "lag/grid.hpp"

using namespace lag;

TEST_CASE("Fornberg weights reproduce the classical central stencils") {
  const auto w1 = fd_weights(0.0, {-2, -1, 0, 1, 2}, 1);
  CHECK(w1[0] == doctest::Approx(1.0 / 12));
  CHECK(w1[1] == doctest::Approx(-8.0 / 12));
  CHECK(std::abs(w1[2]) < 1e-16);
  CHECK(w1[3] == doctest::Approx(8.0 / 12));
  CHECK(w1[4] == doctest::Approx(-1.0 / 12));
  const auto w2 = fd_weights(0.0, {-2, -1, 0, 1, 2}, 2);
  CHECK(w2[0] == doctest::Approx(-1.0 / 12));
  CHECK(w2[1] == doctest::Approx(16.0 / 12));
  CHECK(w2[2] == doctest::Approx(-30.0 / 12));
}

TEST_CASE("line stencils differentiate polynomials exactly") {
  const int n = 12;
  const double h = 0.1;
  for (int acc : {4, 6}) {
    for (int order : {1, 2, 3, 4}) {
      for (int i = 0; i < n; ++i) {
        const Stencil s = line_stencil(n, i, order, h, acc);
        // derivative of x^order / order! is 1
        double d = 0.0;
        for (std::size_t m = 0; m < s.nodes.size(); ++m)
          d += s.weights[m] * std::pow(s.nodes[m] * h, order) / std::tgamma(order + 1.0);
        CHECK(d == doctest::Approx(1.0).epsilon(1e-8));
        for (int node : s.nodes) {
          CHECK(node >= 0);
          CHECK(node < n);
        }
      }
    }
  }
}

TEST_CASE("differentiate converges at fourth order") {
  std::vector<double> hs, errs;
  for (int n : {17, 33, 65}) {
    const Grid2 g(n, 9, 0.0, 1.0, 0.0, 1.0);
    Field2<double> f(g);
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) f(i, j) = std::sin(3.0 * g.x1(i)) * std::exp(g.x2(j));
    const auto d = differentiate(f, 0, g.h1());
    double err = 0.0;
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) err = std::max(err, std::abs(d(i, j) - 3.0 * std::cos(3.0 * g.x1(i)) * std::exp(g.x2(j))));
    hs.push_back(g.h1());
    errs.push_back(err);
  }
  CHECK(observed_order(hs, errs) > 3.7);
  Field2<double> small(4, 4, 0.0);
  CHECK_THROWS_AS(differentiate(small, 0, 0.1), Error);
}

TEST_CASE("observed order of exact power laws") {
  CHECK(observed_order({0.1, 0.05, 0.025}, {3e-4, 3e-4 / 16, 3e-4 / 256}) == doctest::Approx(4.0));
  CHECK(observed_order({1.0, 0.5}, {1.0, 0.25}) == doctest::Approx(2.0));
}

TEST_CASE("cumulative integral and Gauss-Legendre") {
  const int n = 65;
  const double h = 2.0 / (n - 1);
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[i] = std::cos(-1.0 + i * h);
  const auto F = cumulative_integral(f, h);
  CHECK(F[0] == 0.0);
  for (int i = 0; i < n; ++i) CHECK(F[i] == doctest::Approx(std::sin(-1.0 + i * h) - std::sin(-1.0)).epsilon(1e-8));

  std::vector<double> x, w;
  gauss_legendre(8, 0.0, 2.0, x, w);
  double s = 0.0, p = 0.0;
  for (int k = 0; k < 8; ++k) {
    s += w[k];
    p += w[k] * std::pow(x[k], 15);
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p == doctest::Approx(std::pow(2.0, 16) / 16).epsilon(1e-13));
}

TEST_CASE("algebra completion") {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> g;
  const int slots[10][2] = {{1, 0}, {2, 0}, {3, 0}, {4, 0}, {1, 1}, {2, 1}, {3, 1}, {1, 2}, {1, 3}, {3, 2}};
  for (int k = 0; k < 20; ++k) {
    Mat6 m = Mat6::Zero();
    for (const auto& s : slots) m(s[0], s[1]) = g(rng);
    const Mat6 a = complete_algebra(m);
    CHECK(algebra_defect(a) < 1e-14);
    for (const auto& s : slots) CHECK(a(s[0], s[1]) == m(s[0], s[1]));
    CHECK(in_group(algebra_exp(0.3 * a), 1e-10));
  }
}

TEST_CASE("canonical connection slots") {
  const double w1 = 0.7, w2 = -0.4, q1 = 0.3, q2 = -1.1, p1 = 0.5, p2 = 0.2, p3 = -0.9;
  const Mat6 a = canonical_connection(w1, w2, q1, q2, p1, p2, p3);
  CHECK(a(2, 0) == w1);
  CHECK(a(3, 0) == w2);
  CHECK(a(2, 1) == w1);
  CHECK(a(3, 1) == -w2);
  CHECK(a(1, 1) == doctest::Approx(2 * q2 * w1 - 2 * q1 * w2));
  CHECK(a(3, 2) == doctest::Approx(q1 * w1 + q2 * w2));
  CHECK(a(1, 2) == doctest::Approx(p1 * w1 + p2 * w2));
  CHECK(a(1, 3) == doctest::Approx(p2 * w1 + p3 * w2));
  CHECK(a(1, 0) == 0.0);
  CHECK(a(4, 0) == 0.0);
  CHECK(algebra_defect(a) < 1e-15);
}

TEST_CASE("flatness of constant commuting coefficients and noise control") {
  const Grid2 g(11, 11, 0.0, 1.0, 0.0, 1.0);
  Mat6 mx = Mat6::Zero(), my = Mat6::Zero();
  mx(2, 0) = 1.0;
  my(3, 0) = 1.0;
  ConnectionForm cf{g, Field2<Mat6>(g, complete_algebra(mx)), Field2<Mat6>(g, complete_algebra(my))};
  CHECK(flatness_residual(cf) < 1e-13);
  CHECK(algebra_residual(cf) < 1e-15);

  ConnectionForm bent = cf;
  bent.my = Field2<Mat6>(g, canonical_connection(0.0, 1.0, 0.2, 0.1, 0.3, 0.0, -0.3));
  bent.mx = Field2<Mat6>(g, canonical_connection(1.0, 0.0, 0.2, 0.1, 0.3, 0.0, -0.3));
  CHECK(flatness_residual(bent) > 1e-2);
}

TEST_CASE("frame integration of a single-direction constant connection") {
  const Grid2 g(21, 21, 0.0, 1.0, 0.0, 0.5);
  const Mat6 m = canonical_connection(1.0, 0.5, 0.3, -0.2, 0.4, 0.1, -0.6);
  ConnectionForm cf{g, Field2<Mat6>(g, m), Field2<Mat6>(g, Mat6::Zero())};
  const Mat6 base = embed_euclidean(Mat3::Identity(), Vec3(0.1, 0.2, 0.3));
  const auto fi = integrate_frame(cf, base, 0, 0);
  double err = 0.0;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) err = std::max(err, (fi.frames(i, j) - base * algebra_exp(g.x1(i) * m)).cwiseAbs().maxCoeff());
  CHECK(err < 1e-10);
  CHECK(fi.path_dependence < 1e-10);
  CHECK(fi.drift < 1e-8);

  ConnectionForm zero{g, Field2<Mat6>(g, Mat6::Zero()), Field2<Mat6>(g, Mat6::Zero())};
  const auto fz = integrate_frame(zero, base, 3, 4);
  for (const Mat6& a : fz.frames.data()) CHECK((a - base).norm() == 0.0);
}

TEST_CASE("path dependence is enforced") {
  const Grid2 g(11, 11, 0.0, 1.0, 0.0, 1.0);
  ConnectionForm cf{g, Field2<Mat6>(g, canonical_connection(1.0, 0.0, 0.2, 0.1, 0.3, 0.0, -0.3)),
                    Field2<Mat6>(g, canonical_connection(0.0, 1.0, 0.2, 0.1, 0.3, 0.0, -0.3))};
  try {
    integrate_frame(cf, Mat6::Identity(), 0, 0);
    FAIL("non-flat connection integrated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PathDependence);
  }
  const auto audit = integrate_frame(cf, Mat6::Identity(), 0, 0, default_tolerances().flat, false);
  CHECK(audit.path_dependence > 1e-3);
}
