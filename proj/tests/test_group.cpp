#include <cmath>
#include <random>

#include "doctest.h"
#include "lag/acceptance.hpp"
#include "lag/connection.hpp"
#include "lag/group.hpp"

using namespace lag;

namespace {

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = g(rng);
  Eigen::HouseholderQR<Mat3> qr(m);
  Mat3 q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

Vec3 random_velocity(std::mt19937_64& rng, double vmax) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, vmax);
  return Vec3(g(rng), g(rng), g(rng)).normalized() * u(rng);
}

Mat4 random_lorentz(std::mt19937_64& rng) {
  Mat4 r = Mat4::Identity();
  r.bottomRightCorner<3, 3>() = random_rotation(rng);
  return lorentz_boost(random_velocity(rng, 0.8)) * r;
}

double max_abs(const Mat6& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("identity constructors") {
  CHECK(max_abs(make_element(Mat4::Identity(), Vec4::Zero()) - Mat6::Identity()) < 1e-15);
  CHECK(max_abs(embed_euclidean(Mat3::Identity(), Vec3::Zero()) - Mat6::Identity()) == 0.0);
  CHECK(max_abs(boost(Vec3::Zero()) - Mat6::Identity()) < 1e-15);
  CHECK(max_abs(time_translation(0.0) - Mat6::Identity()) < 1e-15);
  const auto d = decompose(Mat6::Identity());
  CHECK((d.rotation - Mat3::Identity()).norm() < 1e-15);
  CHECK(d.translation.norm() < 1e-15);
  CHECK(d.b.norm() < 1e-15);
  CHECK(std::abs(d.s) < 1e-15);
}

TEST_CASE("quarter turn about z, written out") {
  Mat3 r;
  r << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  const Mat6 a = embed_euclidean(r, Vec3::Zero());
  Mat6 expect;
  expect << 1, 0, 0, 0, 0, 0,                       //
      0, 0.5, -kInvSqrt2, 0, 0.5, 0,                 //
      0, kInvSqrt2, 0, 0, -kInvSqrt2, 0,             //
      0, 0, 0, 1, 0, 0,                              //
      0, 0.5, kInvSqrt2, 0, 0.5, 0,                  //
      0, 0, 0, 0, 0, 1;
  CHECK(max_abs(a - expect) < 1e-16);
  Vec6 e14 = unit6(1) + unit6(4);
  CHECK((a * e14 - e14).norm() < 1e-15);
}

TEST_CASE("semidirect product law") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Mat4 b1 = random_lorentz(rng), b2 = random_lorentz(rng);
    const Vec4 v1(g(rng), g(rng), g(rng), g(rng)), v2(g(rng), g(rng), g(rng), g(rng));
    const Mat6 lhs = make_element(b1, v1) * make_element(b2, v2);
    const Mat6 rhs = make_element(b1 * b2, v1 + b1 * v2);
    worst = std::max(worst, max_abs(lhs - rhs));
    CHECK(in_group(lhs, 1e-9));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("make_element rejects non-Lorentz blocks") {
  Mat4 b = Mat4::Identity();
  b(0, 1) = 0.3;
  CHECK_THROWS_AS(make_element(b, Vec4::Zero()), Error);
  Mat4 flip = Mat4::Identity();
  flip(0, 0) = -1;
  flip(1, 1) = -1;
  CHECK_THROWS_AS(make_element(flip, Vec4::Zero()), Error);
  Mat3 refl = Mat3::Identity();
  refl(2, 2) = -1;
  try {
    embed_euclidean(refl, Vec3::Zero());
    FAIL("reflection accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotRotation);
  }
}

TEST_CASE("time translation oracles") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const auto s = extract_sphere(act(time_translation(2.0), embed_sphere(SphereElement{1.0, p})));
    CHECK(s.r == doctest::Approx(3.0).epsilon(1e-14));
    CHECK((s.p - p).norm() < 1e-13);
    const double r = u(rng);
    const Vec6 shifted = make_element(Mat4::Identity(), Vec4(1, 0, 0, 0)) * embed_sphere(SphereElement{r, p});
    const auto t = extract_sphere(shifted);
    CHECK(t.r == doctest::Approx(r + 1.0).epsilon(1e-13));
  }
  CHECK(max_abs(time_translation(0.3) * time_translation(-1.1) - time_translation(-0.8)) < 1e-15);
}

TEST_CASE("boost oracles") {
  const Vec3 b(0.5, 0.0, 0.0);
  const auto s0 = extract_sphere(act(boost(b), embed_sphere(SphereElement{0.0, Vec3::Zero()})));
  CHECK(std::abs(s0.r) < 1e-15);
  CHECK(s0.p.norm() < 1e-15);
  const auto s1 = extract_sphere(act(boost(b), embed_sphere(SphereElement{1.0, Vec3::Zero()})));
  CHECK(s1.r == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(s1.p(0) == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(std::abs(s1.p(1)) + std::abs(s1.p(2)) < 1e-15);
  const auto closed = boost_on_sphere(b, SphereElement{1.0, Vec3::Zero()});
  CHECK(closed.r == doctest::Approx(s1.r).epsilon(1e-14));
  CHECK((closed.p - s1.p).norm() < 1e-14);
  CHECK((lorentz_boost(Vec3(0.1, -0.3, 0.2)) - lorentz_boost(Vec3(0.1, -0.3, 0.2)).transpose()).norm() < 1e-16);
  try {
    boost(Vec3(0.6, 0.8, 0.0));
    FAIL("light-speed boost accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SuperluminalVelocity);
  }
}

TEST_CASE("decomposition") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const Vec3 b0 = random_velocity(rng, 0.9);
    const auto d = decompose(boost(b0));
    CHECK((d.b - b0).norm() < 1e-12);
    CHECK((d.rotation - Mat3::Identity()).norm() < 1e-12);
    CHECK(d.translation.norm() < 1e-12);
    CHECK(std::abs(d.s) < 1e-12);
  }
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Mat3 r = random_rotation(rng);
    const Vec3 v(u(rng), u(rng), u(rng)), b = random_velocity(rng, 0.9);
    const double s = u(rng);
    const Mat6 a = embed_euclidean(r, v) * boost(b) * time_translation(s);
    const auto d = decompose(a);
    worst = std::max({worst, (d.rotation - r).cwiseAbs().maxCoeff(), (d.translation - v).cwiseAbs().maxCoeff(),
                      (d.b - b).cwiseAbs().maxCoeff(), std::abs(d.s - s)});
    CHECK(max_abs(d.recompose() - a) < 1e-10);
  }
  CHECK(worst < 1e-9);
  Mat6 bad = Mat6::Identity();
  bad(2, 3) = 0.5;
  CHECK_THROWS_AS(decompose(bad), Error);
}

TEST_CASE("actions") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> g;
  // identity and e5
  const Vec6 x = embed_sphere(SphereElement{0.4, Vec3(1, 2, 3)});
  CHECK((act(Mat6::Identity(), x) - x).norm() == 0.0);
  for (int k = 0; k < 20; ++k) {
    const Mat6 a = random_laguerre(rng);
    CHECK((act(a, unit6(5)) - unit6(5)).norm() == 0.0);
  }
  // Euclidean action on spheres and contact elements
  for (int k = 0; k < 100; ++k) {
    const Mat3 r = random_rotation(rng);
    const Vec3 v(u(rng), u(rng), u(rng));
    const SphereElement s{u(rng), Vec3(u(rng), u(rng), u(rng))};
    const auto t = extract_sphere(act(embed_euclidean(r, v), embed_sphere(s)));
    CHECK(t.r == doctest::Approx(s.r).epsilon(1e-12));
    CHECK((t.p - (r * s.p + v)).norm() < 1e-12);
    const ContactElement ce{Vec3(u(rng), u(rng), u(rng)), Vec3(g(rng), g(rng), g(rng)).normalized()};
    const auto ct = act(embed_euclidean(r, v), ce);
    CHECK((ct.p - (r * ce.p + v)).norm() < 1e-12);
    CHECK((ct.n - r * ce.n).norm() < 1e-12);
  }
}

TEST_CASE("contact is preserved by the group") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> g;
  std::vector<Mat6> group;
  for (int k = 0; k < 20; ++k) group.push_back(random_laguerre(rng));
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const SphereElement s{u(rng), Vec3(u(rng), u(rng), u(rng))};
    const Vec3 n = Vec3(g(rng), g(rng), g(rng)).normalized();
    const Vec6 sa = embed_sphere(s);
    const Vec6 pb = embed_plane(PlaneElement{n, n.dot(s.p) - s.r});
    REQUIRE(oriented_contact(sa, pb));
    const Mat6& a = group[k % group.size()];
    CHECK(oriented_contact(act(a, sa), act(a, pb)));
    ++checked;
  }
  CHECK(checked == 1000);
  for (int k = 0; k < 100; ++k) {
    const ContactElement ce{Vec3(u(rng), u(rng), u(rng)), Vec3(g(rng), g(rng), g(rng)).normalized()};
    const auto out = act(group[k % group.size()], ce);
    CHECK(std::abs(out.n.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("closed-form sphere action agrees with the matrix action") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Mat6 a = random_laguerre(rng);
    const SphereElement s{u(rng), Vec3(u(rng), u(rng), u(rng))};
    const auto m = extract_sphere(act(a, embed_sphere(s)));
    const auto c = sphere_action(a, s);
    CHECK(std::abs(m.r - c.r) < 1e-12);
    CHECK((m.p - c.p).norm() < 1e-12);
  }
}

TEST_CASE("group closure, drift and reorthonormalization") {
  std::mt19937_64 rng(67);
  Mat6 prod = Mat6::Identity();
  for (int k = 0; k < 100; ++k) {
    prod = prod * random_laguerre(rng);
    if (k % 10 == 0) CHECK(in_group(prod, 1e-8));
  }
  const auto d = group_defects(prod);
  CHECK(d.orthogonality < 1e-8 * std::max(1.0, prod.squaredNorm()));
  CHECK(d.orientation >= 2.0 - 1e-9);

  Mat6 noisy = random_laguerre(rng);
  std::uniform_real_distribution<double> u(-1e-7, 1e-7);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) noisy(i, j) += u(rng);
  const Mat6 fixed = reorthonormalize(noisy);
  CHECK(group_defects(fixed).orthogonality < 1e-14 * std::max(1.0, fixed.squaredNorm()));
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const Vec6 s = embed_sphere(SphereElement{w(rng), Vec3(w(rng), w(rng), w(rng))});
    const Vec6 a = noisy * s, b = fixed * s;
    CHECK((a / a(0) - b / b(0)).norm() < 1e-5);
  }
}

TEST_CASE("Maurer-Cartan residual") {
  const Grid2 g(17, 17, 0.0, 1.0, 0.0, 1.0);
  Field2<Mat6> constant(g, embed_euclidean(Mat3::Identity(), Vec3(1, 2, 3)));
  auto r = maurer_cartan_residual(g, constant);
  CHECK(r.curvature < 1e-20);
  CHECK(r.algebra < 1e-12);

  // commuting nilpotent generators (translations)
  auto slot = [](int i, int j) {
    Mat6 m = Mat6::Zero();
    m(i, j) = 1.0;
    return complete_algebra(m);
  };
  const Mat6 n1 = slot(2, 0), n2 = slot(3, 0);
  REQUIRE(max_abs(n1 * n2 - n2 * n1) < 1e-15);
  for (int n : {9, 17, 33}) {
    const Grid2 gn(n, n, 0.0, 1.0, 0.0, 1.0);
    Field2<Mat6> f(gn);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) f(i, j) = algebra_exp(gn.x1(i) * n1) * algebra_exp(gn.x2(j) * n2);
    const auto res = maurer_cartan_residual(gn, f);
    CHECK(res.curvature < 1e-10);
    CHECK(res.algebra < 1e-10);
  }
  const Grid2 tiny(4, 9, 0, 1, 0, 1);
  try {
    maurer_cartan_residual(tiny, Field2<Mat6>(tiny, Mat6::Identity()));
    FAIL("4 nodes accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridTooSmall);
  }
}

TEST_CASE("algebra exponential against a closed form") {
  // a nilpotent element of the algebra: exp is a finite sum
  const Mat6 n = canonical_connection(0.3, -0.2, 0, 0, 0, 0, 0);
  const Mat6 closed = Mat6::Identity() + n + n * n / 2.0 + n * n * n / 6.0 + n * n * n * n / 24.0;
  CHECK(max_abs(algebra_exp(n) - closed) < 1e-15);
  CHECK(in_group(algebra_exp(canonical_connection(0.4, 0.1, 0.3, -0.2, 0.5, 0.1, -0.5)), 1e-12));
}
