#include <random>

#include "doctest.h"
#include "lag/quadric.hpp"
#include "lag/group.hpp"

using namespace lag;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v(g(rng), g(rng), g(rng));
  return v.normalized();
}

Vec3 random_point(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

}  // namespace

TEST_CASE("inner products on basis vectors") {
  CHECK(inner(unit6(0), unit6(5)) == -1.0);
  CHECK(inner(unit6(2), unit6(2)) == 1.0);
  CHECK(inner(unit6(1), unit6(1)) == 0.0);
  CHECK(inner(unit6(1), unit6(4)) == -1.0);
  CHECK(lorentz_inner(Vec4(1, 0, 0, 0), Vec4(1, 0, 0, 0)) == -1.0);
  CHECK(lorentz_inner(Vec4(0, 1, 0, 0), Vec4(0, 1, 0, 0)) == 1.0);
  CHECK(lorentz_inner(Vec4(1, 1, 0, 0), Vec4(1, 1, 0, 0)) == 0.0);
}

TEST_CASE("inner agrees with the eta matrix") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    Vec6 a, b;
    for (int i = 0; i < 6; ++i) {
      a(i) = g(rng);
      b(i) = g(rng);
    }
    CHECK(inner(a, b) == doctest::Approx(a.dot(eta() * b)).epsilon(1e-14));
    CHECK(inner(a, b) == doctest::Approx(inner(b, a)).epsilon(1e-15));
  }
}

TEST_CASE("sphere embedding oracles") {
  Vec6 e;
  e << 1, 0, 0, 0, 0, 0;
  CHECK((embed_sphere(SphereElement{0.0, Vec3::Zero()}) - e).norm() == 0.0);
  e << 1, kInvSqrt2, 0, 0, kInvSqrt2, -0.5;
  CHECK((embed_sphere(SphereElement{1.0, Vec3::Zero()}) - e).norm() < 1e-16);
  e << 1, kSqrt2, 0, 0, 0, 0;
  CHECK((embed_sphere(SphereElement{1.0, Vec3(1, 0, 0)}) - e).norm() < 1e-15);
}

TEST_CASE("sphere extraction") {
  Vec6 a;
  a << 1, 0, 0, 0, 0, 0;
  auto s = extract_sphere(a);
  CHECK(s.r == 0.0);
  CHECK(s.p.norm() == 0.0);

  a << 2, kSqrt2, 0, 0, kSqrt2, -1;
  s = extract_sphere(a);
  CHECK(s.r == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.p.norm() < 1e-15);

  try {
    extract_sphere(unit6(1));
    FAIL("plane vector accepted as sphere");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotASphere);
  }
  Vec6 bad = embed_sphere(SphereElement{1.0, Vec3(1, 2, 3)});
  bad(5) += 0.5;
  CHECK_THROWS_AS(extract_sphere(bad), Error);
}

TEST_CASE("sphere embedding is null and projectively invertible") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double scale : {1.0, 1e3, 1e6}) {
    for (int k = 0; k < 100; ++k) {
      SphereElement s{scale * u(rng), random_point(rng, scale)};
      const Vec6 a = embed_sphere(s);
      CHECK(std::abs(inner(a, a)) <= 1e-15 * a.squaredNorm());
      const double lambda = k % 2 ? -3.7 : 0.02;
      const auto back = extract_sphere(lambda * a);
      const double tol = 1e-12 * std::max(1.0, scale);
      CHECK(std::abs(back.r - s.r) <= tol);
      CHECK((back.p - s.p).lpNorm<Eigen::Infinity>() <= tol);
    }
  }
}

TEST_CASE("plane embedding oracles and round trip") {
  Vec6 e;
  e << 0, 1, 0, 0, 0, 0;
  CHECK((embed_plane(PlaneElement{Vec3(1, 0, 0), 0.0}) - e).norm() == 0.0);
  e << 0, 0, 0, 0, 1, 0;
  CHECK((embed_plane(PlaneElement{Vec3(-1, 0, 0), 0.0}) - e).norm() == 0.0);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> hs(-5.0, 5.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    PlaneElement pl{random_unit(rng), hs(rng)};
    const Vec6 b = embed_plane(pl);
    CHECK(std::abs(inner(b, b)) < 1e-15);
    CHECK(b(1) + b(4) == doctest::Approx(1.0));
    const auto back = extract_plane(2.5 * b);
    worst = std::max({worst, (back.n - pl.n).norm(), std::abs(back.h - pl.h)});
  }
  CHECK(worst < 1e-12);

  CHECK_THROWS_AS(extract_plane(unit6(0)), Error);
  try {
    extract_plane(unit6(5));
    FAIL("e5 accepted as plane");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAPlane);
  }
}

TEST_CASE("oriented contact oracles") {
  const Vec6 s1 = embed_sphere(SphereElement{1.0, Vec3::Zero()});
  const Vec6 plane = embed_plane(PlaneElement{Vec3(1, 0, 0), -1.0});
  CHECK(oriented_contact(s1, plane));
  CHECK(oriented_contact(s1, embed_sphere(SphereElement{3.0, Vec3(2, 0, 0)})));
  CHECK_FALSE(oriented_contact(s1, embed_sphere(SphereElement{-3.0, Vec3(2, 0, 0)})));
  CHECK_FALSE(oriented_contact(s1, embed_plane(PlaneElement{Vec3(1, 0, 0), 1.0})));
}

TEST_CASE("sphere contact matches the elementary and Minkowski criteria") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int touching = 0;
  for (int k = 0; k < 1000; ++k) {
    SphereElement a{u(rng), random_point(rng, 2.0)};
    SphereElement b{u(rng), random_point(rng, 2.0)};
    if (k % 2 == 0) {
      // place b tangent to a along a random direction
      const double d = std::abs(b.r - a.r);
      b.p = a.p + d * random_unit(rng);
    }
    const bool quad = oriented_contact(embed_sphere(a), embed_sphere(b), 1e-9);
    const double gap = (a.p - b.p).norm() - std::abs(a.r - b.r);
    const Vec4 dv = sphere_to_minkowski(a) - sphere_to_minkowski(b);
    const double mink = lorentz_inner(dv, dv);
    if (std::abs(gap) > 1e-6) CHECK_FALSE(quad);
    if (std::abs(gap) < 1e-12) CHECK(quad);
    CHECK(quad == (std::abs(mink) <= 1e-9 * embed_sphere(a).norm() * embed_sphere(b).norm()));
    touching += quad;
  }
  CHECK(touching >= 500);
}

TEST_CASE("sphere-plane contact matches n.p = h + r") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const Vec3 n = random_unit(rng);
    SphereElement s{u(rng), random_point(rng, 2.0)};
    const double h = n.dot(s.p) - s.r + (k % 2 ? 0.0 : 0.3);
    const bool quad = oriented_contact(embed_sphere(s), embed_plane(PlaneElement{n, h}));
    CHECK(quad == (k % 2 == 1));
  }
}

TEST_CASE("contact elements") {
  ContactElement ce{Vec3::Zero(), Vec3(1, 0, 0)};
  const NullPlane np = contact_element_embed(ce);
  CHECK((np.a - unit6(0)).norm() == 0.0);
  CHECK((np.b - unit6(1)).norm() == 0.0);
  const auto back = contact_element_extract(np);
  CHECK(back.p.norm() == 0.0);
  CHECK((back.n - Vec3(1, 0, 0)).norm() == 0.0);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0, gram = 0.0;
  for (int k = 0; k < 1000; ++k) {
    ContactElement c{random_point(rng, 3.0), random_unit(rng)};
    const NullPlane p = contact_element_embed(c);
    gram = std::max({gram, std::abs(inner(p.a, p.a)), std::abs(inner(p.a, p.b)), std::abs(inner(p.b, p.b))});
    const auto r = contact_element_extract(p);
    worst = std::max({worst, (r.p - c.p).norm(), (r.n - c.n).norm()});
    if (k < 50) {
      // other spanning pairs
      const auto r2 = contact_element_extract(NullPlane{p.a + 2.0 * p.b, 3.0 * p.b});
      CHECK((r2.p - c.p).norm() < 1e-12);
      CHECK((r2.n - c.n).norm() < 1e-12);
      // every sphere of the pencil touches both generators
      const Vec6 line = p.a + u(rng) * p.b;
      CHECK(oriented_contact(line, p.a));
      CHECK(oriented_contact(line, p.b));
    }
  }
  CHECK(worst < 1e-12);
  CHECK(gram < 1e-12);
}

TEST_CASE("degenerate pencil is rejected") {
  try {
    contact_element_extract(NullPlane{unit6(1), unit6(5)});
    FAIL("plane through e5 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegeneratePencil);
  }
}
