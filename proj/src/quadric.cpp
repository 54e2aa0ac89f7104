#include "lag/quadric.hpp"

#include <Eigen/SVD>

namespace lag {

const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotASphere: return "NotASphere";
    case ErrorCode::NotAPlane: return "NotAPlane";
    case ErrorCode::DegeneratePencil: return "DegeneratePencil";
    case ErrorCode::NotLorentz: return "NotLorentz";
    case ErrorCode::NotRotation: return "NotRotation";
    case ErrorCode::SuperluminalVelocity: return "SuperluminalVelocity";
    case ErrorCode::InvalidElement: return "InvalidElement";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::NotImmersed: return "NotImmersed";
    case ErrorCode::UmbilicPoint: return "UmbilicPoint";
    case ErrorCode::ParabolicPoint: return "ParabolicPoint";
    case ErrorCode::IllConditionedCoframe: return "IllConditionedCoframe";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::PathDependence: return "PathDependence";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::NotIntegralElement: return "NotIntegralElement";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::IllPosedGrowth: return "IllPosedGrowth";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return 2;
    case ErrorCode::IoError: return 3;
    default: return 4;
  }
}

Vec6 unit6(int i) {
  Vec6 e = Vec6::Zero();
  e(i) = 1.0;
  return e;
}

const Mat6& eta() {
  static const Mat6 m = [] {
    Mat6 e = Mat6::Zero();
    e(0, 5) = e(5, 0) = -1.0;
    e(1, 4) = e(4, 1) = -1.0;
    e(2, 2) = e(3, 3) = 1.0;
    return e;
  }();
  return m;
}

double lorentz_inner(const Vec4& v, const Vec4& w) {
  return -v(0) * w(0) + v(1) * w(1) + v(2) * w(2) + v(3) * w(3);
}

Vec6 embed_sphere(const SphereElement& s) { return embed_sphere<double>(s.r, s.p); }

Vec6 embed_plane(const PlaneElement& pl) {
  // Any point with n.p = h represents the plane.
  const Vec3 p = pl.n * pl.h;
  return embed_plane<double>(pl.n, p);
}

bool is_null(const Vec6& a, double tol) { return std::abs(inner(a, a)) <= tol * a.squaredNorm(); }

SphereElement extract_sphere(const Vec6& a, double tol) {
  if (std::abs(a(0)) <= tol * a.segment<4>(1).norm() || a(0) == 0.0)
    throw Error(ErrorCode::NotASphere, "zero 0-component");
  if (!is_null(a, tol * 10)) throw Error(ErrorCode::NotASphere, "vector is not null");
  const Vec6 s = a / a(0);
  SphereElement out;
  out.r = (s(1) + s(4)) * kInvSqrt2;
  out.p = Vec3((s(1) - s(4)) * kInvSqrt2, s(2), s(3));
  return out;
}

PlaneElement extract_plane(const Vec6& b, double tol) {
  const double scale = b.norm();
  if (scale == 0.0) throw Error(ErrorCode::NotAPlane, "zero vector");
  if (std::abs(b(0)) > tol * scale) throw Error(ErrorCode::NotAPlane, "nonzero 0-component");
  const double w = b(1) + b(4);
  if (std::abs(w) <= tol * scale)
    throw Error(ErrorCode::NotAPlane, "vector proportional to e5 or outside the plane chart");
  const Vec6 s = b / w;
  PlaneElement out;
  out.n = Vec3(s(1) - s(4), kSqrt2 * s(2), kSqrt2 * s(3));
  out.h = kSqrt2 * s(5);
  return out;
}

bool oriented_contact(const Vec6& u, const Vec6& v, double tol) {
  return std::abs(inner(u, v)) <= tol * u.norm() * v.norm();
}

NullPlane contact_element_embed(const ContactElement& ce) {
  NullPlane np;
  np.a = embed_sphere<double>(0.0, ce.p);
  np.b = embed_plane<double>(ce.n, ce.p);
  return np;
}

ContactElement contact_element_extract(const NullPlane& np, double tol) {
  const double sa = np.a.norm(), sb = np.b.norm();
  if (sa == 0.0 || sb == 0.0) throw Error(ErrorCode::DegeneratePencil, "zero generator");
  const Vec6 a = np.a / sa, b = np.b / sb;
  // e5 must not lie in the span: [a; b; e5] has rank 3.
  Eigen::Matrix<double, 3, 6> m;
  m.row(0) = a.transpose();
  m.row(1) = b.transpose();
  m.row(2) = unit6(5).transpose();
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 6>> svd(m);
  if (svd.singularValues()(2) <= tol * 10) throw Error(ErrorCode::DegeneratePencil, "span contains e5");

  const double ca = a(1) + a(4), cb = b(1) + b(4);
  const Vec6 pt = a * cb - b * ca;
  if (std::abs(pt(0)) <= tol * pt.norm() || pt.norm() <= tol)
    throw Error(ErrorCode::DegeneratePencil, "no point sphere in the pencil");
  const Vec6 pl = a * b(0) - b * a(0);
  const double w = pl(1) + pl(4);
  if (pl.norm() <= tol || std::abs(w) <= tol * pl.norm())
    throw Error(ErrorCode::DegeneratePencil, "no plane in the pencil");
  ContactElement ce;
  ce.p = Vec3((pt(1) - pt(4)) * kInvSqrt2, pt(2), pt(3)) / pt(0);
  ce.n = Vec3(pl(1) - pl(4), kSqrt2 * pl(2), kSqrt2 * pl(3)) / w;
  return ce;
}

Vec4 sphere_to_minkowski(const SphereElement& s) { return Vec4(s.r, s.p(0), s.p(1), s.p(2)); }

SphereElement minkowski_to_sphere(const Vec4& v) {
  SphereElement s;
  s.r = v(0);
  s.p = v.tail<3>();
  return s;
}

}  // namespace lag
