#include "lag/group.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace lag {

const Mat4& k_matrix() {
  static const Mat4 k = [] {
    Mat4 m;
    m << kInvSqrt2, kInvSqrt2, 0, 0,
         0, 0, 1, 0,
         0, 0, 0, 1,
         kInvSqrt2, -kInvSqrt2, 0, 0;
    return m;
  }();
  return k;
}

const Mat4& k_inverse() {
  static const Mat4 k = [] {
    Mat4 m;
    m << kInvSqrt2, 0, 0, kInvSqrt2,
         kInvSqrt2, 0, 0, -kInvSqrt2,
         0, 1, 0, 0,
         0, 0, 1, 0;
    return m;
  }();
  return k;
}

const Mat4& lorentz_metric() {
  static const Mat4 g = Eigen::Vector4d(-1, 1, 1, 1).asDiagonal();
  return g;
}

namespace {

// Form J = K^{-T} G K^{-1} used by the bottom row, *V W = V^T J W.
const Mat4& star_form() {
  static const Mat4 j = [] {
    Mat4 m = Mat4::Zero();
    m(0, 3) = m(3, 0) = -1.0;
    m(1, 1) = m(2, 2) = 1.0;
    return m;
  }();
  return j;
}

}  // namespace

bool is_restricted_lorentz(const Mat4& b, double tol) {
  const double scale = std::max(1.0, b.squaredNorm());
  if ((b.transpose() * lorentz_metric() * b - lorentz_metric()).norm() > tol * scale) return false;
  if (b(0, 0) < 1.0 - tol) return false;
  return std::abs(b.determinant() - 1.0) <= tol * scale;
}

bool is_rotation(const Mat3& r, double tol) {
  return (r.transpose() * r - Mat3::Identity()).norm() <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

namespace {

Mat6 assemble(const Mat4& b, const Vec4& v) {
  const Vec4 vt = k_matrix() * v;
  const Mat4 bt = k_matrix() * b * k_inverse();
  Mat6 a = Mat6::Zero();
  a(0, 0) = 1.0;
  a.block<4, 1>(1, 0) = vt;
  a.block<4, 4>(1, 1) = bt;
  a(5, 0) = 0.5 * lorentz_inner(v, v);
  a.block<1, 4>(5, 1) = vt.transpose() * star_form() * bt;
  a(5, 5) = 1.0;
  return a;
}

}  // namespace

Mat6 make_element(const Mat4& b, const Vec4& v) {
  if (!is_restricted_lorentz(b, 1e-8)) throw Error(ErrorCode::NotLorentz, "B is not a restricted Lorentz matrix");
  return assemble(b, v);
}

Mat6 embed_euclidean(const Mat3& r, const Vec3& v) {
  if (!is_rotation(r, 1e-8)) throw Error(ErrorCode::NotRotation, "R is not a rotation");
  return euclidean_generic<double>(r, v);
}

Mat4 lorentz_boost(const Vec3& b) {
  const double bb = b.squaredNorm();
  if (bb >= 1.0 - default_tolerances().boost_margin)
    throw Error(ErrorCode::SuperluminalVelocity, "|b| >= 1");
  const double beta = 1.0 / std::sqrt(1.0 - bb);
  Mat4 m = Mat4::Identity();
  m(0, 0) = beta;
  m.block<1, 3>(0, 1) = -beta * b.transpose();
  m.block<3, 1>(1, 0) = -beta * b;
  if (bb > 0.0) m.block<3, 3>(1, 1) += (beta - 1.0) / bb * b * b.transpose();
  return m;
}

Mat6 boost(const Vec3& b) { return assemble(lorentz_boost(b), Vec4::Zero()); }

Mat6 time_translation(double s) { return assemble(Mat4::Identity(), Vec4(s, 0, 0, 0)); }

GroupDefects group_defects(const Mat6& a) {
  GroupDefects d;
  d.orthogonality = (a.transpose() * eta() * a - eta()).norm();
  d.fixed_e5 = (a.col(5) - unit6(5)).norm();
  const Vec6 e14 = unit6(1) + unit6(4);
  d.orientation = -inner(Vec6(a * e14), e14);
  d.determinant = a.determinant();
  return d;
}

bool in_group(const Mat6& a, double tol) {
  const GroupDefects d = group_defects(a);
  const double scale = std::max(1.0, a.squaredNorm());
  return d.orthogonality <= tol * scale && d.fixed_e5 <= tol * scale && d.orientation >= 2.0 - tol * scale &&
         std::abs(d.determinant - 1.0) <= tol * scale;
}

double algebra_defect(const Mat6& a) {
  const Mat6 ea = eta() * a;
  return (ea + ea.transpose()).norm() + a.col(5).norm();
}

void poincare_parts(const Mat6& a, Mat4& b, Vec4& v) {
  v = k_inverse() * a.block<4, 1>(1, 0);
  b = k_inverse() * a.block<4, 4>(1, 1) * k_matrix();
}

Mat6 GroupDecomposition::recompose() const { return euclidean() * lag::boost(b) * time_translation(s); }

GroupDecomposition decompose(const Mat6& a, double tol) {
  const double scale = std::max(1.0, a.squaredNorm());
  const GroupDefects d = group_defects(a);
  if (d.orthogonality > 1e3 * tol * scale || d.fixed_e5 > 1e3 * tol * scale)
    throw Error(ErrorCode::InvalidElement, "matrix is not a Laguerre transformation");
  Mat4 b;
  Vec4 v;
  poincare_parts(a, b, v);
  if (b(0, 0) < 1.0 - 1e3 * tol) throw Error(ErrorCode::InvalidElement, "time orientation reversed");
  GroupDecomposition g;
  g.b = -b.block<1, 3>(0, 1).transpose() / b(0, 0);
  const Mat4 rhat = b * lorentz_boost(-g.b);
  g.rotation = rhat.block<3, 3>(1, 1);
  g.s = v(0) / b(0, 0);
  g.translation = v.tail<3>() - g.s * b.block<3, 1>(1, 0);
  return g;
}

Vec6 act(const Mat6& a, const Vec6& x) { return a * x; }

NullPlane act(const Mat6& a, const NullPlane& np) { return NullPlane{a * np.a, a * np.b}; }

ContactElement act(const Mat6& a, const ContactElement& ce) {
  return contact_element_extract(act(a, contact_element_embed(ce)));
}

SphereElement euclidean_on_sphere(const Mat3& r, const Vec3& v, const SphereElement& s) {
  return SphereElement{s.r, r * s.p + v};
}

SphereElement boost_on_sphere(const Vec3& b, const SphereElement& s) {
  const double bb = b.squaredNorm();
  if (bb >= 1.0 - default_tolerances().boost_margin)
    throw Error(ErrorCode::SuperluminalVelocity, "|b| >= 1");
  const double beta = 1.0 / std::sqrt(1.0 - bb);
  SphereElement out;
  out.r = beta * (s.r - b.dot(s.p));
  const double k = bb > 0.0 ? (beta - 1.0) * s.p.dot(b) / bb : 0.0;
  out.p = s.p + (k - beta * s.r) * b;
  return out;
}

SphereElement time_on_sphere(double shift, const SphereElement& s) { return SphereElement{s.r + shift, s.p}; }

SphereElement sphere_action(const Mat6& a, const SphereElement& s) {
  const GroupDecomposition g = decompose(a);
  return euclidean_on_sphere(g.rotation, g.translation, boost_on_sphere(g.b, time_on_sphere(g.s, s)));
}

Mat6 reorthonormalize(const Mat6& a) {
  Mat4 b;
  Vec4 v;
  poincare_parts(a, b, v);
  const Mat4& g = lorentz_metric();
  Mat4 c = b;
  Vec4 c0 = c.col(0);
  c0 /= std::sqrt(-(c0.transpose() * g * c0)(0));
  if (c0(0) < 0) c0 = -c0;
  c.col(0) = c0;
  for (int k = 1; k < 4; ++k) {
    Vec4 x = b.col(k);
    x += (x.transpose() * g * c0)(0) * c0;
    for (int j = 1; j < k; ++j) x -= (x.transpose() * g * c.col(j))(0) * c.col(j);
    x /= std::sqrt((x.transpose() * g * x)(0));
    c.col(k) = x;
  }
  return assemble(c, v);
}

Mat6 algebra_exp(const Mat6& m) { return m.exp(); }

}  // namespace lag
