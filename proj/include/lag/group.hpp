#pragma once

#include <vector>

#include "lag/quadric.hpp"

namespace lag {

template <class S>
using M6 = Eigen::Matrix<S, 6, 6>;

// Coordinate change between R^{3,1} and the middle block of R^{4,2}.
const Mat4& k_matrix();
const Mat4& k_inverse();
// diag(-1, 1, 1, 1)
const Mat4& lorentz_metric();

bool is_restricted_lorentz(const Mat4& b, double tol = default_tolerances().rel);
bool is_rotation(const Mat3& r, double tol = default_tolerances().rel);

Mat6 make_element(const Mat4& b, const Vec4& v);
Mat6 embed_euclidean(const Mat3& r, const Vec3& v);
Mat4 lorentz_boost(const Vec3& b);
Mat6 boost(const Vec3& b);
Mat6 time_translation(double s);

// A^{-1} = eta A^T eta for A in the group.
template <class S>
M6<S> group_inverse(const M6<S>& a) {
  return eta() * a.transpose() * eta();
}
inline Mat6 group_inverse(const Mat6& a) { return eta() * a.transpose() * eta(); }

struct GroupDefects {
  double orthogonality = 0.0;  // |A^T eta A - eta|
  double fixed_e5 = 0.0;       // |A e5 - e5|
  double orientation = 0.0;    // -<A(e1+e4), e1+e4>, must be >= 2
  double determinant = 0.0;
};
GroupDefects group_defects(const Mat6& a);
bool in_group(const Mat6& a, double tol = default_tolerances().rel);

// |eta a + a^T eta| + |last column|
double algebra_defect(const Mat6& a);

struct GroupDecomposition {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  Vec3 b = Vec3::Zero();  // boost velocity
  double s = 0.0;         // time translation
  Mat6 euclidean() const { return embed_euclidean(rotation, translation); }
  Mat6 recompose() const;
};

// A = E * A(b) * T(s). The Lorentz part is B = R_hat * B_b, so the velocity
// is read off the first row of B.
GroupDecomposition decompose(const Mat6& a, double tol = default_tolerances().rel);

// Lorentz block and translation of A = A(B; V).
void poincare_parts(const Mat6& a, Mat4& b, Vec4& v);

Vec6 act(const Mat6& a, const Vec6& x);
NullPlane act(const Mat6& a, const NullPlane& np);
ContactElement act(const Mat6& a, const ContactElement& ce);

// Closed-form sphere actions.
SphereElement euclidean_on_sphere(const Mat3& r, const Vec3& v, const SphereElement& s);
SphereElement boost_on_sphere(const Vec3& b, const SphereElement& s);
SphereElement time_on_sphere(double shift, const SphereElement& s);
// Applies the factors of decompose(a) in turn.
SphereElement sphere_action(const Mat6& a, const SphereElement& s);

// Restores A^T eta A = eta by Lorentz Gram-Schmidt of the Poincare part.
Mat6 reorthonormalize(const Mat6& a);

// Scaling-and-squaring exponential of a Lie algebra element.
Mat6 algebra_exp(const Mat6& m);

// Euclidean element A(R_hat; v_hat) written out entrywise, for generic scalars.
// The columns of r are the images of the coordinate axes.
template <class S>
M6<S> euclidean_generic(const Eigen::Matrix<S, 3, 3>& r, const V3<S>& v) {
  M6<S> a;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = S(0.0);
  const S rv0 = r(0, 0) * v(0) + r(1, 0) * v(1) + r(2, 0) * v(2);
  const S rv1 = r(0, 1) * v(0) + r(1, 1) * v(1) + r(2, 1) * v(2);
  const S rv2 = r(0, 2) * v(0) + r(1, 2) * v(1) + r(2, 2) * v(2);
  a(0, 0) = S(1.0);
  a(1, 0) = v(0) * kInvSqrt2;
  a(1, 1) = (1.0 + r(0, 0)) * 0.5;
  a(1, 2) = r(0, 1) * kInvSqrt2;
  a(1, 3) = r(0, 2) * kInvSqrt2;
  a(1, 4) = (1.0 - r(0, 0)) * 0.5;
  a(2, 0) = v(1);
  a(2, 1) = r(1, 0) * kInvSqrt2;
  a(2, 2) = r(1, 1);
  a(2, 3) = r(1, 2);
  a(2, 4) = -r(1, 0) * kInvSqrt2;
  a(3, 0) = v(2);
  a(3, 1) = r(2, 0) * kInvSqrt2;
  a(3, 2) = r(2, 1);
  a(3, 3) = r(2, 2);
  a(3, 4) = -r(2, 0) * kInvSqrt2;
  a(4, 0) = -v(0) * kInvSqrt2;
  a(4, 1) = (1.0 - r(0, 0)) * 0.5;
  a(4, 2) = -r(0, 1) * kInvSqrt2;
  a(4, 3) = -r(0, 2) * kInvSqrt2;
  a(4, 4) = (1.0 + r(0, 0)) * 0.5;
  a(5, 0) = (v(0) * v(0) + v(1) * v(1) + v(2) * v(2)) * 0.5;
  a(5, 1) = rv0 * kInvSqrt2;
  a(5, 2) = rv1;
  a(5, 3) = rv2;
  a(5, 4) = -rv0 * kInvSqrt2;
  a(5, 5) = S(1.0);
  return a;
}

// Element X(d; b; x) of the isotropy subgroup L0 of a contact element.
template <class S>
M6<S> l0_element(const S& d1, const S& d2, const Eigen::Matrix<S, 2, 2>& b, const Eigen::Matrix<S, 2, 1>& x) {
  M6<S> m;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) m(i, j) = S(0.0);
  const S xt0 = d2 * (x(0) * b(0, 0) + x(1) * b(1, 0));
  const S xt1 = d2 * (x(0) * b(0, 1) + x(1) * b(1, 1));
  const S inv = 1.0 / d2;
  m(0, 0) = S(1.0);
  m(1, 0) = d1;
  m(1, 1) = d2;
  m(1, 2) = xt0;
  m(1, 3) = xt1;
  m(1, 4) = d2 * (x(0) * x(0) + x(1) * x(1)) * 0.5;
  m(2, 2) = b(0, 0);
  m(2, 3) = b(0, 1);
  m(2, 4) = x(0);
  m(3, 2) = b(1, 0);
  m(3, 3) = b(1, 1);
  m(3, 4) = x(1);
  m(4, 4) = inv;
  m(5, 4) = -d1 * inv;
  m(5, 5) = S(1.0);
  return m;
}

}  // namespace lag
