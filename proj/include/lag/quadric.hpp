#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "lag/config.hpp"
#include "lag/error.hpp"

namespace lag {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

template <class S>
using V3 = Eigen::Matrix<S, 3, 1>;
template <class S>
using V6 = Eigen::Matrix<S, 6, 1>;

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kSqrt2 = 1.41421356237309504880;

// Standard basis vector e_i of R^6.
Vec6 unit6(int i);

// The (4,2) form <a,b> = a^T eta b.
const Mat6& eta();

template <class S>
S inner(const V6<S>& a, const V6<S>& b) {
  return -(a(0) * b(5) + a(5) * b(0)) - (a(1) * b(4) + a(4) * b(1)) + a(2) * b(2) + a(3) * b(3);
}
inline double inner(const Vec6& a, const Vec6& b) { return inner<double>(a, b); }

// (V,W) = -V0 W0 + V1 W1 + V2 W2 + V3 W3
double lorentz_inner(const Vec4& v, const Vec4& w);

struct SphereElement {
  double r = 0.0;  // signed radius; 0 marks a point sphere
  Vec3 p = Vec3::Zero();
};

struct PlaneElement {
  Vec3 n = Vec3::UnitX();  // unit normal
  double h = 0.0;          // height n.p
};

struct ContactElement {
  Vec3 p = Vec3::Zero();
  Vec3 n = Vec3::UnitX();
};

struct NullPlane {
  Vec6 a = Vec6::Zero();
  Vec6 b = Vec6::Zero();
};

template <class S>
V6<S> embed_sphere(const S& r, const V3<S>& p) {
  V6<S> a;
  a << S(1.0), (r + p(0)) * kInvSqrt2, p(1), p(2), (r - p(0)) * kInvSqrt2,
      (p(0) * p(0) + p(1) * p(1) + p(2) * p(2) - r * r) * 0.5;
  return a;
}

// Plane through p with unit normal n.
template <class S>
V6<S> embed_plane(const V3<S>& n, const V3<S>& p) {
  V6<S> b;
  b << S(0.0), (1.0 + n(0)) * 0.5, n(1) * kInvSqrt2, n(2) * kInvSqrt2, (1.0 - n(0)) * 0.5,
      (n(0) * p(0) + n(1) * p(1) + n(2) * p(2)) * kInvSqrt2;
  return b;
}

Vec6 embed_sphere(const SphereElement& s);
Vec6 embed_plane(const PlaneElement& pl);

// Null up to tol relative to |a|^2.
bool is_null(const Vec6& a, double tol = default_tolerances().rel);

SphereElement extract_sphere(const Vec6& a, double tol = default_tolerances().rel);
PlaneElement extract_plane(const Vec6& b, double tol = default_tolerances().rel);

bool oriented_contact(const Vec6& u, const Vec6& v, double tol = default_tolerances().rel);

NullPlane contact_element_embed(const ContactElement& ce);
ContactElement contact_element_extract(const NullPlane& np, double tol = default_tolerances().rel);

// Pencil extraction written for generic scalars; the caller guarantees that
// the two denominators are away from zero.
template <class S>
void extract_contact_generic(const V6<S>& a, const V6<S>& b, V3<S>& p, V3<S>& n) {
  const S ca = a(1) + a(4);
  const S cb = b(1) + b(4);
  const V6<S> pt = a * cb - b * ca;  // point sphere: pt1 + pt4 = 0
  const S inv0 = 1.0 / pt(0);
  p << (pt(1) - pt(4)) * kInvSqrt2 * inv0, pt(2) * inv0, pt(3) * inv0;
  const V6<S> pl = a * b(0) - b * a(0);  // plane: pl0 = 0
  const S inv1 = 1.0 / (pl(1) + pl(4));
  n << (pl(1) - pl(4)) * inv1, kSqrt2 * pl(2) * inv1, kSqrt2 * pl(3) * inv1;
}

// Minkowski coordinates V = (r, p) of a sphere, and back.
Vec4 sphere_to_minkowski(const SphereElement& s);
SphereElement minkowski_to_sphere(const Vec4& v);

}  // namespace lag
