#pragma once

#include <array>
#include <functional>
#include <random>
#include <vector>

#include "lag/connection.hpp"
#include "lag/surface.hpp"

namespace lag {

// A point of Y = L x R^4; p3 = -p1 throughout.
struct YPoint {
  Mat6 A = Mat6::Identity();
  double q1 = 0, q2 = 0, p1 = 0, p2 = 0;
  double p3() const { return -p1; }
};

// Tangent vector at a point of Y in the left-trivialization: a = omega(xi).
struct YTangent {
  Mat6 a = Mat6::Zero();
  double dq1 = 0, dq2 = 0, dp1 = 0, dp2 = 0;
};

// Integral plane spanned by e_1, e_2 with omega^i(e_j) = delta^i_j,
// eta^a(e_j) = 0, pi^i(e_j) = V(i, j), zeta^i(e_j) = W(i, j).
struct IntegralElement2 {
  YPoint base;
  Mat2 V = Mat2::Zero(), W = Mat2::Zero();
  YTangent tangent(int j) const;
};

using Eta = std::array<double, 8>;

Eta eta_eval(const YPoint& z, const YTangent& xi);

// d eta^a (X, Y) from the structure equations of L.
Eta d_eta(const YPoint& z, const YTangent& x, const YTangent& y);

// {max |d eta^1..4|, d eta^5, d eta^6, d eta^7, d eta^8} on the plane.
std::array<double, 5> quadratic_residual(const IntegralElement2& e);

// The same five values from the displayed quadratic equations, coded by hand.
std::array<double, 5> quadratic_expected(const IntegralElement2& e);

// Affine fibre of integral planes over z in the coordinates
// (V11, V12, V21, V22, W11, W12, W21, W22): x = offset + basis * s.
struct IntegralFamily {
  YPoint base;
  Eigen::Matrix<double, 4, 8> constraints;  // derived from d eta^5..8
  Eigen::Vector4d rhs;
  Eigen::Matrix<double, 8, 1> offset;
  Eigen::MatrixXd basis;
  int dim = 0;
  IntegralElement2 element(const Eigen::VectorXd& s) const;
};
IntegralFamily integral_elements(const YPoint& z);

// The displayed right-hand sides, in the constraint order above.
Eigen::Vector4d affine_rhs(const YPoint& z);

// T[a][i] holds the coefficients of mu^a_i in (pi^1, pi^2, zeta^1, zeta^2),
// where d eta^a = mu^a_i ^ omega^i mod {eta} and torsion.
using Tableau = std::array<std::array<Eigen::Vector4d, 2>, 8>;

Tableau derive_tableau(const YPoint& z);
Tableau printed_tableau();

struct Characters {
  int s1 = 0, s2 = 0, t = 0;
  bool involutive = false;
};
// s1' from a seeded generic covector, t from the tableau equations.
Characters cartan_test(const Tableau& t, unsigned seed = 7);
// Characters of the tableau at z, with t read from integral_elements.
Characters cartan_characters(const YPoint& z, unsigned seed = 7);

// Coframe coordinates (omega^1, omega^2, eta^1..8, pi^1, pi^2, zeta^1, zeta^2).
using Coframe14 = Eigen::Matrix<double, 14, 1>;
YTangent from_coframe(const YPoint& z, const Coframe14& c);
Coframe14 to_coframe(const YPoint& z, const YTangent& xi);

enum class PolarForm { Generic, Derived, Printed };

struct PolarSpace {
  int dim = 0;
  Eigen::MatrixXd equations;  // 16 x 14
  Eigen::MatrixXd basis;      // 14 x dim
  double containment = 0.0;   // distance of E1 from the span
};
// Kernel of eta^a = 0, i_xi d eta^a = 0. Raises NotIntegralElement unless
// eta(E1) vanishes and omega(E1) is nonzero.
PolarSpace polar_space(const YPoint& z, const YTangent& e1, PolarForm form = PolarForm::Generic,
                       double tol = 1e-10);

// The integral plane spanned by a 2-dim polar space.
IntegralElement2 plane_from_polar(const YPoint& z, const PolarSpace& ps);

YPoint random_ypoint(std::mt19937_64& rng, double scale = 1.0);
Mat6 random_group_element(std::mt19937_64& rng, double scale = 1.0);
// 1-dim integral element: eta = 0, random omega^1, omega^2, pi, zeta.
YTangent random_integral_line(const YPoint& z, std::mt19937_64& rng);

// Initial data of the Cauchy problem: s1, s2, r1, r2 as functions of t on
// [t0, t1]; B is the frame at t_base.
struct CauchyData {
  std::function<double(double)> s1, s2, r1, r2;
  Mat6 B = Mat6::Identity();
  double t0 = -0.5, t1 = 0.5, t_base = 0.0;
};

// Constant data.
CauchyData constant_data(double s1, double s2, double r1, double r2, const Mat6& B = Mat6::Identity());
// Data sampled at uniform t, reconstructed by cardinal cubic B-splines.
CauchyData sampled_data(const std::vector<double>& t, const std::vector<std::array<double, 4>>& v,
                        const Mat6& B = Mat6::Identity());

Mat6 beta_form(const CauchyData& d, double t);

struct InitialCurve {
  std::vector<double> t;
  std::vector<YPoint> points;
  std::vector<YTangent> tangents;  // Gamma^{-1} Gamma' and (s', r')
  double drift = 0.0;              // max |Gamma^T eta Gamma - eta|
  int steps = 0;
};

// Gamma' = Gamma beta(t), Gamma(t_base) = B, by adaptive Dormand-Prince 5(4),
// reported at n uniform nodes of [t0, t1].
InitialCurve integrate_initial_curve(const CauchyData& d, int n, double abs_tol = 1e-13, double rel_tol = 1e-13);

// Frames, invariants and gauge functions on an (x, y) grid.
struct YGrid {
  Grid2 grid;
  Field2<Mat6> frames;
  Field2<double> q1, q2, p1, p2;
  Field2<double> a, c;  // alpha^2_0 = a dx, alpha^3_0 = c dx + dy; empty if unknown
};

struct MarchOptions {
  double filter = 0.05;   // strength of the 8th-order dissipative filter per step
  int accuracy = 6;       // x-derivative stencil
  double growth = 1e3;    // high-frequency growth bound
  double max_height = 0.05;
  double gauge_det = 1e-8;
};

struct MarchResult {
  YGrid solution;
  std::vector<double> growth;  // high-frequency ratio per step
};

// Marches the integral surface through the initial curve in y.
MarchResult extend_surface(const InitialCurve& curve, int steps, double h_y, const MarchOptions& opt = {});

struct SolutionReport {
  std::array<double, 8> eta{};  // max |pullback of eta^a|
  Field2<double> eta_field;     // per-node max over a
  double maurer_cartan = 0.0;
  double algebra = 0.0;
  StructureResiduals se;
  double l_minimal = 0.0;       // max |p1 + p3|
  double gauge = 0.0;           // coframe against (a, c)
  double eta_max() const;
};
SolutionReport verify_solution(const YGrid& y);

// Canonical frame and invariants of a patch at (u, v), principal directions
// oriented by `reference`.
YPoint surface_ypoint(const SurfacePatch& patch, const Vec2& reference, double u, double v);

// Cauchy data read off the catenoid along v = v0, where the canonical coframe
// is -cosh(u) (du, dv): t = -sinh(u) is the arc parameter of alpha^2_0. The
// marched coordinates (x, y) correspond to u = -asinh(x), v = v0 - y / cosh(u).
struct CatenoidCauchy {
  CauchyData data;
  SurfacePatch patch;
  Vec2 reference;
  double v0 = 0.0;
  Vec2 uv(double x, double y) const;
};
CatenoidCauchy catenoid_cauchy(double v0 = 0.0, double t0 = -1.0, double t1 = -0.2, double t_base = -0.6);

// Max entrywise frame difference against the catenoid's canonical frames.
double frame_error(const YGrid& y, const CatenoidCauchy& cc);

// A canonical frame field and its invariants viewed as a map into Y.
YGrid lift_to_y(const CanonicalFrameField& cf, const InvariantField& inv);

}  // namespace lag
