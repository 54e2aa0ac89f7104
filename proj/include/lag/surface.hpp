#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "lag/catalog.hpp"
#include "lag/connection.hpp"
#include "lag/grid.hpp"
#include "lag/group.hpp"
#include "lag/tps.hpp"

namespace lag {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Taylor jets of the immersion and its unit normal at one parameter point.
struct NodeJet {
  V3<Tps<4>> x;
  V3<Tps<3>> n;
};
struct NodeJet5 {
  V3<Tps<5>> x;
  V3<Tps<4>> n;
};

struct Domain {
  double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
};

struct SurfacePatch {
  std::string name;
  Domain domain;
  int orientation = 1;  // n = orientation (x_u x x_v) / |x_u x x_v|
  std::function<Vec3(double, double)> point;
  std::function<NodeJet(double, double)> jet;    // analytic jets; empty for sampled data
  std::function<NodeJet5(double, double)> jet5;  // used to transform the contact lift
};

template <int D>
V3<Tps<D - 1>> unit_normal(const V3<Tps<D>>& x, int orientation) {
  const V3<Tps<D - 1>> xu = derivative(x, 0), xv = derivative(x, 1);
  V3<Tps<D - 1>> c;
  c(0) = xu(1) * xv(2) - xu(2) * xv(1);
  c(1) = xu(2) * xv(0) - xu(0) * xv(2);
  c(2) = xu(0) * xv(1) - xu(1) * xv(0);
  const Tps<D - 1> inv = static_cast<double>(orientation) / sqrt(c(0) * c(0) + c(1) * c(1) + c(2) * c(2));
  return c * inv;
}

template <class F>
SurfacePatch make_patch(const std::string& name, F f, Domain d, int orientation = 1) {
  SurfacePatch p;
  p.name = name;
  p.domain = d;
  p.orientation = orientation;
  p.point = [f](double u, double v) { return Vec3(f(u, v)); };
  p.jet = [f, orientation](double u, double v) {
    NodeJet j;
    j.x = f(Tps<4>::variable(u, 0), Tps<4>::variable(v, 1));
    j.n = unit_normal<4>(j.x, orientation);
    return j;
  };
  p.jet5 = [f, orientation](double u, double v) {
    NodeJet5 j;
    j.x = f(Tps<5>::variable(u, 0), Tps<5>::variable(v, 1));
    j.n = unit_normal<5>(j.x, orientation);
    return j;
  };
  return p;
}

// Built-in surfaces by name: plane, sphere, cylinder, torus, catenoid, enneper,
// graph, perturbed_torus. Parameters override the defaults (R, rho, radius,
// scale, eps, u0, u1, v0, v1, orientation).
SurfacePatch catalog_surface(const std::string& name, const Params& params = {});

// Image of a patch under a Laguerre transformation acting on its contact lift.
SurfacePatch laguerre_transformed(const SurfacePatch& base, const Mat6& a);

enum class JetMode { Analytic, FiniteDifference };

struct JetField {
  Grid2 grid;
  Field2<NodeJet> jets;
  JetMode mode = JetMode::Analytic;
};

// n_u, n_v >= 9. Finite-difference jets use tensor 4th-order central
// stencils of step h (grid spacing by default) on an extended stencil.
JetField sample_jets(const SurfacePatch& patch, int nu, int nv, JetMode mode = JetMode::Analytic,
                     double fd_step = 0.0);

struct FundamentalForms {
  Mat2 first, second, third;
  double H = 0.0, K = 0.0;
};
FundamentalForms fundamental_forms(const NodeJet& jet);
Field2<FundamentalForms> fundamental_forms(const JetField& jf);

// Everything computed at one node: principal data, the Euclidean, first
// order and canonical frames, and the canonical connection coefficients.
struct NodeAnalysis {
  Vec3 x, n, e2, e3;
  double a = 0, c = 0, H = 0, K = 0, hk = 0;
  Vec2 dhk;  // d(H/K) in (du, dv)
  FundamentalForms forms;
  // rows in the (du, dv) basis
  Vec2 phi2, phi3, phi21, phi31, phi32;
  Vec2 w;  // principal direction of e2 in parameter space
  Mat6 euclid, adapted, canonical;
  Mat6 alpha_u, alpha_v;  // canonical^{-1} d canonical
  Vec2 y;                 // second-order adaptation parameter
  double mu = 0;          // (a - c) / (sqrt2 K)
  double el = 0;          // Laplace-Beltrami of H/K with respect to III
  Vec4 sigma;             // (H/K, x + (H/K) n)
  Mat2 sigma_metric;      // induced Lorentz metric of sigma
};

// Principal direction of the larger curvature in parameter space at a node.
Vec2 principal_reference(const NodeJet& jet);
NodeAnalysis analyze_node(const NodeJet& jet, const Vec2& reference);

struct PrincipalData {
  Grid2 grid;
  Vec2 reference;
  Field2<NodeAnalysis> node;
};

// Aborts with UmbilicPoint / ParabolicPoint listing the offending nodes.
PrincipalData principal_frame(const JetField& jf, const Tolerances& tol = default_tolerances());

struct CanonicalFrameField {
  Grid2 grid;
  Field2<Mat6> frame;           // A''
  Field2<Mat6> alpha_u, alpha_v;
  Field2<Mat2> coframe;         // rows alpha^2_0, alpha^3_0 in (du, dv)
};
CanonicalFrameField canonical_frame(const PrincipalData& pd);

struct InvariantField {
  Grid2 grid;
  Field2<double> q1, q2, p1, p2, p3;
  Field2<Mat2> coframe;
  Field2<double> cond;
  double canonical_defect = 0.0;  // alpha^4_0, alpha^1_0, alpha^2_1 - alpha^2_0, alpha^3_1 + alpha^3_0
  double alpha11_defect = 0.0;    // alpha^1_1 - (2 q2 alpha^2_0 - 2 q1 alpha^3_0)
  double p2_symmetry = 0.0;       // the two readings of p2

  double J(int i, int j) const { return 0.5 * (p1(i, j) - p3(i, j)); }
  double W(int i, int j) const { return 0.5 * (p1(i, j) + p3(i, j)); }
  double P(int i, int j) const { return p1(i, j) + p3(i, j); }
  std::complex<double> Q(int i, int j) const { return {0.5 * (p1(i, j) - p3(i, j)), -p2(i, j)}; }
};

// Solves the invariant relations against the coframe at every node.
InvariantField invariants_from_connection(const Grid2& g, const Field2<Mat6>& au, const Field2<Mat6>& av,
                                          const Tolerances& tol = default_tolerances());
InvariantField invariants(const CanonicalFrameField& cf, const Tolerances& tol = default_tolerances());

struct StructureResiduals {
  // se0 (two forms), se1, se2, se3, se4 in the coframe basis
  std::array<double, 6> max{};
  std::array<Field2<double>, 6> field;
  double overall() const;
};
StructureResiduals structure_residuals(const InvariantField& inv);

struct GaussMap {
  Field2<Vec4> sigma;
  Field2<Mat2> metric;        // induced by sigma
  Field2<Mat2> laguerre;      // ((H^2 - K) / K^2) III
  double metric_mismatch = 0; // max |metric - laguerre| relative
  bool spacelike = true;
};
GaussMap laguerre_gauss_map(const PrincipalData& pd);

struct EnergyReport {
  double energy = 0.0;          // integral of (H^2 - K) / K dA
  double area_form = 0.0;       // integral of |Omega_f|
  double minkowski_area = 0.0;  // area of sigma_f in R^{3,1}
  double euclid_area = 0.0;
};
// Gauss-Legendre quadrature of order n in each direction over the domain.
EnergyReport metric_area_energy(const SurfacePatch& patch, int n = 24);

struct Classification {
  Field2<int> isothermic, l_minimal, generalized;
  double p2_max = 0, lmin_max = 0, holomorphy_max = 0;
  bool is_isothermic = false, is_l_minimal = false, is_generalized = false;
};

// Holomorphy residual of Q: dQ ^ phi + 4 (q2 alpha^2_0 - q1 alpha^3_0) Q ^ phi,
// phi = alpha^2_0 + i alpha^3_0, in the coframe basis.
Field2<double> holomorphy_field(const InvariantField& inv);
Classification classify(const InvariantField& inv, double tol = 1e-6);

struct MeanCurvatureReport {
  Field2<double> coefficient;  // (p1 + p3) / 2, the A1 component of the mean curvature vector
  Field2<double> parallel;     // |d(p1+p3) + 2 (p1+p3)(q2 alpha^2_0 - q1 alpha^3_0)| in the coframe basis
  double parallel_max = 0.0;
  double coefficient_max = 0.0;
};
MeanCurvatureReport gauss_map_mean_curvature(const InvariantField& inv);

struct ElReport {
  Field2<double> residual;  // Laplace-Beltrami of H/K with respect to III
  double max = 0.0;
  double factor = 0.0;      // least-squares factor against ((a - c) / 2K)^3 (p1 + p3)
  double fit_residual = 0.0;
};
ElReport el_residual(const PrincipalData& pd, const InvariantField& inv);

struct LaguerreTransformField {
  Field2<ContactElement> element;
  Field2<int> valid;
  double gram_max = 0.0;      // |<A0, A4>|, |<A4, A4>|
  double contact_max = 0.0;   // oriented contact of A0 with the extracted generators
  double max_distance = 0.0;  // max |x_check - x|
};
LaguerreTransformField laguerre_transform(const PrincipalData& pd);

struct InvarianceReport {
  double J = 0, W = 0, p2 = 0, qq = 0, metric = 0, energy = 0;
  double q_sign = 1.0;  // global sign relating the raw q fields
  double q_raw = 0;     // raw q mismatch after the global sign
  double worst() const;
};
// Compares invariants of a patch and its image under a, node by node on the
// shared parameter grid (analytic jets), and the energies.
InvarianceReport laguerre_invariance(const SurfacePatch& patch, const Mat6& a, int n, int quad = 24);

enum class FitKind { Spacelike, Timelike, Isotropic, SphereLike, Lightcone, None };
const char* fit_kind_name(FitKind k);

// Affine hyperplane c.V = delta and translated quadric (V - V0, V - V0) = k
// fitted to samples of R^{3,1}; residuals are max first-order distances.
struct HyperplaneFit {
  FitKind kind = FitKind::None;
  Vec4 normal = Vec4::Zero();  // Lorentz normal nu, (nu, V) = delta
  double offset = 0.0;
  double hyperplane_residual = 0.0;
  Vec4 center = Vec4::Zero();
  double level = 0.0;  // k
  double quadric_residual = 0.0;
  double best_residual = 0.0;
};
HyperplaneFit hyperplane_fit(const std::vector<Vec4>& samples, double threshold = 1e-6);

// Full analysis in one call.
struct SurfaceReport {
  PrincipalData principal;
  CanonicalFrameField canonical;
  InvariantField inv;
  StructureResiduals se;
  Classification cls;
  MeanCurvatureReport mean;
  ElReport el;
  GaussMap gauss;
};
SurfaceReport analyze_surface(const SurfacePatch& patch, int nu, int nv, JetMode mode = JetMode::Analytic,
                              const Tolerances& tol = default_tolerances());

}  // namespace lag
