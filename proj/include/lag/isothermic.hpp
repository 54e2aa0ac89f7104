#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lag/catalog.hpp"
#include "lag/connection.hpp"
#include "lag/surface.hpp"

namespace lag {

// Blaschke potential u on a rectangle of conformal curvature-line
// coordinates (x, y). With a jet the derivatives of u are exact; otherwise
// they come from 4th-order differences of the samples.
struct BlaschkeField {
  Grid2 grid;
  Field2<double> u;
  std::function<Tps<4>(double, double)> jet;
  int i0 = -1, j0 = -1;  // base node; centre when negative

  int base_i() const { return i0 >= 0 ? i0 : grid.n1 / 2; }
  int base_j() const { return j0 >= 0 ? j0 : grid.n2 / 2; }
};

template <class F>
BlaschkeField make_potential(F f, const Grid2& g) {
  BlaschkeField bf;
  bf.grid = g;
  bf.u = Field2<double>(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) bf.u(i, j) = f(g.x1(i), g.x2(j));
  bf.jet = [f](double x, double y) { return f(Tps<4>::variable(x, 0), Tps<4>::variable(y, 1)); };
  return bf;
}

// Built-in potentials: lncosh, zero, linear (a, b, c), xy, x2y.
BlaschkeField catalog_potential(const std::string& name, const Grid2& g, const Params& params = {});

BlaschkeField potential_from_samples(const Grid2& g, const Field2<double>& u);

// u and its derivatives needed downstream, per node.
struct PotentialDerivatives {
  Field2<double> u, ux, uy, lap, lap_x, lap_y, blaschke;
};
PotentialDerivatives potential_derivatives(const BlaschkeField& bf);

struct ResidualField {
  Field2<double> field;
  double max = 0.0;
};

// Delta(e^{-u} (e^u)_{xy}) = Delta(u_xy + u_x u_y).
ResidualField blaschke_residual(const BlaschkeField& bf);

struct CalK {
  Field2<double> value;        // zero at the base node
  double loop_residual = 0.0;  // y-first against x-first path
  Field2<double> eta_x, eta_y; // the integrated 1-form
};

// Integrates d calK = eta_x dx + eta_y dy with
// eta_x = -(Delta u_x + 2 u_x Delta u), eta_y = Delta u_y + 2 u_y Delta u.
// Fails with NotClosed when the Blaschke residual or the loop residual
// exceeds tol.closed.
CalK calK_integrate(const BlaschkeField& bf, const Tolerances& tol = default_tolerances());

struct PotentialInvariants {
  InvariantField inv;
  Field2<double> calK, J, W;
  double m = 0.0;
};

// q1 = -e^{-u} u_y, q2 = e^{-u} u_x, J = -e^{-2u} Delta u / 2,
// W_m = (calK / 2 + m) e^{-2u}, p2 = 0, p1 = W_m + J, p3 = W_m - J.
PotentialInvariants invariants_from_potential(const BlaschkeField& bf, double m,
                                              const Tolerances& tol = default_tolerances());

// The flat family alpha^(m), entry by entry.
ConnectionForm assemble_alpha_m(const BlaschkeField& bf, const PotentialInvariants& pinv);
ConnectionForm assemble_alpha_m(const BlaschkeField& bf, double m, const Tolerances& tol = default_tolerances());

struct Reconstruction {
  Grid2 grid;
  Field2<ContactElement> element;  // lambda(A_0, A_1)
  Field2<int> valid;
  Field2<Vec4> sigma;              // Minkowski coordinates of A_0
  double legendre = 0.0;           // max |dx . n| / |dx|
  int invalid = 0;
};
Reconstruction surface_from_frame(const Grid2& g, const Field2<Mat6>& frames);

struct SpecialSolution {
  BlaschkeField field;
  std::vector<double> residual_log;  // max |Delta_h u - c e^{-2u}| per iterate
  int iterations = 0;
  double residual = 0.0;
  double character_spread = 0.0;     // max |e^{2u} Delta_h u - c|
};

// Damped Newton for Delta u = c e^{-2u} on the interior with Dirichlet data
// from `boundary`; 5-point Laplacian, sparse LU per step.
SpecialSolution solve_special(double c, const Grid2& g, const std::function<double(double, double)>& boundary,
                              double tol = 1e-10, int max_iter = 50);

struct TTransformResult {
  double m = 0.0;
  PotentialInvariants pinv;
  ConnectionForm alpha;
  double flatness = 0.0;           // 6th-order differences
  double flatness4 = 0.0;          // 4th-order differences
  FrameIntegration frames;
  Reconstruction surface;
  InvariantField recomputed;       // from the integrated frames
  double potential_error = 0.0;    // max |coframe - e^u I|
  double k_recovered = 0.0;        // mean of W e^{2u}
  double k_spread = 0.0;           // max deviation of W e^{2u}
  double frame_mc = 0.0;           // Maurer-Cartan residual of the frames
};

// invariants -> alpha^(m) -> flatness gate -> frame -> surface -> invariants.
TTransformResult t_transform(const BlaschkeField& bf, double m, const Mat6& base = Mat6::Identity(),
                             const Tolerances& tol = default_tolerances());

struct SpectralComparison {
  double m = 0.0;
  double J_diff = 0.0;  // max |J_m - J_0|
  double W_diff = 0.0;  // max |W_m - W_0 - m e^{-2u}|
};
// Compares recomputed invariants of a T-transform against the m = 0 member.
SpectralComparison compare_to_base(const BlaschkeField& bf, const TTransformResult& base,
                                   const TTransformResult& other);

struct GeneralizedAudit {
  double parallel = 0.0;
  double holomorphy = 0.0;
  double ratio_mean = 0.0;  // Q / P^2
  double ratio_cv = 0.0;
  double P_min = 0.0;
};
// Interior nodes only, `margin` nodes from each side.
GeneralizedAudit generalized_audit(const InvariantField& inv, int margin = 0);

}  // namespace lag
