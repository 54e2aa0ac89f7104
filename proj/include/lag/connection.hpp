#pragma once

#include "lag/grid.hpp"
#include "lag/group.hpp"

namespace lag {

// Completes a Lie algebra element from its ten independent slots
// (1,0) (2,0) (3,0) (4,0) (1,1) (2,1) (3,1) (1,2) (1,3) (3,2);
// the remaining entries follow from eta a + a^T eta = 0 and a e5 = 0.
Mat6 complete_algebra(const Mat6& m);

// Canonical connection evaluated on a tangent vector whose coframe values are
// (w1, w2) = (alpha^2_0, alpha^3_0).
Mat6 canonical_connection(double w1, double w2, double q1, double q2, double p1, double p2, double p3);

// alpha = mx dx + my dy on a grid.
struct ConnectionForm {
  Grid2 grid;
  Field2<Mat6> mx, my;
};

// alpha = A^{-1} dA by 4th-order differences.
ConnectionForm connection_from_frames(const Grid2& g, const Field2<Mat6>& frames, int accuracy = 4);

// Per-node norm of d alpha + alpha ^ alpha.
Field2<double> flatness_field(const ConnectionForm& cf, int accuracy = 4);
double flatness_residual(const ConnectionForm& cf, int accuracy = 4);
// max over nodes of the algebra membership defect of mx and my
double algebra_residual(const ConnectionForm& cf);

struct McResidual {
  double curvature = 0.0;  // max |d omega + omega ^ omega|
  double algebra = 0.0;    // max eta-skew / last-column defect of omega
};
McResidual maurer_cartan_residual(const Grid2& g, const Field2<Mat6>& frames);

struct FrameIntegration {
  Field2<Mat6> frames;
  double path_dependence = 0.0;  // max node discrepancy against the transposed sweep
  double drift = 0.0;            // max |A^T eta A - eta|
};

// Solves dA = A alpha from A(i0, j0) = base: along y on column i0, then along
// x on every row. The transposed sweep is computed as an audit; with enforce
// set, a discrepancy above 10 tol_flat (domain size) raises PathDependence.
FrameIntegration integrate_frame(const ConnectionForm& cf, const Mat6& base, int i0, int j0,
                                 double tol_flat = default_tolerances().flat, bool enforce = true);

}  // namespace lag
