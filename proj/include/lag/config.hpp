#pragma once

namespace lag {

// Shared numeric policy. Every module reads its thresholds from here.
struct Tolerances {
  double rel = 1e-9;           // projective predicates, group invariants
  double umbilic = 1e-6;       // |a - c| relative to curvature scale
  double parabolic = 1e-8;     // |K| relative to curvature scale squared
  double immersion = 1e-10;    // |x_u x x_v|
  double coframe_cond = 1e8;   // condition number bound for 2x2 coframe solves
  double boost_margin = 1e-9;  // b.b < 1 - boost_margin
  double closed = 1e-6;        // blaschke residual gate before K integration
  double flat = 1e-6;          // flatness gate before frame integration
  double gauge_det = 1e-8;     // independence condition in the Cauchy march
  double growth = 1e3;         // high-frequency growth bound in the Cauchy march
  double max_height = 0.05;    // domain height bound in the Cauchy march
};

const Tolerances& default_tolerances();

}  // namespace lag
