#include "lag/connection.hpp"

#include <algorithm>
#include <cmath>

namespace lag {

namespace {

// eta maps e_i to s_i e_{sigma(i)}.
constexpr int kSigma[6] = {5, 4, 2, 3, 1, 0};
constexpr double kSign[6] = {-1, -1, 1, 1, -1, -1};

}  // namespace

Mat6 complete_algebra(const Mat6& m) {
  static constexpr int slots[10][2] = {{1, 0}, {2, 0}, {3, 0}, {4, 0}, {1, 1},
                                       {2, 1}, {3, 1}, {1, 2}, {1, 3}, {3, 2}};
  Mat6 a = Mat6::Zero();
  for (const auto& s : slots) {
    const int i = s[0], j = s[1];
    a(i, j) = m(i, j);
    a(kSigma[j], kSigma[i]) = -kSign[i] * kSign[j] * m(i, j);
  }
  return a;
}

Mat6 canonical_connection(double w1, double w2, double q1, double q2, double p1, double p2, double p3) {
  Mat6 m = Mat6::Zero();
  m(2, 0) = w1;
  m(3, 0) = w2;
  m(2, 1) = w1;
  m(3, 1) = -w2;
  m(1, 1) = 2.0 * q2 * w1 - 2.0 * q1 * w2;
  m(3, 2) = q1 * w1 + q2 * w2;
  m(1, 2) = p1 * w1 + p2 * w2;
  m(1, 3) = p2 * w1 + p3 * w2;
  return complete_algebra(m);
}

ConnectionForm connection_from_frames(const Grid2& g, const Field2<Mat6>& frames, int accuracy) {
  const Field2<Mat6> du = differentiate(frames, 0, g.h1(), 1, accuracy);
  const Field2<Mat6> dv = differentiate(frames, 1, g.h2(), 1, accuracy);
  ConnectionForm cf{g, Field2<Mat6>(g), Field2<Mat6>(g)};
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const Mat6 inv = group_inverse(frames[k]);
    cf.mx[k] = inv * du[k];
    cf.my[k] = inv * dv[k];
  }
  return cf;
}

Field2<double> flatness_field(const ConnectionForm& cf, int accuracy) {
  const Field2<Mat6> dmy = differentiate(cf.my, 0, cf.grid.h1(), 1, accuracy);
  const Field2<Mat6> dmx = differentiate(cf.mx, 1, cf.grid.h2(), 1, accuracy);
  Field2<double> out(cf.grid);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Mat6 curv = dmy[k] - dmx[k] + cf.mx[k] * cf.my[k] - cf.my[k] * cf.mx[k];
    out[k] = curv.norm();
  }
  return out;
}

double flatness_residual(const ConnectionForm& cf, int accuracy) {
  const Field2<double> f = flatness_field(cf, accuracy);
  return *std::max_element(f.data().begin(), f.data().end());
}

double algebra_residual(const ConnectionForm& cf) {
  double r = 0.0;
  for (std::size_t k = 0; k < cf.mx.size(); ++k)
    r = std::max({r, algebra_defect(cf.mx[k]), algebra_defect(cf.my[k])});
  return r;
}

McResidual maurer_cartan_residual(const Grid2& g, const Field2<Mat6>& frames) {
  if (g.n1 < 5 || g.n2 < 5) throw Error(ErrorCode::GridTooSmall, "need at least 5 nodes per direction");
  const ConnectionForm cf = connection_from_frames(g, frames);
  McResidual r;
  r.curvature = flatness_residual(cf);
  r.algebra = algebra_residual(cf);
  return r;
}

namespace {

// Coefficient at fractional position k + theta by cubic interpolation.
Mat6 interpolate(const std::vector<const Mat6*>& m, int k, double theta) {
  const int n = static_cast<int>(m.size());
  if (n < 4) return (1.0 - theta) * *m[k] + theta * *m[k + 1];
  const int first = std::clamp(k - 1, 0, n - 4);
  const std::vector<double> x{double(first - k), double(first + 1 - k), double(first + 2 - k), double(first + 3 - k)};
  const std::vector<double> w = fd_weights(theta, x, 0);
  Mat6 out = Mat6::Zero();
  for (int q = 0; q < 4; ++q) out += w[q] * *m[first + q];
  return out;
}

// Fourth-order Magnus step over [k, k + dir] with Gauss-point coefficients.
Mat6 magnus_step(const Mat6& a, const std::vector<const Mat6*>& m, int k, int dir, double h) {
  const int lo = dir > 0 ? k : k - 1;
  const double g = std::sqrt(3.0) / 6.0;
  Mat6 m1 = interpolate(m, lo, 0.5 - g), m2 = interpolate(m, lo, 0.5 + g);
  if (dir < 0) std::swap(m1, m2);
  const double s = dir * h;
  const Mat6 omega = 0.5 * s * (m1 + m2) + (std::sqrt(3.0) / 12.0) * s * s * (m1 * m2 - m2 * m1);
  return a * algebra_exp(omega);
}

// Integrates along one grid line from node k0 in both directions.
std::vector<Mat6> integrate_line(const std::vector<const Mat6*>& m, double h, int k0, const Mat6& start) {
  const int n = static_cast<int>(m.size());
  std::vector<Mat6> out(n);
  out[k0] = start;
  for (int k = k0; k + 1 < n; ++k) out[k + 1] = magnus_step(out[k], m, k, 1, h);
  for (int k = k0; k > 0; --k) out[k - 1] = magnus_step(out[k], m, k, -1, h);
  return out;
}

Field2<Mat6> sweep(const ConnectionForm& cf, const Mat6& base, int i0, int j0, bool y_first) {
  const Grid2& g = cf.grid;
  Field2<Mat6> out(g);
  std::vector<const Mat6*> line;
  if (y_first) {
    line.clear();
    for (int j = 0; j < g.n2; ++j) line.push_back(&cf.my(i0, j));
    const std::vector<Mat6> col = integrate_line(line, g.h2(), j0, base);
    for (int j = 0; j < g.n2; ++j) {
      line.clear();
      for (int i = 0; i < g.n1; ++i) line.push_back(&cf.mx(i, j));
      const std::vector<Mat6> row = integrate_line(line, g.h1(), i0, col[j]);
      for (int i = 0; i < g.n1; ++i) out(i, j) = row[i];
    }
  } else {
    for (int i = 0; i < g.n1; ++i) line.push_back(&cf.mx(i, j0));
    const std::vector<Mat6> row = integrate_line(line, g.h1(), i0, base);
    for (int i = 0; i < g.n1; ++i) {
      line.clear();
      for (int j = 0; j < g.n2; ++j) line.push_back(&cf.my(i, j));
      const std::vector<Mat6> col = integrate_line(line, g.h2(), j0, row[i]);
      for (int j = 0; j < g.n2; ++j) out(i, j) = col[j];
    }
  }
  return out;
}

}  // namespace

FrameIntegration integrate_frame(const ConnectionForm& cf, const Mat6& base, int i0, int j0, double tol_flat,
                                 bool enforce) {
  FrameIntegration fi;
  fi.frames = sweep(cf, base, i0, j0, true);
  const Field2<Mat6> audit = sweep(cf, base, i0, j0, false);
  for (std::size_t k = 0; k < audit.size(); ++k) {
    fi.path_dependence = std::max(fi.path_dependence, (fi.frames[k] - audit[k]).norm());
    fi.drift = std::max(fi.drift, group_defects(fi.frames[k]).orthogonality);
  }
  const Grid2& g = cf.grid;
  const double size = std::hypot(g.a1 - g.a0, g.b1 - g.b0);
  if (enforce && fi.path_dependence > 10.0 * tol_flat * std::max(1.0, size))
    throw Error(ErrorCode::PathDependence, "row and column sweeps disagree by " + std::to_string(fi.path_dependence));
  return fi;
}

}  // namespace lag
