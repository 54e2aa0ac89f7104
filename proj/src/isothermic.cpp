#include "lag/isothermic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace lag {

BlaschkeField catalog_potential(const std::string& name, const Grid2& g, const Params& prm) {
  if (name == "lncosh") return make_potential(LnCoshPotential{}, g);
  if (name == "zero") return make_potential(ZeroPotential{}, g);
  if (name == "linear")
    return make_potential(LinearPotential{param(prm, "a", 1.0), param(prm, "b", 0.0), param(prm, "c", 0.0)}, g);
  if (name == "xy") return make_potential(ProductPotential{}, g);
  if (name == "x2y") return make_potential(QuadProductPotential{}, g);
  throw Error(ErrorCode::ConfigError, "unknown potential '" + name + "'");
}

BlaschkeField potential_from_samples(const Grid2& g, const Field2<double>& u) {
  BlaschkeField bf;
  bf.grid = g;
  bf.u = u;
  return bf;
}

PotentialDerivatives potential_derivatives(const BlaschkeField& bf) {
  const Grid2& g = bf.grid;
  PotentialDerivatives d;
  d.u = bf.u;
  if (bf.jet) {
    d.ux = d.uy = d.lap = d.lap_x = d.lap_y = d.blaschke = Field2<double>(g);
    for (int j = 0; j < g.n2; ++j) {
      for (int i = 0; i < g.n1; ++i) {
        const Tps<4> t = bf.jet(g.x1(i), g.x2(j));
        d.ux(i, j) = t.partial(1, 0);
        d.uy(i, j) = t.partial(0, 1);
        d.lap(i, j) = t.partial(2, 0) + t.partial(0, 2);
        d.lap_x(i, j) = t.partial(3, 0) + t.partial(1, 2);
        d.lap_y(i, j) = t.partial(2, 1) + t.partial(0, 3);
        const Tps<3> tx = du(t), ty = dv(t);
        const Tps<2> f = dv(tx) + truncate_to<2>(tx) * truncate_to<2>(ty);
        d.blaschke(i, j) = f.partial(2, 0) + f.partial(0, 2);
      }
    }
    return d;
  }
  const double h1 = g.h1(), h2 = g.h2();
  d.ux = differentiate(bf.u, 0, h1);
  d.uy = differentiate(bf.u, 1, h2);
  const Field2<double> uxx = differentiate(bf.u, 0, h1, 2), uyy = differentiate(bf.u, 1, h2, 2);
  const Field2<double> uxy = differentiate(d.ux, 1, h2);
  d.lap = Field2<double>(g);
  Field2<double> f(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    d.lap[k] = uxx[k] + uyy[k];
    f[k] = uxy[k] + d.ux[k] * d.uy[k];
  }
  d.lap_x = differentiate(d.lap, 0, h1);
  d.lap_y = differentiate(d.lap, 1, h2);
  const Field2<double> fxx = differentiate(f, 0, h1, 2), fyy = differentiate(f, 1, h2, 2);
  d.blaschke = Field2<double>(g);
  for (std::size_t k = 0; k < g.size(); ++k) d.blaschke[k] = fxx[k] + fyy[k];
  return d;
}

ResidualField blaschke_residual(const BlaschkeField& bf) {
  if (bf.grid.n1 < 9 || bf.grid.n2 < 9) throw Error(ErrorCode::GridTooSmall, "Blaschke residual needs 9x9 nodes");
  ResidualField r;
  r.field = potential_derivatives(bf).blaschke;
  for (double v : r.field.data()) r.max = std::max(r.max, std::abs(v));
  return r;
}

namespace {

// Running integral along a line, zero at index k0.
std::vector<double> line_integral(const std::vector<double>& f, double h, int k0) {
  std::vector<double> s = cumulative_integral(f, h);
  const double base = s[k0];
  for (double& v : s) v -= base;
  return s;
}

Field2<double> path_integral(const Grid2& g, const Field2<double>& fx, const Field2<double>& fy, int i0, int j0,
                             bool y_first) {
  Field2<double> out(g);
  std::vector<double> line;
  if (y_first) {
    line.resize(g.n2);
    for (int j = 0; j < g.n2; ++j) line[j] = fy(i0, j);
    const std::vector<double> col = line_integral(line, g.h2(), j0);
    line.resize(g.n1);
    for (int j = 0; j < g.n2; ++j) {
      for (int i = 0; i < g.n1; ++i) line[i] = fx(i, j);
      const std::vector<double> row = line_integral(line, g.h1(), i0);
      for (int i = 0; i < g.n1; ++i) out(i, j) = col[j] + row[i];
    }
  } else {
    line.resize(g.n1);
    for (int i = 0; i < g.n1; ++i) line[i] = fx(i, j0);
    const std::vector<double> row = line_integral(line, g.h1(), i0);
    line.resize(g.n2);
    for (int i = 0; i < g.n1; ++i) {
      for (int j = 0; j < g.n2; ++j) line[j] = fy(i, j);
      const std::vector<double> col = line_integral(line, g.h2(), j0);
      for (int j = 0; j < g.n2; ++j) out(i, j) = row[i] + col[j];
    }
  }
  return out;
}

}  // namespace

CalK calK_integrate(const BlaschkeField& bf, const Tolerances& tol) {
  const Grid2& g = bf.grid;
  const PotentialDerivatives d = potential_derivatives(bf);
  double closed = 0.0;
  for (double v : d.blaschke.data()) closed = std::max(closed, std::abs(v));
  if (closed > tol.closed)
    throw Error(ErrorCode::NotClosed, "Blaschke residual " + std::to_string(closed) + " above tolerance");
  CalK k;
  k.eta_x = k.eta_y = Field2<double>(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    k.eta_x[n] = -(d.lap_x[n] + 2.0 * d.ux[n] * d.lap[n]);
    k.eta_y[n] = d.lap_y[n] + 2.0 * d.uy[n] * d.lap[n];
  }
  k.value = path_integral(g, k.eta_x, k.eta_y, bf.base_i(), bf.base_j(), true);
  const Field2<double> other = path_integral(g, k.eta_x, k.eta_y, bf.base_i(), bf.base_j(), false);
  for (std::size_t n = 0; n < g.size(); ++n)
    k.loop_residual = std::max(k.loop_residual, std::abs(k.value[n] - other[n]));
  if (k.loop_residual > tol.closed)
    throw Error(ErrorCode::NotClosed, "path integrals differ by " + std::to_string(k.loop_residual));
  return k;
}

PotentialInvariants invariants_from_potential(const BlaschkeField& bf, double m, const Tolerances& tol) {
  const Grid2& g = bf.grid;
  const PotentialDerivatives d = potential_derivatives(bf);
  const CalK ck = calK_integrate(bf, tol);
  PotentialInvariants pi;
  pi.m = m;
  pi.calK = ck.value;
  pi.J = pi.W = Field2<double>(g);
  InvariantField& inv = pi.inv;
  inv.grid = g;
  inv.q1 = inv.q2 = inv.p1 = inv.p2 = inv.p3 = Field2<double>(g);
  inv.cond = Field2<double>(g, 1.0);
  inv.coframe = Field2<Mat2>(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double e = std::exp(d.u[k]), ei = 1.0 / e;
    inv.q1[k] = -ei * d.uy[k];
    inv.q2[k] = ei * d.ux[k];
    pi.J[k] = -0.5 * ei * ei * d.lap[k];
    pi.W[k] = (0.5 * pi.calK[k] + m) * ei * ei;
    inv.p1[k] = pi.W[k] + pi.J[k];
    inv.p2[k] = 0.0;
    inv.p3[k] = pi.W[k] - pi.J[k];
    inv.coframe[k] = e * Mat2::Identity();
  }
  return pi;
}

ConnectionForm assemble_alpha_m(const BlaschkeField& bf, const PotentialInvariants& pi) {
  const Grid2& g = bf.grid;
  const PotentialDerivatives d = potential_derivatives(bf);
  ConnectionForm cf{g, Field2<Mat6>(g, Mat6::Zero()), Field2<Mat6>(g, Mat6::Zero())};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double e = std::exp(d.u[k]), ux = d.ux[k], uy = d.uy[k];
    const double wp = (pi.W[k] + pi.J[k]) * e, wm = (pi.W[k] - pi.J[k]) * e;
    Mat6& mx = cf.mx[k];
    Mat6& my = cf.my[k];
    mx(1, 1) = 2 * ux;
    my(1, 1) = 2 * uy;
    mx(1, 2) = wp;
    my(1, 3) = wm;
    mx(2, 0) = e;
    mx(2, 1) = e;
    mx(2, 3) = uy;
    my(2, 3) = -ux;
    mx(2, 4) = wp;
    my(3, 0) = e;
    my(3, 1) = -e;
    mx(3, 2) = -uy;
    my(3, 2) = ux;
    my(3, 4) = wm;
    mx(4, 2) = e;
    my(4, 3) = -e;
    mx(4, 4) = -2 * ux;
    my(4, 4) = -2 * uy;
    mx(5, 2) = e;
    my(5, 3) = e;
  }
  return cf;
}

ConnectionForm assemble_alpha_m(const BlaschkeField& bf, double m, const Tolerances& tol) {
  return assemble_alpha_m(bf, invariants_from_potential(bf, m, tol));
}

Reconstruction surface_from_frame(const Grid2& g, const Field2<Mat6>& frames) {
  Reconstruction r;
  r.grid = g;
  r.element = Field2<ContactElement>(g);
  r.valid = Field2<int>(g, 0);
  r.sigma = Field2<Vec4>(g, Vec4::Zero());
  Field2<Vec3> x(g, Vec3::Zero());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Mat6& a = frames[k];
    try {
      r.element[k] = contact_element_extract(NullPlane{a.col(0), a.col(1)});
      r.valid[k] = 1;
      x[k] = r.element[k].p;
      r.sigma[k] = sphere_to_minkowski(extract_sphere(a.col(0), 1e-6));
    } catch (const Error&) {
      ++r.invalid;
    }
  }
  const Field2<Vec3> xx = differentiate(x, 0, g.h1()), xy = differentiate(x, 1, g.h2());
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!r.valid[k]) continue;
    const Vec3& n = r.element[k].n;
    r.legendre = std::max({r.legendre, std::abs(xx[k].dot(n)) / std::max(xx[k].norm(), 1e-300),
                           std::abs(xy[k].dot(n)) / std::max(xy[k].norm(), 1e-300)});
  }
  return r;
}

namespace {

// Interior residual Delta_h u - c e^{-2u}.
Eigen::VectorXd special_residual(const Grid2& g, const Field2<double>& u, double c) {
  const int ni = g.n1 - 2, nj = g.n2 - 2;
  const double i1 = 1.0 / (g.h1() * g.h1()), i2 = 1.0 / (g.h2() * g.h2());
  Eigen::VectorXd f(ni * nj);
  for (int j = 1; j <= nj; ++j) {
    for (int i = 1; i <= ni; ++i) {
      const double lap = (u(i + 1, j) - 2 * u(i, j) + u(i - 1, j)) * i1 + (u(i, j + 1) - 2 * u(i, j) + u(i, j - 1)) * i2;
      f((j - 1) * ni + (i - 1)) = lap - c * std::exp(-2 * u(i, j));
    }
  }
  return f;
}

Eigen::SparseMatrix<double> special_jacobian(const Grid2& g, const Field2<double>& u, double c) {
  const int ni = g.n1 - 2, nj = g.n2 - 2;
  const double i1 = 1.0 / (g.h1() * g.h1()), i2 = 1.0 / (g.h2() * g.h2());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * ni * nj);
  for (int j = 1; j <= nj; ++j) {
    for (int i = 1; i <= ni; ++i) {
      const int r = (j - 1) * ni + (i - 1);
      t.emplace_back(r, r, -2 * i1 - 2 * i2 + 2 * c * std::exp(-2 * u(i, j)));
      if (i > 1) t.emplace_back(r, r - 1, i1);
      if (i < ni) t.emplace_back(r, r + 1, i1);
      if (j > 1) t.emplace_back(r, r - ni, i2);
      if (j < nj) t.emplace_back(r, r + ni, i2);
    }
  }
  Eigen::SparseMatrix<double> m(ni * nj, ni * nj);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void add_interior(const Grid2& g, Field2<double>& u, const Eigen::VectorXd& d, double s) {
  const int ni = g.n1 - 2;
  for (int j = 1; j <= g.n2 - 2; ++j)
    for (int i = 1; i <= ni; ++i) u(i, j) += s * d((j - 1) * ni + (i - 1));
}

}  // namespace

SpecialSolution solve_special(double c, const Grid2& g, const std::function<double(double, double)>& boundary,
                              double tol, int max_iter) {
  if (g.n1 < 5 || g.n2 < 5) throw Error(ErrorCode::GridTooSmall, "special solver needs 5x5 nodes");
  Field2<double> u(g, 0.0);
  for (int i = 0; i < g.n1; ++i) {
    u(i, 0) = boundary(g.x1(i), g.x2(0));
    u(i, g.n2 - 1) = boundary(g.x1(i), g.x2(g.n2 - 1));
  }
  for (int j = 0; j < g.n2; ++j) {
    u(0, j) = boundary(g.x1(0), g.x2(j));
    u(g.n1 - 1, j) = boundary(g.x1(g.n1 - 1), g.x2(j));
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  {
    // harmonic extension as the initial guess
    const Eigen::SparseMatrix<double> lap = special_jacobian(g, u, 0.0);
    lu.compute(lap);
    const Eigen::VectorXd d = lu.solve(-special_residual(g, u, 0.0));
    add_interior(g, u, d, 1.0);
  }
  SpecialSolution sol;
  Eigen::VectorXd f = special_residual(g, u, c);
  double res = f.cwiseAbs().maxCoeff();
  sol.residual_log.push_back(res);
  while (res >= tol) {
    if (sol.iterations >= max_iter)
      throw Error(ErrorCode::NewtonDiverged, "no convergence after " + std::to_string(max_iter) +
                                                 " iterations, residual " + std::to_string(res));
    lu.compute(special_jacobian(g, u, c));
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::NewtonDiverged, "singular Newton matrix");
    const Eigen::VectorXd d = lu.solve(-f);
    double s = 1.0;
    Field2<double> trial = u;
    double next = res;
    for (int k = 0; k < 30; ++k) {
      trial = u;
      add_interior(g, trial, d, s);
      f = special_residual(g, trial, c);
      next = f.cwiseAbs().maxCoeff();
      if (next < res) break;
      s *= 0.5;
    }
    if (!(next < res)) {
      // a full step at roundoff level cannot decrease further
      if (res < 1e3 * tol) break;
      throw Error(ErrorCode::NewtonDiverged, "line search failed at residual " + std::to_string(res));
    }
    u = trial;
    res = next;
    ++sol.iterations;
    sol.residual_log.push_back(res);
  }
  sol.residual = res;
  const Eigen::VectorXd lapu = special_residual(g, u, 0.0);
  const int ni = g.n1 - 2;
  for (int j = 1; j <= g.n2 - 2; ++j)
    for (int i = 1; i <= ni; ++i)
      sol.character_spread =
          std::max(sol.character_spread, std::abs(std::exp(2 * u(i, j)) * lapu((j - 1) * ni + (i - 1)) - c));
  sol.field = potential_from_samples(g, u);
  return sol;
}

TTransformResult t_transform(const BlaschkeField& bf, double m, const Mat6& base, const Tolerances& tol) {
  const Grid2& g = bf.grid;
  TTransformResult r;
  r.m = m;
  r.pinv = invariants_from_potential(bf, m, tol);
  r.alpha = assemble_alpha_m(bf, r.pinv);
  r.flatness = flatness_residual(r.alpha, 6);
  r.flatness4 = flatness_residual(r.alpha, 4);
  if (r.flatness > tol.flat)
    throw Error(ErrorCode::NotClosed, "alpha^(m) flatness residual " + std::to_string(r.flatness));
  r.frames = integrate_frame(r.alpha, base, bf.base_i(), bf.base_j(), tol.flat);
  r.surface = surface_from_frame(g, r.frames.frames);
  const ConnectionForm rec = connection_from_frames(g, r.frames.frames);
  r.frame_mc = flatness_residual(rec);
  r.recomputed = invariants_from_connection(g, rec.mx, rec.my, tol);
  double ksum = 0.0;
  std::vector<double> kv(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double e = std::exp(bf.u[k]);
    r.potential_error =
        std::max(r.potential_error, (r.recomputed.coframe[k] - e * Mat2::Identity()).cwiseAbs().maxCoeff());
    kv[k] = r.recomputed.W(k % g.n1, k / g.n1) * e * e;
    ksum += kv[k];
  }
  r.k_recovered = ksum / g.size();
  for (double v : kv) r.k_spread = std::max(r.k_spread, std::abs(v - r.k_recovered));
  return r;
}

SpectralComparison compare_to_base(const BlaschkeField& bf, const TTransformResult& base,
                                   const TTransformResult& other) {
  SpectralComparison c;
  c.m = other.m - base.m;
  const Grid2& g = bf.grid;
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const double e2 = std::exp(-2 * bf.u(i, j));
      c.J_diff = std::max(c.J_diff, std::abs(other.recomputed.J(i, j) - base.recomputed.J(i, j)));
      c.W_diff =
          std::max(c.W_diff, std::abs(other.recomputed.W(i, j) - base.recomputed.W(i, j) - c.m * e2));
    }
  }
  return c;
}

GeneralizedAudit generalized_audit(const InvariantField& inv, int margin) {
  GeneralizedAudit a;
  const MeanCurvatureReport mc = gauss_map_mean_curvature(inv);
  const Field2<double> hol = holomorphy_field(inv);
  const Grid2& g = inv.grid;
  std::vector<std::complex<double>> ratio;
  a.P_min = INFINITY;
  for (int j = margin; j < g.n2 - margin; ++j) {
    for (int i = margin; i < g.n1 - margin; ++i) {
      a.parallel = std::max(a.parallel, mc.parallel(i, j));
      a.holomorphy = std::max(a.holomorphy, hol(i, j));
      const double p = inv.P(i, j);
      a.P_min = std::min(a.P_min, std::abs(p));
      ratio.push_back(inv.Q(i, j) / (p * p));
    }
  }
  std::complex<double> mean = 0.0;
  for (const auto& r : ratio) mean += r;
  mean /= static_cast<double>(ratio.size());
  double var = 0.0;
  for (const auto& r : ratio) var += std::norm(r - mean);
  var /= static_cast<double>(ratio.size());
  a.ratio_mean = mean.real();
  a.ratio_cv = std::sqrt(var) / std::abs(mean);
  return a;
}

}  // namespace lag
