#include "lag/eds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/numeric/odeint.hpp>

namespace lag {

namespace {

// eta^a = omega[main] + sum_k f_k omega[slot_k]; grad over (q1, q2, p1, p2).
struct EtaTerm {
  int i, j;
  double f;
  Eigen::Vector4d grad;
};
struct EtaForm {
  int i, j;
  std::vector<EtaTerm> terms;
};

std::array<EtaForm, 8> eta_forms(const YPoint& z) {
  using V = Eigen::Vector4d;
  const V zero = V::Zero();
  return {{
      {4, 0, {}},
      {1, 0, {}},
      {2, 1, {{2, 0, -1.0, zero}}},
      {3, 1, {{3, 0, 1.0, zero}}},
      {3, 2, {{2, 0, -z.q1, V(-1, 0, 0, 0)}, {3, 0, -z.q2, V(0, -1, 0, 0)}}},
      {1, 1, {{2, 0, -2 * z.q2, V(0, -2, 0, 0)}, {3, 0, 2 * z.q1, V(2, 0, 0, 0)}}},
      {1, 2, {{2, 0, -z.p1, V(0, 0, -1, 0)}, {3, 0, -z.p2, V(0, 0, 0, -1)}}},
      {1, 3, {{2, 0, -z.p2, V(0, 0, 0, -1)}, {3, 0, z.p1, V(0, 0, 1, 0)}}},
  }};
}

Eigen::Vector4d fibre(const YTangent& x) { return {x.dq1, x.dq2, x.dp1, x.dp2}; }

double torsion_t5(const YPoint& z) { return 2 * z.p1 + z.q1 * z.q1 + z.q2 * z.q2; }
double torsion_t7(const YPoint& z) { return 4 * (z.q1 * z.p1 + z.q2 * z.p2); }
double torsion_t8(const YPoint& z) { return 4 * (z.q1 * z.p2 - z.q2 * z.p1); }

// Coordinates (V11, V12, V21, V22, W11, W12, W21, W22) of an integral plane.
IntegralElement2 element_from(const YPoint& z, const Eigen::Matrix<double, 8, 1>& x) {
  IntegralElement2 e;
  e.base = z;
  e.V << x(0), x(1), x(2), x(3);
  e.W << x(4), x(5), x(6), x(7);
  return e;
}

// d eta^a(e1, e2) = M x + b on the planes with eta = 0 and omega = identity.
void plane_map(const YPoint& z, Eigen::Matrix<double, 8, 8>& M, Eigen::Matrix<double, 8, 1>& b) {
  auto eval = [&](const Eigen::Matrix<double, 8, 1>& x) {
    const IntegralElement2 e = element_from(z, x);
    const Eta d = d_eta(z, e.tangent(1), e.tangent(2));
    return Eigen::Matrix<double, 8, 1>(d.data());
  };
  b = eval(Eigen::Matrix<double, 8, 1>::Zero());
  for (int k = 0; k < 8; ++k) M.col(k) = eval(Eigen::Matrix<double, 8, 1>::Unit(k)) - b;
}

int rank_of(const Eigen::MatrixXd& m, double tol = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

}  // namespace

YTangent IntegralElement2::tangent(int j) const {
  YTangent t;
  t.a = canonical_connection(j == 1 ? 1.0 : 0.0, j == 2 ? 1.0 : 0.0, base.q1, base.q2, base.p1, base.p2, base.p3());
  t.dq1 = V(0, j - 1);
  t.dq2 = V(1, j - 1);
  t.dp1 = W(0, j - 1);
  t.dp2 = W(1, j - 1);
  return t;
}

Eta eta_eval(const YPoint& z, const YTangent& xi) {
  const Mat6& a = xi.a;
  const double w1 = a(2, 0), w2 = a(3, 0);
  return {a(4, 0),
          a(1, 0),
          a(2, 1) - w1,
          a(3, 1) + w2,
          a(3, 2) - z.q1 * w1 - z.q2 * w2,
          a(1, 1) - 2 * z.q2 * w1 + 2 * z.q1 * w2,
          a(1, 2) - z.p1 * w1 - z.p2 * w2,
          a(1, 3) - z.p2 * w1 + z.p1 * w2};
}

Eta d_eta(const YPoint& z, const YTangent& x, const YTangent& y) {
  const Mat6 dw = -(x.a * y.a - y.a * x.a);
  const Eigen::Vector4d fx = fibre(x), fy = fibre(y);
  const auto forms = eta_forms(z);
  Eta out{};
  for (int k = 0; k < 8; ++k) {
    const EtaForm& e = forms[k];
    double v = dw(e.i, e.j);
    for (const EtaTerm& t : e.terms)
      v += t.grad.dot(fx) * y.a(t.i, t.j) - t.grad.dot(fy) * x.a(t.i, t.j) + t.f * dw(t.i, t.j);
    out[k] = v;
  }
  return out;
}

std::array<double, 5> quadratic_residual(const IntegralElement2& e) {
  const Eta d = d_eta(e.base, e.tangent(1), e.tangent(2));
  double m = 0.0;
  for (int k = 0; k < 4; ++k) m = std::max(m, std::abs(d[k]));
  return {m, d[4], d[5], d[6], d[7]};
}

std::array<double, 5> quadratic_expected(const IntegralElement2& e) {
  const YPoint& z = e.base;
  const Mat2& V = e.V;
  const Mat2& W = e.W;
  // (pi^i ^ omega^j)(e1, e2) = pi^i(e1) delta_2j - pi^i(e2) delta_1j
  auto wedge = [](const Mat2& P, int i, int j) { return (j == 1 ? P(i, 0) : 0.0) - (j == 0 ? P(i, 1) : 0.0); };
  return {0.0,
          -wedge(V, 0, 0) - wedge(V, 1, 1) - torsion_t5(z),
          2 * wedge(V, 0, 1) - 2 * wedge(V, 1, 0) + 2 * z.p2,
          -wedge(W, 0, 0) - wedge(W, 1, 1) - torsion_t7(z),
          wedge(W, 0, 1) - wedge(W, 1, 0) - torsion_t8(z)};
}

IntegralElement2 IntegralFamily::element(const Eigen::VectorXd& s) const {
  const Eigen::Matrix<double, 8, 1> x = offset + basis * s;
  return element_from(base, x);
}

Eigen::Vector4d affine_rhs(const YPoint& z) {
  return {torsion_t5(z), -z.p2, torsion_t7(z), torsion_t8(z)};
}

IntegralFamily integral_elements(const YPoint& z) {
  Eigen::Matrix<double, 8, 8> M;
  Eigen::Matrix<double, 8, 1> b;
  plane_map(z, M, b);
  IntegralFamily fam;
  fam.base = z;
  for (int r = 0; r < 4; ++r) {
    const double lead = M.row(4 + r).cwiseAbs().maxCoeff();
    fam.constraints.row(r) = M.row(4 + r) / lead;
    fam.rhs(r) = -b(4 + r) / lead;
  }
  fam.offset = fam.constraints.completeOrthogonalDecomposition().solve(fam.rhs);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(fam.constraints);
  lu.setThreshold(1e-10);
  fam.basis = lu.kernel();
  fam.dim = 8 - static_cast<int>(lu.rank());
  return fam;
}

Tableau derive_tableau(const YPoint& z) {
  Eigen::Matrix<double, 8, 8> M;
  Eigen::Matrix<double, 8, 1> b;
  plane_map(z, M, b);
  // column of X^r_j in the plane coordinates
  auto col = [](int r, int j) { return r < 2 ? 2 * r + j : 4 + 2 * (r - 2) + j; };
  Tableau t;
  for (int a = 0; a < 8; ++a)
    for (int r = 0; r < 4; ++r) {
      t[a][0](r) = -M(a, col(r, 1));
      t[a][1](r) = M(a, col(r, 0));
    }
  return t;
}

Tableau printed_tableau() {
  using V = Eigen::Vector4d;
  Tableau t;
  for (auto& row : t) row = {V::Zero(), V::Zero()};
  t[4] = {V(-1, 0, 0, 0), V(0, -1, 0, 0)};
  t[5] = {V(0, -2, 0, 0), V(2, 0, 0, 0)};
  t[6] = {V(0, 0, -1, 0), V(0, 0, 0, -1)};
  t[7] = {V(0, 0, 0, -1), V(0, 0, 1, 0)};
  return t;
}

Characters cartan_test(const Tableau& t, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Characters ch;
  for (int draw = 0; draw < 3; ++draw) {
    const double c1 = nd(rng), c2 = nd(rng);
    Eigen::MatrixXd m(8, 4);
    for (int a = 0; a < 8; ++a) m.row(a) = (c1 * t[a][0] + c2 * t[a][1]).transpose();
    ch.s1 = std::max(ch.s1, rank_of(m));
  }
  Eigen::MatrixXd all(16, 4);
  for (int a = 0; a < 8; ++a) {
    all.row(2 * a) = t[a][0].transpose();
    all.row(2 * a + 1) = t[a][1].transpose();
  }
  ch.s2 = rank_of(all) - ch.s1;
  // d eta^a(e1, e2) = sum_r T[a][1][r] X^r_1 - T[a][0][r] X^r_2, unknowns X^r_j at 2 r + j
  Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(8, 8);
  for (int a = 0; a < 8; ++a)
    for (int r = 0; r < 4; ++r) {
      eq(a, 2 * r) = t[a][1](r);
      eq(a, 2 * r + 1) = -t[a][0](r);
    }
  ch.t = 8 - rank_of(eq);
  ch.involutive = ch.t == ch.s1 + 2 * ch.s2;
  return ch;
}

Characters cartan_characters(const YPoint& z, unsigned seed) {
  Characters ch = cartan_test(derive_tableau(z), seed);
  ch.t = integral_elements(z).dim;
  ch.involutive = ch.t == ch.s1 + 2 * ch.s2;
  return ch;
}

YTangent from_coframe(const YPoint& z, const Coframe14& c) {
  const double w1 = c(0), w2 = c(1);
  Mat6 m = Mat6::Zero();
  m(2, 0) = w1;
  m(3, 0) = w2;
  m(4, 0) = c(2);
  m(1, 0) = c(3);
  m(2, 1) = c(4) + w1;
  m(3, 1) = c(5) - w2;
  m(3, 2) = c(6) + z.q1 * w1 + z.q2 * w2;
  m(1, 1) = c(7) + 2 * z.q2 * w1 - 2 * z.q1 * w2;
  m(1, 2) = c(8) + z.p1 * w1 + z.p2 * w2;
  m(1, 3) = c(9) + z.p2 * w1 - z.p1 * w2;
  YTangent t;
  t.a = complete_algebra(m);
  t.dq1 = c(10);
  t.dq2 = c(11);
  t.dp1 = c(12);
  t.dp2 = c(13);
  return t;
}

Coframe14 to_coframe(const YPoint& z, const YTangent& xi) {
  const Eta e = eta_eval(z, xi);
  Coframe14 c;
  c(0) = xi.a(2, 0);
  c(1) = xi.a(3, 0);
  for (int k = 0; k < 8; ++k) c(2 + k) = e[k];
  c(10) = xi.dq1;
  c(11) = xi.dq2;
  c(12) = xi.dp1;
  c(13) = xi.dp2;
  return c;
}

PolarSpace polar_space(const YPoint& z, const YTangent& e1, PolarForm form, double tol) {
  const Coframe14 c1 = to_coframe(z, e1);
  const double scale = 1.0 + c1.norm();
  const double eta_res = c1.segment<8>(2).cwiseAbs().maxCoeff();
  if (eta_res > tol * scale)
    throw Error(ErrorCode::NotIntegralElement, "eta(E1) = " + std::to_string(eta_res));
  const double a1 = c1(0), a2 = c1(1);
  if (a1 * a1 + a2 * a2 <= tol * scale * scale)
    throw Error(ErrorCode::NotIntegralElement, "omega^1 ^ omega^2 vanishes on E1");

  PolarSpace ps;
  if (form == PolarForm::Generic) {
    ps.equations = Eigen::MatrixXd::Zero(16, 14);
    for (int a = 0; a < 8; ++a) ps.equations(a, 2 + a) = 1.0;
    for (int k = 0; k < 14; ++k) {
      const Eta d = d_eta(z, e1, from_coframe(z, Coframe14::Unit(k)));
      for (int a = 0; a < 8; ++a) ps.equations(8 + a, k) = d[a];
    }
  } else {
    ps.equations = Eigen::MatrixXd::Zero(12, 14);
    for (int a = 0; a < 8; ++a) ps.equations(a, 2 + a) = 1.0;
    const double V1 = c1(10), V2 = c1(11), W1 = c1(12), W2 = c1(13);
    const double t5 = torsion_t5(z), t7 = torsion_t7(z), t8 = torsion_t8(z);
    auto line = [&](int r, int u1, double c_u1, int u2, double c_u2, double w1, double w2) {
      ps.equations(r, u1) = c_u1;
      ps.equations(r, u2) = c_u2;
      ps.equations(r, 0) = w1;
      ps.equations(r, 1) = w2;
    };
    line(8, 10, a1, 11, a2, a2 * t5 - V1, -(a1 * t5 + V2));
    line(9, 10, -a2, 11, a1, -(V2 + z.p2 * a2), V1 + z.p2 * a1);
    if (form == PolarForm::Derived)
      line(10, 12, a1, 13, a2, -(W1 - a2 * t7), -(W2 + a1 * t7));
    else
      line(10, 12, a1, 13, a2, -(W1 + a1 * t7), -(W2 - a2 * t7));
    line(11, 12, -a2, 13, a1, -(W2 - a2 * t8), W1 - a1 * t8);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ps.equations);
  lu.setThreshold(1e-10);
  ps.dim = 14 - static_cast<int>(lu.rank());
  if (ps.dim > 0) {
    const Eigen::MatrixXd k = lu.kernel();
    ps.basis = Eigen::HouseholderQR<Eigen::MatrixXd>(k).householderQ() * Eigen::MatrixXd::Identity(14, ps.dim);
    const Eigen::VectorXd proj = ps.basis * (ps.basis.transpose() * c1);
    ps.containment = (c1 - proj).norm() / c1.norm();
  } else {
    ps.containment = 1.0;
  }
  return ps;
}

IntegralElement2 plane_from_polar(const YPoint& z, const PolarSpace& ps) {
  if (ps.dim != 2) throw Error(ErrorCode::RankDeficient, "polar space of dimension " + std::to_string(ps.dim));
  const Mat2 om = ps.basis.topRows(2);
  const Eigen::MatrixXd e = ps.basis * om.inverse();
  IntegralElement2 el;
  el.base = z;
  el.V << e(10, 0), e(10, 1), e(11, 0), e(11, 1);
  el.W << e(12, 0), e(12, 1), e(13, 0), e(13, 1);
  return el;
}

Mat6 random_group_element(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Eigen::Quaterniond q(u(rng), u(rng), u(rng), u(rng));
  const Mat3 r = q.normalized().toRotationMatrix();
  const Vec3 v(u(rng), u(rng), u(rng));
  Vec3 b(u(rng), u(rng), u(rng));
  b *= 0.5 / std::max(1.0, b.norm());
  return embed_euclidean(r, scale * v) * boost(b) * time_translation(scale * u(rng));
}

YPoint random_ypoint(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  YPoint z;
  z.A = random_group_element(rng);
  z.q1 = u(rng);
  z.q2 = u(rng);
  z.p1 = u(rng);
  z.p2 = u(rng);
  return z;
}

YTangent random_integral_line(const YPoint& z, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Coframe14 c = Coframe14::Zero();
  do {
    c(0) = u(rng);
    c(1) = u(rng);
  } while (c(0) * c(0) + c(1) * c(1) < 1e-2);
  for (int k = 10; k < 14; ++k) c(k) = u(rng);
  return from_coframe(z, c);
}

CauchyData constant_data(double s1, double s2, double r1, double r2, const Mat6& B) {
  CauchyData d;
  d.s1 = [s1](double) { return s1; };
  d.s2 = [s2](double) { return s2; };
  d.r1 = [r1](double) { return r1; };
  d.r2 = [r2](double) { return r2; };
  d.B = B;
  return d;
}

CauchyData sampled_data(const std::vector<double>& t, const std::vector<std::array<double, 4>>& v, const Mat6& B) {
  if (t.size() < 5 || t.size() != v.size())
    throw Error(ErrorCode::ConfigError, "sampled Cauchy data needs at least 5 matching rows");
  const double h = (t.back() - t.front()) / (t.size() - 1);
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs(t[k] - t[0] - k * h) > 1e-9 * (1 + std::abs(t.back())))
      throw Error(ErrorCode::ConfigError, "sampled Cauchy data must be uniform in t");
  CauchyData d;
  std::array<std::function<double(double)>, 4> f;
  for (int c = 0; c < 4; ++c) {
    std::vector<double> col(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) col[k] = v[k][c];
    auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        col.begin(), col.end(), t.front(), h);
    f[c] = [spline](double x) { return (*spline)(x); };
  }
  d.s1 = f[0];
  d.s2 = f[1];
  d.r1 = f[2];
  d.r2 = f[3];
  d.B = B;
  d.t0 = t.front();
  d.t1 = t.back();
  d.t_base = t.front();
  return d;
}

Mat6 beta_form(const CauchyData& d, double t) {
  const double s1 = d.s1(t), s2 = d.s2(t), r1 = d.r1(t), r2 = d.r2(t);
  Mat6 b = Mat6::Zero();
  b(1, 1) = 2 * s2;
  b(1, 2) = r1;
  b(1, 3) = r2;
  b(2, 0) = 1;
  b(2, 1) = 1;
  b(2, 3) = -s1;
  b(2, 4) = r1;
  b(3, 2) = s1;
  b(3, 4) = r2;
  b(4, 2) = 1;
  b(4, 4) = -2 * s2;
  b(5, 2) = 1;
  return b;
}

InitialCurve integrate_initial_curve(const CauchyData& d, int n, double abs_tol, double rel_tol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 36>;
  if (n < 2) throw Error(ErrorCode::GridTooSmall, "initial curve needs at least 2 nodes");
  if (d.t_base < d.t0 || d.t_base > d.t1) throw Error(ErrorCode::ConfigError, "t_base outside [t0, t1]");

  InitialCurve c;
  c.t.resize(n);
  c.points.resize(n);
  c.tangents.resize(n);
  const double h = (d.t1 - d.t0) / (n - 1);
  for (int k = 0; k < n; ++k) c.t[k] = d.t0 + k * h;

  auto system = [&](const State& x, State& dx, double t) {
    const Eigen::Map<const Mat6> g(x.data());
    Eigen::Map<Mat6>(dx.data()) = g * beta_form(d, t);
  };
  std::vector<Mat6> frames(n);
  auto sweep = [&](std::vector<double> times, std::vector<int> idx) {
    if (times.size() < 2) return;
    State x;
    Eigen::Map<Mat6>(x.data()) = d.B;
    std::size_t seen = 0;
    auto observer = [&](const State& s, double) {
      if (seen > 0) frames[idx[seen - 1]] = Eigen::Map<const Mat6>(s.data());
      ++seen;
    };
    const double dt0 = (times[1] - times[0]) * 0.1;
    try {
      c.steps += static_cast<int>(odeint::integrate_times(
          odeint::make_dense_output(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>()), system, x, times.begin(),
          times.end(), dt0, observer, odeint::max_step_checker(100000)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::StepFailure, e.what());
    }
  };
  std::vector<double> fwd{d.t_base}, bwd{d.t_base};
  std::vector<int> fi, bi;
  for (int k = 0; k < n; ++k) {
    if (std::abs(c.t[k] - d.t_base) <= 1e-14 * (1 + std::abs(d.t_base))) {
      frames[k] = d.B;
    } else if (c.t[k] > d.t_base) {
      fwd.push_back(c.t[k]);
      fi.push_back(k);
    }
  }
  for (int k = n - 1; k >= 0; --k)
    if (c.t[k] < d.t_base && std::abs(c.t[k] - d.t_base) > 1e-14 * (1 + std::abs(d.t_base))) {
      bwd.push_back(c.t[k]);
      bi.push_back(k);
    }
  sweep(fwd, fi);
  sweep(bwd, bi);

  const double e = 1e-4;
  auto deriv = [e](const std::function<double(double)>& f, double t) {
    return (f(t - 2 * e) - 8 * f(t - e) + 8 * f(t + e) - f(t + 2 * e)) / (12 * e);
  };
  for (int k = 0; k < n; ++k) {
    const double t = c.t[k];
    YPoint& p = c.points[k];
    p.A = frames[k];
    p.q1 = d.s1(t);
    p.q2 = d.s2(t);
    p.p1 = d.r1(t);
    p.p2 = d.r2(t);
    YTangent& tg = c.tangents[k];
    tg.a = beta_form(d, t);
    tg.dq1 = deriv(d.s1, t);
    tg.dq2 = deriv(d.s2, t);
    tg.dp1 = deriv(d.r1, t);
    tg.dp2 = deriv(d.r2, t);
    c.drift = std::max(c.drift, (p.A.transpose() * eta() * p.A - eta()).cwiseAbs().maxCoeff());
  }
  return c;
}

namespace {

struct MarchState {
  std::vector<Mat6> A;
  Eigen::ArrayXd q1, q2, p1, p2, a, c;

  explicit MarchState(int n = 0)
      : A(n, Mat6::Zero()), q1(Eigen::ArrayXd::Zero(n)), q2(q1), p1(q1), p2(q1), a(q1), c(q1) {}

  MarchState axpy(double h, const MarchState& d) const {
    MarchState r(*this);
    for (std::size_t i = 0; i < A.size(); ++i) r.A[i] += h * d.A[i];
    r.q1 += h * d.q1;
    r.q2 += h * d.q2;
    r.p1 += h * d.p1;
    r.p2 += h * d.p2;
    r.a += h * d.a;
    r.c += h * d.c;
    return r;
  }
};

Eigen::ArrayXd d_dx(const Eigen::ArrayXd& f, const std::vector<Stencil>& st) {
  Eigen::ArrayXd out(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    double acc = 0.0;
    for (std::size_t m = 0; m < st[i].nodes.size(); ++m) acc += st[i].weights[m] * f(st[i].nodes[m]);
    out(i) = acc;
  }
  return out;
}

constexpr double kBinom8[9] = {1, -8, 28, -56, 70, -56, 28, -8, 1};

// Undivided 8th difference / 256 at interior nodes; 1 on the Nyquist mode.
Eigen::ArrayXd high_pass(const Eigen::ArrayXd& f) {
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(f.size());
  for (Eigen::Index i = 4; i + 4 < f.size(); ++i) {
    double acc = 0.0;
    for (int m = 0; m < 9; ++m) acc += kBinom8[m] * f(i - 4 + m);
    out(i) = acc / 256.0;
  }
  return out;
}

MarchState march_rhs(const MarchState& s, const std::vector<Stencil>& st, double gauge_det) {
  const int n = static_cast<int>(s.A.size());
  const Eigen::ArrayXd q1x = d_dx(s.q1, st), q2x = d_dx(s.q2, st), p1x = d_dx(s.p1, st), p2x = d_dx(s.p2, st);
  MarchState d(n);
  for (int i = 0; i < n; ++i) {
    const double a = s.a(i), c = s.c(i);
    if (!(a > gauge_det)) throw Error(ErrorCode::StepFailure, "gauge determinant below threshold", {{i, 0}});
    const double Q1 = s.q1(i), Q2 = s.q2(i), P1 = s.p1(i), P2 = s.p2(i), P3 = -P1;
    const double k = c / a;
    Eigen::Matrix4d m;
    m << 1, k, 0, 0,
        -k, 1, 0, 0,
        0, 0, 1, k,
        0, 0, k, 1;
    const Eigen::Vector4d rhs(q2x(i) / a - (P3 - P1 - Q1 * Q1 - Q2 * Q2),
                              -P2 - q1x(i) / a,
                              p2x(i) / a + 3 * Q1 * P1 + 4 * Q2 * P2 - Q1 * P3,
                              -p1x(i) / a + 3 * Q2 * P3 + 4 * Q1 * P2 - Q2 * P1);
    const Eigen::Vector4d y = m.partialPivLu().solve(rhs);
    d.q1(i) = y(0);
    d.q2(i) = y(1);
    d.p1(i) = y(2);
    d.p2(i) = y(3);
    d.a(i) = -Q1 * a;
    d.c(i) = -Q2 * a;
    d.A[i] = s.A[i] * canonical_connection(0.0, 1.0, Q1, Q2, P1, P2, P3);
  }
  return d;
}

double hf_energy(const MarchState& s) {
  double e = 0.0;
  for (const Eigen::ArrayXd* f : {&s.q1, &s.q2, &s.p1, &s.p2}) e = std::max(e, high_pass(*f).abs().maxCoeff());
  return e;
}

double field_scale(const MarchState& s) {
  double e = 0.0;
  for (const Eigen::ArrayXd* f : {&s.q1, &s.q2, &s.p1, &s.p2}) e = std::max(e, f->abs().maxCoeff());
  return e;
}

}  // namespace

MarchResult extend_surface(const InitialCurve& curve, int steps, double h_y, const MarchOptions& opt) {
  const int n = static_cast<int>(curve.t.size());
  if (n < 9) throw Error(ErrorCode::GridTooSmall, "march needs at least 9 nodes along the curve");
  if (steps < 1 || !(h_y > 0)) throw Error(ErrorCode::ConfigError, "march needs steps >= 1 and h_y > 0");
  if (steps * h_y > opt.max_height * (1 + 1e-12))
    throw Error(ErrorCode::IllPosedGrowth, "domain height " + std::to_string(steps * h_y) + " above the limit");

  const double hx = curve.t[1] - curve.t[0];
  std::vector<Stencil> st(n);
  for (int i = 0; i < n; ++i) st[i] = line_stencil(n, i, 1, hx, opt.accuracy);

  MarchState s(n);
  for (int i = 0; i < n; ++i) {
    const YPoint& p = curve.points[i];
    s.A[i] = p.A;
    s.q1(i) = p.q1;
    s.q2(i) = p.q2;
    s.p1(i) = p.p1;
    s.p2(i) = p.p2;
    s.a(i) = 1.0;
    s.c(i) = 0.0;
  }

  MarchResult res;
  YGrid& y = res.solution;
  y.grid = Grid2(n, steps + 1, curve.t.front(), curve.t.back(), 0.0, steps * h_y);
  y.frames = Field2<Mat6>(y.grid);
  y.q1 = y.q2 = y.p1 = y.p2 = y.a = y.c = Field2<double>(y.grid);
  auto store = [&](int j) {
    for (int i = 0; i < n; ++i) {
      y.frames(i, j) = s.A[i];
      y.q1(i, j) = s.q1(i);
      y.q2(i, j) = s.q2(i);
      y.p1(i, j) = s.p1(i);
      y.p2(i, j) = s.p2(i);
      y.a(i, j) = s.a(i);
      y.c(i, j) = s.c(i);
    }
  };
  store(0);
  const double floor = 1e-8 * (1.0 + field_scale(s));
  const double hf0 = std::max(hf_energy(s), floor);

  for (int j = 1; j <= steps; ++j) {
    const MarchState k1 = march_rhs(s, st, opt.gauge_det);
    const MarchState k2 = march_rhs(s.axpy(0.5 * h_y, k1), st, opt.gauge_det);
    const MarchState k3 = march_rhs(s.axpy(0.5 * h_y, k2), st, opt.gauge_det);
    const MarchState k4 = march_rhs(s.axpy(h_y, k3), st, opt.gauge_det);
    s = s.axpy(h_y / 6, k1).axpy(h_y / 3, k2).axpy(h_y / 3, k3).axpy(h_y / 6, k4);
    if (opt.filter > 0)
      for (Eigen::ArrayXd* f : {&s.q1, &s.q2, &s.p1, &s.p2, &s.a, &s.c}) *f -= opt.filter * high_pass(*f);
    const double ratio = hf_energy(s) / hf0;
    res.growth.push_back(ratio);
    if (!std::isfinite(ratio) || ratio > opt.growth)
      throw Error(ErrorCode::IllPosedGrowth,
                  "high-frequency growth " + std::to_string(ratio) + " at step " + std::to_string(j));
    store(j);
  }
  return res;
}

double SolutionReport::eta_max() const { return *std::max_element(eta.begin(), eta.end()); }

SolutionReport verify_solution(const YGrid& y) {
  const Grid2& g = y.grid;
  if (g.n1 < 5 || g.n2 < 5) throw Error(ErrorCode::GridTooSmall, "need at least 5 nodes per direction");
  const ConnectionForm cf = connection_from_frames(g, y.frames);
  SolutionReport rep;
  rep.eta_field = Field2<double>(g);
  InvariantField inv;
  inv.grid = g;
  inv.q1 = y.q1;
  inv.q2 = y.q2;
  inv.p1 = y.p1;
  inv.p2 = y.p2;
  inv.p3 = Field2<double>(g);
  inv.coframe = Field2<Mat2>(g);
  const bool gauge = y.a.size() == g.size();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const YPoint z{y.frames[k], y.q1[k], y.q2[k], y.p1[k], y.p2[k]};
    inv.p3[k] = -y.p1[k];
    inv.coframe[k] << cf.mx[k](2, 0), cf.my[k](2, 0), cf.mx[k](3, 0), cf.my[k](3, 0);
    for (const Mat6* m : {&cf.mx[k], &cf.my[k]}) {
      YTangent t;
      t.a = *m;
      const Eta e = eta_eval(z, t);
      for (int a = 0; a < 8; ++a) {
        rep.eta[a] = std::max(rep.eta[a], std::abs(e[a]));
        rep.eta_field[k] = std::max(rep.eta_field[k], std::abs(e[a]));
      }
    }
    rep.l_minimal = std::max(rep.l_minimal, std::abs(y.p1[k] + inv.p3[k]));
    if (gauge) {
      Mat2 expect;
      expect << y.a[k], 0.0, y.c[k], 1.0;
      rep.gauge = std::max(rep.gauge, (inv.coframe[k] - expect).cwiseAbs().maxCoeff());
    }
  }
  rep.maurer_cartan = flatness_residual(cf);
  rep.algebra = algebra_residual(cf);
  rep.se = structure_residuals(inv);
  return rep;
}

YPoint surface_ypoint(const SurfacePatch& patch, const Vec2& reference, double u, double v) {
  const NodeAnalysis na = analyze_node(patch.jet(u, v), reference);
  Mat2 c;
  c << na.alpha_u(2, 0), na.alpha_v(2, 0), na.alpha_u(3, 0), na.alpha_v(3, 0);
  const auto lu = c.transpose().partialPivLu();
  const Vec2 a32 = lu.solve(Vec2(na.alpha_u(3, 2), na.alpha_v(3, 2)));
  const Vec2 a12 = lu.solve(Vec2(na.alpha_u(1, 2), na.alpha_v(1, 2)));
  return {na.canonical, a32(0), a32(1), a12(0), a12(1)};
}

Vec2 CatenoidCauchy::uv(double x, double y) const {
  const double u = -std::asinh(x);
  return {u, v0 - y / std::cosh(u)};
}

CatenoidCauchy catenoid_cauchy(double v0, double t0, double t1, double t_base) {
  CatenoidCauchy cc;
  cc.patch = catalog_surface("catenoid");
  cc.v0 = v0;
  cc.reference = principal_reference(cc.patch.jet(-std::asinh(t_base), v0));
  const SurfacePatch patch = cc.patch;
  const Vec2 ref = cc.reference;
  auto at = [patch, ref, v0](double t) { return surface_ypoint(patch, ref, -std::asinh(t), v0); };
  cc.data.s1 = [at](double t) { return at(t).q1; };
  cc.data.s2 = [at](double t) { return at(t).q2; };
  cc.data.r1 = [at](double t) { return at(t).p1; };
  cc.data.r2 = [at](double t) { return at(t).p2; };
  cc.data.B = at(t_base).A;
  cc.data.t0 = t0;
  cc.data.t1 = t1;
  cc.data.t_base = t_base;
  return cc;
}

double frame_error(const YGrid& y, const CatenoidCauchy& cc) {
  double e = 0.0;
  for (int j = 0; j < y.grid.n2; ++j)
    for (int i = 0; i < y.grid.n1; ++i) {
      const Vec2 w = cc.uv(y.grid.x1(i), y.grid.x2(j));
      const YPoint z = surface_ypoint(cc.patch, cc.reference, w(0), w(1));
      const double d = (y.frames(i, j) - z.A).cwiseAbs().maxCoeff();
      if (!(d <= e)) e = std::isnan(d) ? INFINITY : d;
    }
  return e;
}

YGrid lift_to_y(const CanonicalFrameField& cf, const InvariantField& inv) {
  YGrid y;
  y.grid = cf.grid;
  y.frames = cf.frame;
  y.q1 = inv.q1;
  y.q2 = inv.q2;
  y.p1 = inv.p1;
  y.p2 = inv.p2;
  return y;
}

}  // namespace lag
