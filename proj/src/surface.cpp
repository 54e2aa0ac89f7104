#include "lag/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

namespace lag {

namespace {

using T4 = Tps<4>;
using T3 = Tps<3>;
using T2 = Tps<2>;
using T1 = Tps<1>;

constexpr int kPerm[6] = {5, 4, 2, 3, 1, 0};
constexpr double kSgn[6] = {-1, -1, 1, 1, -1, -1};

// eta A^T eta, written out for generic scalars.
template <class S>
M6<S> eta_transpose(const M6<S>& a) {
  M6<S> r;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) r(i, j) = (kSgn[i] * kSgn[j]) * a(kPerm[j], kPerm[i]);
  return r;
}

template <class S>
M6<S> mul(const M6<S>& a, const M6<S>& b) {
  M6<S> r;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      S acc = a(i, 0) * b(0, j);
      for (int k = 1; k < 6; ++k) acc += a(i, k) * b(k, j);
      r(i, j) = acc;
    }
  }
  return r;
}

template <class S>
S dot3(const V3<S>& a, const V3<S>& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

template <class S>
V3<S> cross3(const V3<S>& a, const V3<S>& b) {
  return V3<S>(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

template <int D, int E>
V3<Tps<E>> trunc3(const V3<Tps<D>>& v) {
  return V3<Tps<E>>(v(0).template truncate<E>(), v(1).template truncate<E>(), v(2).template truncate<E>());
}

Vec3 val3(const V3<T2>& v) { return Vec3(v(0).value(), v(1).value(), v(2).value()); }
template <int D>
Vec3 vals(const V3<Tps<D>>& v) {
  return Vec3(v(0).value(), v(1).value(), v(2).value());
}

// Shape operator and curvatures as degree-2 jets.
struct Curvature2 {
  V3<T2> x, n, xu, xv, nu, nv;
  T2 E, F, G, L, M, N, e, f, g;
  T2 S00, S01, S10, S11, H, K;
};

Curvature2 curvature2(const NodeJet& jet) {
  Curvature2 c;
  const V3<T3> xu3 = derivative(jet.x, 0), xv3 = derivative(jet.x, 1);
  c.x = trunc3<4, 2>(jet.x);
  c.n = trunc3<3, 2>(jet.n);
  c.xu = trunc3<3, 2>(xu3);
  c.xv = trunc3<3, 2>(xv3);
  const V3<T2> xuu = derivative(xu3, 0), xuv = derivative(xu3, 1), xvv = derivative(xv3, 1);
  c.nu = derivative(jet.n, 0);
  c.nv = derivative(jet.n, 1);
  c.E = dot3(c.xu, c.xu);
  c.F = dot3(c.xu, c.xv);
  c.G = dot3(c.xv, c.xv);
  c.L = dot3(xuu, c.n);
  c.M = dot3(xuv, c.n);
  c.N = dot3(xvv, c.n);
  c.e = dot3(c.nu, c.nu);
  c.f = dot3(c.nu, c.nv);
  c.g = dot3(c.nv, c.nv);
  const T2 inv = 1.0 / (c.E * c.G - c.F * c.F);
  c.S00 = (c.G * c.L - c.F * c.M) * inv;
  c.S01 = (c.G * c.M - c.F * c.N) * inv;
  c.S10 = (c.E * c.M - c.F * c.L) * inv;
  c.S11 = (c.E * c.N - c.F * c.M) * inv;
  c.H = 0.5 * (c.S00 + c.S11);
  c.K = c.S00 * c.S11 - c.S01 * c.S10;
  return c;
}

Mat2 sym2(double a, double b, double c) {
  Mat2 m;
  m << a, b, b, c;
  return m;
}

// Lorentz metric induced by sigma = (H/K, x + (H/K) n).
Mat2 sigma_metric_of(const Curvature2& c) {
  const T2 hk = c.H / c.K;
  const double h = hk.value();
  const double hu = hk.partial(1, 0), hv = hk.partial(0, 1);
  const Vec3 n = val3(c.n);
  const Vec3 su = val3(c.xu) + h * val3(c.nu) + hu * n;
  const Vec3 sv = val3(c.xv) + h * val3(c.nv) + hv * n;
  return sym2(su.dot(su) - hu * hu, su.dot(sv) - hu * hv, sv.dot(sv) - hv * hv);
}

// Coefficients in the coframe basis of the 1-form (fu, fv).
Vec2 coframe_coeffs(const Mat2& c, double fu, double fv) { return c.transpose().lu().solve(Vec2(fu, fv)); }

SurfacePatch patch_with_domain(SurfacePatch p, const Params& prm) {
  p.domain.u0 = param(prm, "u0", p.domain.u0);
  p.domain.u1 = param(prm, "u1", p.domain.u1);
  p.domain.v0 = param(prm, "v0", p.domain.v0);
  p.domain.v1 = param(prm, "v1", p.domain.v1);
  return p;
}

}  // namespace

SurfacePatch catalog_surface(const std::string& name, const Params& prm) {
  const int orient = param(prm, "orientation", 1.0) < 0 ? -1 : 1;
  SurfacePatch p;
  if (name == "plane") {
    p = make_patch(name, PlaneSurface{}, {-1, 1, -1, 1}, orient);
  } else if (name == "sphere") {
    p = make_patch(name, SphereSurface{param(prm, "radius", 1.0)}, {-0.6, 0.6, -0.6, 0.6}, orient);
  } else if (name == "cylinder") {
    p = make_patch(name, CylinderSurface{param(prm, "radius", 1.0)}, {-0.6, 0.6, -0.6, 0.6}, orient);
  } else if (name == "torus") {
    p = make_patch(name, TorusSurface{param(prm, "R", 2.0), param(prm, "rho", 0.5)}, {-0.8, 0.8, -0.6, 0.6},
                   orient);
  } else if (name == "catenoid") {
    p = make_patch(name, CatenoidSurface{param(prm, "scale", 1.0)}, {0.1, 0.9, -0.6, 0.6}, orient);
  } else if (name == "enneper") {
    p = make_patch(name, EnneperSurface{}, {0.2, 0.8, 0.1, 0.6}, orient);
  } else if (name == "graph") {
    p = make_patch(name, GraphSurface{}, {0.1, 0.5, 0.0, 0.4}, orient);
  } else if (name == "perturbed_torus") {
    p = make_patch(name,
                   PerturbedTorusSurface{param(prm, "R", 2.0), param(prm, "rho", 0.5), param(prm, "eps", 0.02)},
                   {-0.8, 0.8, -0.6, 0.6}, orient);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown surface '" + name + "'");
  }
  return patch_with_domain(p, prm);
}

namespace {

template <class S>
void transform_lift(const Mat6& a, const V3<S>& x, const V3<S>& n, V3<S>& xp, V3<S>& np) {
  const V6<S> pa = embed_sphere<S>(S(0.0), x);
  const V6<S> pb = embed_plane<S>(n, x);
  V6<S> qa, qb;
  for (int i = 0; i < 6; ++i) {
    qa(i) = pa(0) * a(i, 0);
    qb(i) = pb(0) * a(i, 0);
    for (int k = 1; k < 6; ++k) {
      qa(i) += pa(k) * a(i, k);
      qb(i) += pb(k) * a(i, k);
    }
  }
  extract_contact_generic<S>(qa, qb, xp, np);
}

}  // namespace

SurfacePatch laguerre_transformed(const SurfacePatch& base, const Mat6& a) {
  if (!base.jet5) throw Error(ErrorCode::ConfigError, "patch has no fifth-order jets to transform");
  SurfacePatch p;
  p.name = base.name + "'";
  p.domain = base.domain;
  auto jet5 = base.jet5;
  p.point = [jet5, a](double u, double v) {
    const NodeJet5 j = jet5(u, v);
    V3<double> x = vals(j.x), n = vals(j.n), xp, np;
    transform_lift<double>(a, x, n, xp, np);
    return Vec3(xp);
  };
  p.jet = [jet5, a](double u, double v) {
    const NodeJet5 j = jet5(u, v);
    V3<T4> xp, np;
    transform_lift<T4>(a, trunc3<5, 4>(j.x), j.n, xp, np);
    NodeJet out;
    out.x = xp;
    out.n = trunc3<4, 3>(np);
    return out;
  };
  const double uc = 0.5 * (p.domain.u0 + p.domain.u1), vc = 0.5 * (p.domain.v0 + p.domain.v1);
  const NodeJet c = p.jet(uc, vc);
  const Vec3 xu(c.x(0).partial(1, 0), c.x(1).partial(1, 0), c.x(2).partial(1, 0));
  const Vec3 xv(c.x(0).partial(0, 1), c.x(1).partial(0, 1), c.x(2).partial(0, 1));
  p.orientation = xu.cross(xv).dot(vals(c.n)) >= 0 ? 1 : -1;
  return p;
}

JetField sample_jets(const SurfacePatch& patch, int nu, int nv, JetMode mode, double fd_step) {
  if (nu < 9 || nv < 9) throw Error(ErrorCode::GridTooSmall, "jet sampling needs at least 9 nodes per direction");
  JetField jf;
  jf.grid = Grid2(nu, nv, patch.domain.u0, patch.domain.u1, patch.domain.v0, patch.domain.v1);
  jf.jets = Field2<NodeJet>(jf.grid);
  if (mode == JetMode::Analytic && !patch.jet) mode = JetMode::FiniteDifference;
  jf.mode = mode;
  const Grid2& g = jf.grid;

  std::vector<Stencil> st(5);
  const double h = fd_step > 0 ? fd_step : std::min(g.h1(), g.h2());
  for (int o = 0; o <= 4; ++o) st[o] = line_stencil(7, 3, o, h, 4);

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < static_cast<int>(g.size()); ++k) {
    const int i = k % g.n1, j = k / g.n1;
    const double u = g.x1(i), v = g.x2(j);
    if (mode == JetMode::Analytic) {
      jf.jets[k] = patch.jet(u, v);
      continue;
    }
    Vec3 samp[7][7];
    for (int a = 0; a < 7; ++a)
      for (int b = 0; b < 7; ++b) samp[a][b] = patch.point(u + (a - 3) * h, v + (b - 3) * h);
    NodeJet jet;
    for (int p = 0; p <= 4; ++p) {
      for (int q = 0; p + q <= 4; ++q) {
        Vec3 d = Vec3::Zero();
        for (std::size_t a = 0; a < st[p].nodes.size(); ++a)
          for (std::size_t b = 0; b < st[q].nodes.size(); ++b)
            d += st[p].weights[a] * st[q].weights[b] * samp[st[p].nodes[a]][st[q].nodes[b]];
        const double scale = 1.0 / (T4::factorial(p) * T4::factorial(q));
        for (int c = 0; c < 3; ++c) jet.x(c).coef(p, q) = d(c) * scale;
      }
    }
    jet.n = unit_normal<4>(jet.x, patch.orientation);
    jf.jets[k] = jet;
  }

  std::vector<std::pair<int, int>> bad;
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const NodeJet& jet = jf.jets(i, j);
      const Vec3 xu(jet.x(0).partial(1, 0), jet.x(1).partial(1, 0), jet.x(2).partial(1, 0));
      const Vec3 xv(jet.x(0).partial(0, 1), jet.x(1).partial(0, 1), jet.x(2).partial(0, 1));
      if (xu.cross(xv).norm() < default_tolerances().immersion) bad.emplace_back(i, j);
    }
  }
  if (!bad.empty())
    throw Error(ErrorCode::NotImmersed, std::to_string(bad.size()) + " nodes with x_u x x_v = 0", bad);
  return jf;
}

FundamentalForms fundamental_forms(const NodeJet& jet) {
  const Curvature2 c = curvature2(jet);
  FundamentalForms f;
  f.first = sym2(c.E.value(), c.F.value(), c.G.value());
  f.second = sym2(c.L.value(), c.M.value(), c.N.value());
  f.third = sym2(c.e.value(), c.f.value(), c.g.value());
  f.H = c.H.value();
  f.K = c.K.value();
  return f;
}

Field2<FundamentalForms> fundamental_forms(const JetField& jf) {
  Field2<FundamentalForms> out(jf.grid);
#pragma omp parallel for
  for (int k = 0; k < static_cast<int>(out.size()); ++k) out[k] = fundamental_forms(jf.jets[k]);
  return out;
}

namespace {

// Eigenvector of the shape operator for the larger principal curvature a.
template <class S>
Eigen::Matrix<S, 2, 1> principal_w(const S& s00, const S& s01, const S& s10, const S& s11, const S& a) {
  Eigen::Matrix<S, 2, 1> w1(s01, a - s00), w2(a - s11, s10);
  const double n1 = std::pow(value_of(w1(0)), 2) + std::pow(value_of(w1(1)), 2);
  const double n2 = std::pow(value_of(w2(0)), 2) + std::pow(value_of(w2(1)), 2);
  return n1 > n2 ? w1 : w2;
}

}  // namespace

Vec2 principal_reference(const NodeJet& jet) {
  const FundamentalForms f = fundamental_forms(jet);
  const Mat2 s = f.first.inverse() * f.second;
  const double a = f.H + std::sqrt(std::max(0.0, f.H * f.H - f.K));
  return principal_w<double>(s(0, 0), s(0, 1), s(1, 0), s(1, 1), a).normalized();
}

NodeAnalysis analyze_node(const NodeJet& jet, const Vec2& reference) {
  const Curvature2 c = curvature2(jet);
  NodeAnalysis na;
  const T2 disc = sqrt(c.H * c.H - c.K);
  const T2 a = c.H + disc, cc = c.H - disc;
  Eigen::Matrix<T2, 2, 1> w = principal_w<T2>(c.S00, c.S01, c.S10, c.S11, a);
  if (w(0).value() * reference(0) + w(1).value() * reference(1) < 0) w = -w;

  V3<T2> e2 = c.xu * w(0) + c.xv * w(1);
  e2 = e2 * (1.0 / sqrt(dot3(e2, e2)));
  const V3<T2> e3 = cross3(c.n, e2);

  Eigen::Matrix<T2, 3, 3> r;
  r.col(0) = c.n;
  r.col(1) = e2;
  r.col(2) = e3;
  const M6<T2> euclid = euclidean_generic<T2>(r, c.x);

  const T2 hk = c.H / c.K;
  const T2 mu = (a - cc) / (kSqrt2 * c.K);
  Eigen::Matrix<T2, 2, 2> b;
  double sgn = 1.0;
  if (mu.value() > 0) {
    b << T2(1.0), T2(0.0), T2(0.0), T2(1.0);
  } else {
    b << T2(0.0), T2(-1.0), T2(1.0), T2(0.0);
    sgn = -1.0;
  }
  const Eigen::Matrix<T2, 2, 1> zero(T2(0.0), T2(0.0));
  const M6<T2> x1 = l0_element<T2>(kSqrt2 * hk, sgn * mu, b, zero);
  const M6<T2> adapted = mul(euclid, x1);

  // first-order connection, then the second-order adaptation y
  const M6<T1> ad1 = truncate_to<1>(adapted);
  const M6<T1> ead = eta_transpose(ad1);
  const M6<T1> au1 = mul(ead, derivative(adapted, 0));
  const M6<T1> av1 = mul(ead, derivative(adapted, 1));
  const T1 c00 = au1(2, 0), c01 = av1(2, 0), c10 = au1(3, 0), c11 = av1(3, 0);
  const T1 b0 = au1(1, 0), b1 = av1(1, 0);
  const T1 idet = 1.0 / (c00 * c11 - c10 * c01);
  Eigen::Matrix<T1, 2, 1> y((c11 * b0 - c10 * b1) * idet, (c00 * b1 - c01 * b0) * idet);
  Eigen::Matrix<T1, 2, 2> id;
  id << T1(1.0), T1(0.0), T1(0.0), T1(1.0);
  const M6<T1> x2 = l0_element<T1>(T1(0.0), T1(1.0), id, y);
  const M6<T1> canon = mul(ad1, x2);

  const Mat6 cv = values_of(canon);
  const Mat6 ecv = eta_transpose<double>(cv);
  na.alpha_u = ecv * values_of(derivative(canon, 0));
  na.alpha_v = ecv * values_of(derivative(canon, 1));
  na.canonical = cv;
  na.adapted = values_of(adapted);
  na.euclid = values_of(euclid);
  na.y = Vec2(y(0).value(), y(1).value());
  na.mu = mu.value();

  na.x = val3(c.x);
  na.n = val3(c.n);
  na.e2 = val3(e2);
  na.e3 = val3(e3);
  na.a = a.value();
  na.c = cc.value();
  na.H = c.H.value();
  na.K = c.K.value();
  na.hk = hk.value();
  na.dhk = Vec2(hk.partial(1, 0), hk.partial(0, 1));
  na.w = Vec2(w(0).value(), w(1).value());
  na.forms.first = sym2(c.E.value(), c.F.value(), c.G.value());
  na.forms.second = sym2(c.L.value(), c.M.value(), c.N.value());
  na.forms.third = sym2(c.e.value(), c.f.value(), c.g.value());
  na.forms.H = na.H;
  na.forms.K = na.K;

  const Vec3 xu = val3(c.xu), xv = val3(c.xv), nu = val3(c.nu), nv = val3(c.nv);
  na.phi2 = Vec2(xu.dot(na.e2), xv.dot(na.e2));
  na.phi3 = Vec2(xu.dot(na.e3), xv.dot(na.e3));
  na.phi21 = Vec2(nu.dot(na.e2), nv.dot(na.e2));
  na.phi31 = Vec2(nu.dot(na.e3), nv.dot(na.e3));
  const Vec3 e2u = vals(derivative(e2, 0)), e2v = vals(derivative(e2, 1));
  na.phi32 = Vec2(e2u.dot(na.e3), e2v.dot(na.e3));

  // Laplace-Beltrami of H/K for III: div(sqrt|g| g^{-1} grad f) / sqrt|g|
  const T1 ge = c.e.truncate<1>(), gf = c.f.truncate<1>(), gg = c.g.truncate<1>();
  const T1 det = ge * gg - gf * gf;
  const T1 sq = sqrt(det);
  const T1 hu = du(hk), hv = dv(hk);
  const T1 flux_u = (gg * hu - gf * hv) / sq;
  const T1 flux_v = (ge * hv - gf * hu) / sq;
  na.el = (du(flux_u).value() + dv(flux_v).value()) / sq.value();

  na.sigma = Vec4(na.hk, na.x(0) + na.hk * na.n(0), na.x(1) + na.hk * na.n(1), na.x(2) + na.hk * na.n(2));
  na.sigma_metric = sigma_metric_of(c);
  return na;
}

PrincipalData principal_frame(const JetField& jf, const Tolerances& tol) {
  const Grid2& g = jf.grid;
  const Field2<FundamentalForms> ff = fundamental_forms(jf);
  double scale = 0.0;
  for (const auto& f : ff.data()) {
    const double d = std::sqrt(std::max(0.0, f.H * f.H - f.K));
    scale = std::max({scale, std::abs(f.H + d), std::abs(f.H - d)});
  }
  std::vector<std::pair<int, int>> umb, par;
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const auto& f = ff(i, j);
      const double gap = 2.0 * std::sqrt(std::max(0.0, f.H * f.H - f.K));
      if (gap <= tol.umbilic * scale) umb.emplace_back(i, j);
      if (std::abs(f.K) <= tol.parabolic * scale * scale) par.emplace_back(i, j);
    }
  }
  if (!umb.empty()) throw Error(ErrorCode::UmbilicPoint, std::to_string(umb.size()) + " umbilic nodes", umb);
  if (!par.empty()) throw Error(ErrorCode::ParabolicPoint, std::to_string(par.size()) + " parabolic nodes", par);

  PrincipalData pd;
  pd.grid = g;
  pd.reference = principal_reference(jf.jets(g.n1 / 2, g.n2 / 2));
  pd.node = Field2<NodeAnalysis>(g);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < static_cast<int>(g.size()); ++k) pd.node[k] = analyze_node(jf.jets[k], pd.reference);
  return pd;
}

CanonicalFrameField canonical_frame(const PrincipalData& pd) {
  CanonicalFrameField cf;
  cf.grid = pd.grid;
  cf.frame = Field2<Mat6>(pd.grid);
  cf.alpha_u = Field2<Mat6>(pd.grid);
  cf.alpha_v = Field2<Mat6>(pd.grid);
  cf.coframe = Field2<Mat2>(pd.grid);
  for (std::size_t k = 0; k < pd.node.size(); ++k) {
    const NodeAnalysis& na = pd.node[k];
    cf.frame[k] = na.canonical;
    cf.alpha_u[k] = na.alpha_u;
    cf.alpha_v[k] = na.alpha_v;
    cf.coframe[k] << na.alpha_u(2, 0), na.alpha_v(2, 0), na.alpha_u(3, 0), na.alpha_v(3, 0);
  }
  return cf;
}

InvariantField invariants_from_connection(const Grid2& g, const Field2<Mat6>& au, const Field2<Mat6>& av,
                                          const Tolerances& tol) {
  InvariantField inv;
  inv.grid = g;
  inv.q1 = inv.q2 = inv.p1 = inv.p2 = inv.p3 = inv.cond = Field2<double>(g);
  inv.coframe = Field2<Mat2>(g);
  std::vector<std::pair<int, int>> bad;
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const Mat6& mu = au(i, j);
      const Mat6& mv = av(i, j);
      Mat2 c;
      c << mu(2, 0), mv(2, 0), mu(3, 0), mv(3, 0);
      inv.coframe(i, j) = c;
      const Eigen::JacobiSVD<Mat2> svd(c);
      const double smin = svd.singularValues()(1);
      const double cond = smin > 0 ? svd.singularValues()(0) / smin : INFINITY;
      inv.cond(i, j) = cond;
      if (!(cond <= tol.coframe_cond)) {
        bad.emplace_back(i, j);
        continue;
      }
      const auto lu = c.transpose().partialPivLu();
      auto coef = [&](int r, int s) { return Vec2(lu.solve(Vec2(mu(r, s), mv(r, s)))); };
      const Vec2 a32 = coef(3, 2), a12 = coef(1, 2), a13 = coef(1, 3);
      inv.q1(i, j) = a32(0);
      inv.q2(i, j) = a32(1);
      inv.p1(i, j) = a12(0);
      inv.p2(i, j) = 0.5 * (a12(1) + a13(0));
      inv.p3(i, j) = a13(1);
      inv.p2_symmetry = std::max(inv.p2_symmetry, std::abs(a12(1) - a13(0)));
      const Vec2 d40 = coef(4, 0), d10 = coef(1, 0);
      const Vec2 d21 = coef(2, 1) - Vec2(1, 0), d31 = coef(3, 1) + Vec2(0, 1);
      inv.canonical_defect =
          std::max({inv.canonical_defect, d40.cwiseAbs().maxCoeff(), d10.cwiseAbs().maxCoeff(),
                    d21.cwiseAbs().maxCoeff(), d31.cwiseAbs().maxCoeff()});
      const Vec2 d11 = coef(1, 1) - Vec2(2 * a32(1), -2 * a32(0));
      inv.alpha11_defect = std::max(inv.alpha11_defect, d11.cwiseAbs().maxCoeff());
    }
  }
  if (!bad.empty())
    throw Error(ErrorCode::IllConditionedCoframe, std::to_string(bad.size()) + " nodes above the condition bound",
                bad);
  return inv;
}

InvariantField invariants(const CanonicalFrameField& cf, const Tolerances& tol) {
  return invariants_from_connection(cf.grid, cf.alpha_u, cf.alpha_v, tol);
}

double StructureResiduals::overall() const { return *std::max_element(max.begin(), max.end()); }

namespace {

struct Gradients {
  Field2<double> u, v;
};

Gradients grad(const Grid2& g, const Field2<double>& f) {
  return {differentiate(f, 0, g.h1()), differentiate(f, 1, g.h2())};
}

Field2<double> coframe_entry(const InvariantField& inv, int r, int c) {
  Field2<double> f(inv.grid);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = inv.coframe[k](r, c);
  return f;
}

}  // namespace

StructureResiduals structure_residuals(const InvariantField& inv) {
  const Grid2& g = inv.grid;
  const Gradients c00 = grad(g, coframe_entry(inv, 0, 0)), c01 = grad(g, coframe_entry(inv, 0, 1));
  const Gradients c10 = grad(g, coframe_entry(inv, 1, 0)), c11 = grad(g, coframe_entry(inv, 1, 1));
  const Gradients q1 = grad(g, inv.q1), q2 = grad(g, inv.q2);
  const Gradients p1 = grad(g, inv.p1), p2 = grad(g, inv.p2), p3 = grad(g, inv.p3);
  StructureResiduals sr;
  for (auto& f : sr.field) f = Field2<double>(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Mat2& c = inv.coframe[k];
    const double vol = c.determinant();
    auto wedge = [&](const Gradients& d, int row) { return d.u[k] * c(row, 1) - d.v[k] * c(row, 0); };
    const double Q1 = inv.q1[k], Q2 = inv.q2[k], P1 = inv.p1[k], P2 = inv.p2[k], P3 = inv.p3[k];
    const double r[6] = {
        (c01.u[k] - c00.v[k]) - Q1 * vol,
        (c11.u[k] - c10.v[k]) - Q2 * vol,
        wedge(q1, 0) + wedge(q2, 1) - (P3 - P1 - Q1 * Q1 - Q2 * Q2) * vol,
        wedge(q1, 1) - wedge(q2, 0) + P2 * vol,
        wedge(p1, 0) + wedge(p2, 1) - (-3 * Q1 * P1 - 4 * Q2 * P2 + Q1 * P3) * vol,
        wedge(p2, 0) + wedge(p3, 1) - (-3 * Q2 * P3 - 4 * Q1 * P2 + Q2 * P1) * vol,
    };
    for (int e = 0; e < 6; ++e) {
      sr.field[e][k] = std::abs(r[e] / vol);
      sr.max[e] = std::max(sr.max[e], sr.field[e][k]);
    }
  }
  return sr;
}

GaussMap laguerre_gauss_map(const PrincipalData& pd) {
  GaussMap gm;
  gm.sigma = Field2<Vec4>(pd.grid);
  gm.metric = gm.laguerre = Field2<Mat2>(pd.grid);
  double scale = 0.0, diff = 0.0;
  for (std::size_t k = 0; k < pd.node.size(); ++k) {
    const NodeAnalysis& na = pd.node[k];
    gm.sigma[k] = na.sigma;
    gm.metric[k] = na.sigma_metric;
    gm.laguerre[k] = ((na.H * na.H - na.K) / (na.K * na.K)) * na.forms.third;
    scale = std::max(scale, gm.laguerre[k].cwiseAbs().maxCoeff());
    diff = std::max(diff, (gm.metric[k] - gm.laguerre[k]).cwiseAbs().maxCoeff());
    const Eigen::SelfAdjointEigenSolver<Mat2> es(gm.metric[k]);
    if (es.eigenvalues()(0) <= 0) gm.spacelike = false;
  }
  gm.metric_mismatch = scale > 0 ? diff / scale : diff;
  return gm;
}

EnergyReport metric_area_energy(const SurfacePatch& patch, int n) {
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre(n, patch.domain.u0, patch.domain.u1, xu, wu);
  gauss_legendre(n, patch.domain.v0, patch.domain.v1, xv, wv);
  EnergyReport r;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Curvature2 c = curvature2(patch.jet(xu[i], xv[j]));
      const double w = wu[i] * wv[j];
      const double da = val3(c.xu).cross(val3(c.xv)).norm();
      const double h = c.H.value(), k = c.K.value();
      const double dens = (h * h - k) / k;
      r.energy += w * dens * da;
      r.area_form += w * std::abs(dens) * da;
      r.minkowski_area += w * std::sqrt(std::max(0.0, sigma_metric_of(c).determinant()));
      r.euclid_area += w * da;
    }
  }
  return r;
}

Field2<double> holomorphy_field(const InvariantField& inv) {
  const Grid2& g = inv.grid;
  Field2<double> qr(g), qi(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    qr[k] = 0.5 * (inv.p1[k] - inv.p3[k]);
    qi[k] = -inv.p2[k];
  }
  const Gradients dr = grad(g, qr), di = grad(g, qi);
  Field2<double> out(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    using C = std::complex<double>;
    const Mat2& c = inv.coframe[k];
    const C phu(c(0, 0), c(1, 0)), phv(c(0, 1), c(1, 1));
    const double thu = inv.q2[k] * c(0, 0) - inv.q1[k] * c(1, 0);
    const double thv = inv.q2[k] * c(0, 1) - inv.q1[k] * c(1, 1);
    const C q(qr[k], qi[k]), qu(dr.u[k], di.u[k]), qv(dr.v[k], di.v[k]);
    const C res = qu * phv - qv * phu + 4.0 * q * (thu * phv - thv * phu);
    out[k] = std::abs(res / c.determinant());
  }
  return out;
}

Classification classify(const InvariantField& inv, double tol) {
  const Grid2& g = inv.grid;
  Classification cl;
  cl.isothermic = cl.l_minimal = cl.generalized = Field2<int>(g);
  const Field2<double> hol = holomorphy_field(inv);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double p2 = std::abs(inv.p2[k]), pp = std::abs(inv.p1[k] + inv.p3[k]);
    cl.isothermic[k] = p2 < tol;
    cl.l_minimal[k] = pp < tol;
    cl.generalized[k] = hol[k] < tol;
    cl.p2_max = std::max(cl.p2_max, p2);
    cl.lmin_max = std::max(cl.lmin_max, pp);
    cl.holomorphy_max = std::max(cl.holomorphy_max, hol[k]);
  }
  cl.is_isothermic = cl.p2_max < tol;
  cl.is_l_minimal = cl.lmin_max < tol;
  cl.is_generalized = cl.holomorphy_max < tol;
  return cl;
}

MeanCurvatureReport gauss_map_mean_curvature(const InvariantField& inv) {
  const Grid2& g = inv.grid;
  Field2<double> p(g);
  for (std::size_t k = 0; k < g.size(); ++k) p[k] = inv.p1[k] + inv.p3[k];
  const Gradients dp = grad(g, p);
  MeanCurvatureReport r;
  r.coefficient = r.parallel = Field2<double>(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Mat2& c = inv.coframe[k];
    const double thu = inv.q2[k] * c(0, 0) - inv.q1[k] * c(1, 0);
    const double thv = inv.q2[k] * c(0, 1) - inv.q1[k] * c(1, 1);
    const Vec2 w = coframe_coeffs(c, dp.u[k] + 2 * p[k] * thu, dp.v[k] + 2 * p[k] * thv);
    r.coefficient[k] = 0.5 * p[k];
    r.parallel[k] = w.norm();
    r.parallel_max = std::max(r.parallel_max, r.parallel[k]);
    r.coefficient_max = std::max(r.coefficient_max, std::abs(r.coefficient[k]));
  }
  return r;
}

ElReport el_residual(const PrincipalData& pd, const InvariantField& inv) {
  ElReport r;
  r.residual = Field2<double>(pd.grid);
  // Delta^III(H/K) = lambda^3 (p1 + p3) with lambda = (a - c) / 2K
  std::vector<double> model(pd.node.size());
  for (std::size_t k = 0; k < pd.node.size(); ++k) {
    const NodeAnalysis& na = pd.node[k];
    model[k] = std::pow((na.a - na.c) / (2.0 * na.K), 3) * (inv.p1[k] + inv.p3[k]);
  }
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < pd.node.size(); ++k) {
    const double e = pd.node[k].el, p = model[k];
    r.residual[k] = e;
    r.max = std::max(r.max, std::abs(e));
    sxy += e * p;
    sxx += p * p;
  }
  r.factor = sxx > 0 ? sxy / sxx : 0.0;
  double dev = 0.0;
  for (std::size_t k = 0; k < pd.node.size(); ++k)
    dev = std::max(dev, std::abs(r.residual[k] - r.factor * model[k]));
  r.fit_residual = r.max > 0 ? dev / r.max : 0.0;
  return r;
}

LaguerreTransformField laguerre_transform(const PrincipalData& pd) {
  LaguerreTransformField lt;
  lt.element = Field2<ContactElement>(pd.grid);
  lt.valid = Field2<int>(pd.grid, 0);
  for (std::size_t k = 0; k < pd.node.size(); ++k) {
    const Mat6& a = pd.node[k].canonical;
    const NullPlane np{a.col(0), a.col(4)};
    const double s = a.col(0).norm() * a.col(4).norm();
    lt.gram_max = std::max({lt.gram_max, std::abs(inner(np.a, np.b)) / s,
                            std::abs(inner(np.b, np.b)) / a.col(4).squaredNorm()});
    try {
      const ContactElement ce = contact_element_extract(np);
      const NullPlane gen = contact_element_embed(ce);
      lt.contact_max = std::max({lt.contact_max, std::abs(inner(np.a, gen.a)) / (np.a.norm() * gen.a.norm()),
                                 std::abs(inner(np.a, gen.b)) / (np.a.norm() * gen.b.norm())});
      lt.element[k] = ce;
      lt.valid[k] = 1;
      lt.max_distance = std::max(lt.max_distance, (ce.p - pd.node[k].x).norm());
    } catch (const Error&) {
    }
  }
  return lt;
}

double InvarianceReport::worst() const { return std::max({J, W, p2, qq, metric, energy}); }

InvarianceReport laguerre_invariance(const SurfacePatch& patch, const Mat6& a, int n, int quad) {
  const SurfacePatch image = laguerre_transformed(patch, a);
  const PrincipalData pd0 = principal_frame(sample_jets(patch, n, n));
  const PrincipalData pd1 = principal_frame(sample_jets(image, n, n));
  const InvariantField i0 = invariants(canonical_frame(pd0));
  const InvariantField i1 = invariants(canonical_frame(pd1));
  const GaussMap g0 = laguerre_gauss_map(pd0), g1 = laguerre_gauss_map(pd1);

  InvarianceReport r;
  double scale = 0.0, mscale = 0.0, dot = 0.0;
  for (std::size_t k = 0; k < i0.grid.size(); ++k) {
    const double qq = i0.q1[k] * i0.q1[k] + i0.q2[k] * i0.q2[k];
    scale = std::max({scale, std::abs(i0.p1[k]), std::abs(i0.p2[k]), std::abs(i0.p3[k]), qq});
    mscale = std::max(mscale, g0.laguerre[k].cwiseAbs().maxCoeff());
    dot += i0.q1[k] * i1.q1[k] + i0.q2[k] * i1.q2[k];
  }
  r.q_sign = dot < 0 ? -1.0 : 1.0;
  const int ni = i0.grid.n1, nj = i0.grid.n2;
  for (int j = 0; j < nj; ++j) {
    for (int i = 0; i < ni; ++i) {
      r.J = std::max(r.J, std::abs(i1.J(i, j) - i0.J(i, j)));
      r.W = std::max(r.W, std::abs(i1.W(i, j) - i0.W(i, j)));
      r.p2 = std::max(r.p2, std::abs(i1.p2(i, j) - i0.p2(i, j)));
      const double qq0 = i0.q1(i, j) * i0.q1(i, j) + i0.q2(i, j) * i0.q2(i, j);
      const double qq1 = i1.q1(i, j) * i1.q1(i, j) + i1.q2(i, j) * i1.q2(i, j);
      r.qq = std::max(r.qq, std::abs(qq1 - qq0));
      r.q_raw = std::max({r.q_raw, std::abs(i1.q1(i, j) - r.q_sign * i0.q1(i, j)),
                          std::abs(i1.q2(i, j) - r.q_sign * i0.q2(i, j))});
      r.metric = std::max(r.metric, (g1.laguerre(i, j) - g0.laguerre(i, j)).cwiseAbs().maxCoeff());
    }
  }
  if (scale > 0) {
    r.J /= scale;
    r.W /= scale;
    r.p2 /= scale;
    r.qq /= scale;
    r.q_raw /= scale;
  }
  if (mscale > 0) r.metric /= mscale;
  const double e0 = metric_area_energy(patch, quad).energy;
  const double e1 = metric_area_energy(image, quad).energy;
  r.energy = std::abs(e1 - e0) / std::max(std::abs(e0), 1e-300);
  return r;
}

const char* fit_kind_name(FitKind k) {
  switch (k) {
    case FitKind::Spacelike: return "spacelike";
    case FitKind::Timelike: return "timelike";
    case FitKind::Isotropic: return "isotropic";
    case FitKind::SphereLike: return "sphere-like";
    case FitKind::Lightcone: return "lightcone";
    case FitKind::None: return "none";
  }
  return "none";
}

HyperplaneFit hyperplane_fit(const std::vector<Vec4>& samples, double threshold) {
  const int m = static_cast<int>(samples.size());
  if (m < 16) throw Error(ErrorCode::RankDeficient, "need at least 16 samples");
  Vec4 mean = Vec4::Zero();
  for (const Vec4& s : samples) mean += s;
  mean /= m;
  Eigen::MatrixXd centered(m, 4);
  for (int k = 0; k < m; ++k) centered.row(k) = (samples[k] - mean).transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> spread(centered);
  const auto& sv = spread.singularValues();
  if (sv(0) == 0 || sv(1) < 1e-10 * sv(0)) throw Error(ErrorCode::RankDeficient, "samples are nearly collinear");

  HyperplaneFit fit;
  // hyperplane: smallest singular direction of the centered cloud
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullV);
  const Vec4 c = svd.matrixV().col(3);
  const double delta = c.dot(mean);
  for (const Vec4& s : samples) fit.hyperplane_residual = std::max(fit.hyperplane_residual, std::abs(c.dot(s) - delta));
  fit.normal = lorentz_metric() * c;
  fit.offset = delta;

  // quadric: (V, V) = 2 (V, V0) + c'
  Eigen::MatrixXd a(m, 5);
  Eigen::VectorXd rhs(m);
  for (int k = 0; k < m; ++k) {
    const Vec4 s = samples[k] - mean;
    a.row(k) << 2 * (lorentz_metric() * s).transpose(), 1.0;
    rhs(k) = lorentz_inner(s, s);
  }
  const Eigen::VectorXd z = a.completeOrthogonalDecomposition().solve(rhs);
  const Vec4 v0 = z.head<4>();
  fit.center = v0 + mean;
  fit.level = z(4) + lorentz_inner(v0, v0);
  for (int k = 0; k < m; ++k) {
    const Vec4 d = samples[k] - fit.center;
    const double gnorm = 2.0 * d.norm();
    const double res = std::abs(lorentz_inner(d, d) - fit.level);
    fit.quadric_residual = std::max(fit.quadric_residual, gnorm > 0 ? res / gnorm : res);
  }

  const double nn = lorentz_inner(fit.normal, fit.normal);
  if (fit.hyperplane_residual <= fit.quadric_residual) {
    fit.best_residual = fit.hyperplane_residual;
    if (nn < -threshold)
      fit.kind = FitKind::Spacelike;
    else if (nn > threshold)
      fit.kind = FitKind::Timelike;
    else
      fit.kind = FitKind::Isotropic;
  } else {
    fit.best_residual = fit.quadric_residual;
    const double rad = std::sqrt(std::abs(fit.level));
    fit.kind = rad <= threshold * std::max(1.0, v0.norm()) ? FitKind::Lightcone : FitKind::SphereLike;
  }
  if (fit.best_residual > threshold) fit.kind = FitKind::None;
  return fit;
}

SurfaceReport analyze_surface(const SurfacePatch& patch, int nu, int nv, JetMode mode, const Tolerances& tol) {
  SurfaceReport r;
  r.principal = principal_frame(sample_jets(patch, nu, nv, mode), tol);
  r.canonical = canonical_frame(r.principal);
  r.inv = invariants(r.canonical, tol);
  r.se = structure_residuals(r.inv);
  r.cls = classify(r.inv);
  r.mean = gauss_map_mean_curvature(r.inv);
  r.el = el_residual(r.principal, r.inv);
  r.gauss = laguerre_gauss_map(r.principal);
  return r;
}

}  // namespace lag
