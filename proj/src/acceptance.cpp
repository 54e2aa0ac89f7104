#include "lag/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "lag/eds.hpp"
#include "lag/group.hpp"
#include "lag/isothermic.hpp"
#include "lag/surface.hpp"

namespace lag {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// Residual already at double-precision roundoff on every level of the ladder.
constexpr double kRoundoffFloor = 1e-11;

CriterionResult characters(std::mt19937_64& rng) {
  CriterionResult r{1, "cartan characters", false, 0, 1.0, "", json::object()};
  int ok = 0;
  for (int k = 0; k < 100; ++k) {
    const Characters ch = cartan_characters(random_ypoint(rng));
    if (ch.s1 == 4 && ch.s2 == 0 && ch.t == 4 && ch.involutive) ++ok;
  }
  r.pass = ok == 100;
  r.summary = std::to_string(ok) + "/100 points give (4, 0, 4, involutive)";
  r.detail = {{"points", 100}, {"matching", ok}};
  return r;
}

CriterionResult polar(std::mt19937_64& rng) {
  CriterionResult r{2, "polar spaces", false, 0, 1.0, "", json::object()};
  int ok = 0;
  double contain = 0.0;
  for (int k = 0; k < 100; ++k) {
    const YPoint z = random_ypoint(rng);
    const PolarSpace ps = polar_space(z, random_integral_line(z, rng));
    if (ps.dim == 2) ++ok;
    contain = std::max(contain, ps.containment);
  }
  r.pass = ok == 100 && contain < 1e-10;
  r.summary = std::to_string(ok) + "/100 of dimension 2, containment " + sci(contain);
  r.detail = {{"samples", 100}, {"dim2", ok}, {"containment", contain}, {"containment_tol", 1e-10}};
  return r;
}

CriterionResult invariance(std::mt19937_64& rng) {
  CriterionResult r{3, "laguerre invariance", false, 0, 60.0, "", json::object()};
  double worst = 0.0;
  json per = json::object();
  for (const char* name : {"torus", "catenoid"}) {
    const SurfacePatch p = catalog_surface(name, name == std::string("torus") ? Params{{"R", 2.0}, {"rho", 0.5}} : Params{});
    double w = 0.0;
    for (int k = 0; k < 10; ++k) w = std::max(w, laguerre_invariance(p, random_laguerre(rng), 128).worst());
    per[name] = w;
    worst = std::max(worst, w);
  }
  r.pass = worst < 1e-5;
  r.summary = "worst relative change " + sci(worst) + " (tol 1e-5)";
  r.detail = {{"worst", per}, {"tol", 1e-5}, {"transforms", 10}, {"grid", 128}};
  return r;
}

CriterionResult lminimality() {
  CriterionResult r{4, "catenoid l-minimality", false, 0, 10.0, "", json::object()};
  const SurfaceReport rep = analyze_surface(catalog_surface("catenoid"), 128, 128);
  double P = 0.0;
  for (int j = 0; j < rep.inv.grid.n2; ++j)
    for (int i = 0; i < rep.inv.grid.n1; ++i) P = std::max(P, std::abs(rep.inv.P(i, j)));
  r.pass = P < 1e-7 && rep.el.max < 1e-8;
  r.summary = "max|p1+p3| " + sci(P) + ", max|lap_III(H/K)| " + sci(rep.el.max);
  r.detail = {{"p1_plus_p3", P}, {"p_tol", 1e-7}, {"el", rep.el.max}, {"el_tol", 1e-8}};
  return r;
}

CriterionResult structure_order() {
  CriterionResult r{5, "structure-equation convergence", false, 0, 60.0, "", json::object()};
  const std::vector<int> ns{32, 64, 128};
  bool pass = true;
  double min_order = INFINITY;
  int floored = 0;
  for (const char* name : {"torus", "catenoid", "perturbed_torus"}) {
    const SurfacePatch p = catalog_surface(name);
    std::vector<std::array<double, 6>> res;
    std::vector<double> h;
    for (int n : ns) {
      res.push_back(analyze_surface(p, n, n).se.max);
      h.push_back(1.0 / (n - 1));
    }
    json comp = json::array();
    for (int e = 0; e < 6; ++e) {
      std::vector<double> err{res[0][e], res[1][e], res[2][e]};
      const bool floor = err[2] < kRoundoffFloor;
      const double order = floor ? NAN : observed_order(h, err);
      if (floor) {
        ++floored;
      } else {
        min_order = std::min(min_order, order);
        pass = pass && order >= 3.5;
      }
      comp.push_back({{"residuals", err}, {"order", floor ? json(nullptr) : json(order)}, {"at_floor", floor}});
    }
    r.detail[name] = comp;
  }
  r.detail["order_tol"] = 3.5;
  r.detail["roundoff_floor"] = kRoundoffFloor;
  r.pass = pass;
  r.summary = "min order " + sci(min_order) + " over resolved components, " + std::to_string(floored) +
              "/18 at roundoff";
  return r;
}

CriterionResult ttransform() {
  CriterionResult r{6, "t-transform soundness", false, 0, 120.0, "", json::object()};
  const Grid2 g(128, 128, -1, 1, -1, 1);
  const BlaschkeField bf = catalog_potential("lncosh", g);
  const TTransformResult base = t_transform(bf, 0.0);
  bool pass = true;
  double worst[6] = {0, 0, 0, 0, 0, 0};
  for (double m : {-1.0, 0.0, 1.0}) {
    const TTransformResult t = m == 0.0 ? base : t_transform(bf, m);
    const SpectralComparison c = compare_to_base(bf, base, t);
    const double v[6] = {t.flatness, t.frames.path_dependence, t.surface.legendre, t.potential_error, c.J_diff, c.W_diff};
    const double tol[6] = {1e-7, 1e-6, 1e-6, 1e-5, 1e-6, 1e-6};
    json row;
    for (int k = 0; k < 6; ++k) {
      pass = pass && v[k] < tol[k];
      worst[k] = std::max(worst[k], v[k]);
    }
    row = {{"flatness", t.flatness}, {"flatness_4th_order", t.flatness4}, {"path_dependence", t.frames.path_dependence},
           {"legendre", t.surface.legendre}, {"potential_error", t.potential_error}, {"J_diff", c.J_diff},
           {"W_diff", c.W_diff}, {"k_recovered", t.k_recovered}};
    r.detail["m=" + std::to_string(static_cast<int>(m))] = row;
  }
  r.detail["tol"] = {{"flatness", 1e-7}, {"path_dependence", 1e-6}, {"legendre", 1e-6}, {"potential_error", 1e-5},
                     {"J_diff", 1e-6}, {"W_diff", 1e-6}};
  r.pass = pass;
  r.summary = "flat " + sci(worst[0]) + " path " + sci(worst[1]) + " leg " + sci(worst[2]) + " pot " + sci(worst[3]) +
              " J " + sci(worst[4]) + " W " + sci(worst[5]);
  return r;
}

CriterionResult special() {
  CriterionResult r{7, "special solver convergence", false, 0, 60.0, "", json::object()};
  std::vector<double> h, err;
  int max_iter = 0;
  json runs = json::array();
  for (int n : {17, 33, 65}) {
    const Grid2 g(n, n, -1, 1, -1, 1);
    const SpecialSolution s = solve_special(1.0, g, [](double x, double) { return std::log(std::cosh(x)); });
    double e = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) e = std::max(e, std::abs(s.field.u(i, j) - std::log(std::cosh(g.x1(i)))));
    h.push_back(g.h1());
    err.push_back(e);
    max_iter = std::max(max_iter, s.iterations);
    runs.push_back({{"n", n}, {"error", e}, {"iterations", s.iterations}, {"residual", s.residual}});
  }
  const double order = observed_order(h, err);
  r.pass = order >= 1.9 && max_iter <= 10;
  r.summary = "order " + sci(order) + ", max Newton iterations " + std::to_string(max_iter);
  r.detail = {{"runs", runs}, {"order", order}, {"order_tol", 1.9}, {"iteration_limit", 10}};
  return r;
}

CriterionResult generalized() {
  CriterionResult r{8, "generalized l-minimal audit", false, 0, 60.0, "", json::object()};
  const Grid2 g(128, 128, -1, 1, -1, 1);
  const BlaschkeField bf = catalog_potential("lncosh", g);
  bool pass = true;
  double w[3] = {0, 0, 0};
  for (double m : {-1.0, 1.0}) {
    const GeneralizedAudit a = generalized_audit(t_transform(bf, m).recomputed);
    pass = pass && a.parallel < 1e-5 && a.holomorphy < 1e-5 && a.ratio_cv < 1e-3;
    w[0] = std::max(w[0], a.parallel);
    w[1] = std::max(w[1], a.holomorphy);
    w[2] = std::max(w[2], a.ratio_cv);
    r.detail["m=" + std::to_string(static_cast<int>(m))] = {
        {"parallel", a.parallel}, {"holomorphy", a.holomorphy}, {"ratio_mean", a.ratio_mean}, {"ratio_cv", a.ratio_cv}};
  }
  r.detail["tol"] = {{"parallel", 1e-5}, {"holomorphy", 1e-5}, {"ratio_cv", 1e-3}};
  r.pass = pass;
  r.summary = "parallel " + sci(w[0]) + ", holomorphy " + sci(w[1]) + ", cv " + sci(w[2]);
  return r;
}

CriterionResult gauss_fit() {
  CriterionResult r{9, "gauss-map hyperplane classification", false, 0, 30.0, "", json::object()};
  const SurfaceReport cat = analyze_surface(catalog_surface("catenoid"), 64, 64);
  const HyperplaneFit cf = hyperplane_fit(cat.gauss.sigma.data());
  bool pass = cf.kind == FitKind::Spacelike && cf.hyperplane_residual < 1e-8;
  r.detail["catenoid"] = {{"kind", fit_kind_name(cf.kind)}, {"hyperplane_residual", cf.hyperplane_residual}};
  const Grid2 g(128, 128, -1, 1, -1, 1);
  const BlaschkeField bf = catalog_potential("lncosh", g);
  double ratio = INFINITY;
  for (double m : {-1.0, 1.0}) {
    const TTransformResult t = t_transform(bf, m);
    std::vector<Vec4> s;
    for (std::size_t k = 0; k < t.surface.sigma.size(); ++k)
      if (t.surface.valid[k]) s.push_back(t.surface.sigma[k]);
    const HyperplaneFit f = hyperplane_fit(s);
    const double q = std::max(f.quadric_residual, 1e-300);
    ratio = std::min(ratio, f.hyperplane_residual / q);
    pass = pass && (f.kind == FitKind::SphereLike || f.kind == FitKind::Lightcone) && f.hyperplane_residual >= 100 * q;
    r.detail["m=" + std::to_string(static_cast<int>(m))] = {{"kind", fit_kind_name(f.kind)},
                                                            {"hyperplane_residual", f.hyperplane_residual},
                                                            {"quadric_residual", f.quadric_residual},
                                                            {"level", f.level}};
  }
  r.detail["tol"] = {{"catenoid_hyperplane", 1e-8}, {"model_ratio", 100}};
  r.pass = pass;
  r.summary = "catenoid " + std::string(fit_kind_name(cf.kind)) + " " + sci(cf.hyperplane_residual) +
              ", transform hyperplane/quadric ratio " + sci(ratio);
  return r;
}

CriterionResult cauchy() {
  CriterionResult r{10, "cauchy problem", false, 0, 60.0, "", json::object()};
  const CatenoidCauchy cc = catenoid_cauchy(0.0);
  const InitialCurve curve = integrate_initial_curve(cc.data, 81);
  bool silent = true;
  MarchResult mr;
  try {
    mr = extend_surface(curve, 10, 1e-3);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IllPosedGrowth) throw;
    silent = false;
  }
  if (!silent) {
    r.summary = "growth monitor fired";
    return r;
  }
  const double err = frame_error(mr.solution, cc);
  const SolutionReport rep = verify_solution(mr.solution);
  const double growth = *std::max_element(mr.growth.begin(), mr.growth.end());
  r.pass = err < 1e-5;
  r.summary = "frame error " + sci(err) + ", growth " + sci(growth) + ", eta " + sci(rep.eta_max());
  r.detail = {{"frame_error", err},     {"tol", 1e-5},           {"growth", growth},
              {"growth_bound", 1e3},    {"eta", rep.eta_max()},  {"maurer_cartan", rep.maurer_cartan},
              {"structure", rep.se.overall()}, {"curve_drift", curve.drift}};
  return r;
}

CriterionResult group_layer(std::mt19937_64& rng) {
  CriterionResult r{11, "group layer", false, 0, 5.0, "", json::object()};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double round = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Mat6 a = random_group_element(rng);
    round = std::max(round, (decompose(a).recompose() - a).cwiseAbs().maxCoeff());
  }
  auto sphere = [&] { return SphereElement{2 * u(rng), Vec3(2 * u(rng), 2 * u(rng), 2 * u(rng))}; };
  auto distance = [](const SphereElement& a, const SphereElement& b) {
    return std::max(std::abs(a.r - b.r), (a.p - b.p).cwiseAbs().maxCoeff());
  };
  auto conj = [](const Mat6& m, const SphereElement& s) { return extract_sphere(act(m, embed_sphere(s))); };
  double act_err = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const SphereElement s = sphere();
    const Mat3 rot = Eigen::Quaterniond(u(rng), u(rng), u(rng), u(rng)).normalized().toRotationMatrix();
    const Vec3 v(u(rng), u(rng), u(rng));
    Vec3 b(u(rng), u(rng), u(rng));
    b *= 0.6 / std::max(1.0, b.norm());
    const double shift = u(rng);
    act_err = std::max({act_err, distance(euclidean_on_sphere(rot, v, s), conj(embed_euclidean(rot, v), s)),
                        distance(boost_on_sphere(b, s), conj(boost(b), s)),
                        distance(time_on_sphere(shift, s), conj(time_translation(shift), s))});
    const Mat6 a = random_group_element(rng);
    act_err = std::max(act_err, distance(sphere_action(a, s), conj(a, s)));
  }
  r.pass = round < 1e-9 && act_err < 1e-10;
  r.summary = "round trip " + sci(round) + ", sphere actions " + sci(act_err);
  r.detail = {{"round_trip", round}, {"round_trip_tol", 1e-9}, {"sphere_action", act_err}, {"sphere_action_tol", 1e-10}};
  return r;
}

}  // namespace

Mat6 random_laguerre(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Mat3 rot = Eigen::Quaterniond(u(rng), u(rng), u(rng), u(rng)).normalized().toRotationMatrix();
  Vec3 v(u(rng), u(rng), u(rng));
  v /= std::max(1.0, v.norm());
  Vec3 b(u(rng), u(rng), u(rng));
  b *= 0.2 / std::max(1.0, b.norm());
  return embed_euclidean(rot, v) * boost(b) * time_translation(0.05 * u(rng));
}

std::vector<CriterionResult> run_acceptance(unsigned seed, int only) {
  std::vector<std::function<CriterionResult(std::mt19937_64&)>> crit{
      characters,
      polar,
      invariance,
      [](std::mt19937_64&) { return lminimality(); },
      [](std::mt19937_64&) { return structure_order(); },
      [](std::mt19937_64&) { return ttransform(); },
      [](std::mt19937_64&) { return special(); },
      [](std::mt19937_64&) { return generalized(); },
      [](std::mt19937_64&) { return gauss_fit(); },
      [](std::mt19937_64&) { return cauchy(); },
      group_layer,
  };
  std::vector<CriterionResult> out;
  for (int k = 0; k < static_cast<int>(crit.size()); ++k) {
    if (only > 0 && only != k + 1) continue;
    std::mt19937_64 rng(seed * 1000003ULL + k);
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
      r = crit[k](rng);
    } catch (const Error& e) {
      r.id = k + 1;
      r.name = "criterion " + std::to_string(k + 1);
      r.summary = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (r.budget > 0 && r.seconds > r.budget) {
      r.pass = false;
      r.summary += " (over the time budget)";
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s %2d  %-36s %s  (%.2f s / %.0f s)", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.summary.c_str(), r.seconds, r.budget);
  return buf;
}

json acceptance_json(const std::vector<CriterionResult>& results, unsigned seed) {
  json j = {{"seed", seed}, {"criteria", json::array()}};
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    j["criteria"].push_back({{"id", r.id},
                             {"name", r.name},
                             {"pass", r.pass},
                             {"seconds", r.seconds},
                             {"budget_seconds", r.budget},
                             {"summary", r.summary},
                             {"detail", r.detail}});
  }
  j["all_pass"] = all;
  return j;
}

}  // namespace lag
