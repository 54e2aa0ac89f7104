#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "lag/acceptance.hpp"
#include "lag/eds.hpp"
#include "lag/io.hpp"
#include "lag/isothermic.hpp"
#include "lag/surface.hpp"

using namespace lag;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// One gated residual: value, bound, verdict.
struct Gates {
  json entries = json::object();
  bool pass = true;
  void add(const std::string& name, double value, double tol) {
    const bool ok = value <= tol;
    entries[name] = {{"value", value}, {"tol", tol}, {"pass", ok}};
    pass = pass && ok;
  }
};

void finish(const RunConfig& cfg, json report, const Gates& g, const json& timings) {
  report["inputs"] = config_json(cfg);
  report["gates"] = g.entries;
  report["all_gates_pass"] = g.pass;
  report["timings"] = timings;
  write_text((std::filesystem::path(cfg.out) / "report.json").string(), report.dump(2) + "\n");
  for (const auto& [name, e] : g.entries.items())
    if (!e["pass"].get<bool>())
      std::cerr << "gate failed: " << name << " = " << e["value"].get<double>() << " > " << e["tol"].get<double>() << "\n";
}

std::string path_in(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out) / name).string();
}

Field2<Vec3> points_of(const Field2<ContactElement>& e) {
  Field2<Vec3> p(e.n1(), e.n2());
  for (std::size_t k = 0; k < e.size(); ++k) p[k] = e[k].p;
  return p;
}

int run_analyze(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const SurfacePatch patch = catalog_surface(cfg.surface, cfg.params);
  const JetMode mode = cfg.jets == "fd" ? JetMode::FiniteDifference : JetMode::Analytic;
  const SurfaceReport rep = analyze_surface(patch, cfg.nu, cfg.nv, mode, cfg.tol);
  const double t_analyze = since(t0);
  const EnergyReport en = metric_area_energy(patch);
  const HyperplaneFit fit = hyperplane_fit(rep.gauss.sigma.data());
  const LaguerreTransformField lt = laguerre_transform(rep.principal);

  const Grid2& g = rep.inv.grid;
  Field2<double> J(g), W(g), H(g), K(g), el = rep.el.residual;
  Field2<Vec3> x(g), sig(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      J(i, j) = rep.inv.J(i, j);
      W(i, j) = rep.inv.W(i, j);
      H(i, j) = rep.principal.node(i, j).H;
      K(i, j) = rep.principal.node(i, j).K;
      x(i, j) = rep.principal.node(i, j).x;
      sig(i, j) = rep.gauss.sigma(i, j).tail<3>();
    }
  write_obj(path_in(cfg, "surface.obj"), x);
  write_obj(path_in(cfg, "sigma.obj"), sig);
  write_csv(path_in(cfg, "invariants.csv"), g,
            {{"q1", &rep.inv.q1}, {"q2", &rep.inv.q2}, {"p1", &rep.inv.p1}, {"p2", &rep.inv.p2},
             {"p3", &rep.inv.p3}, {"J", &J}, {"W", &W}, {"H", &H}, {"K", &K}, {"el", &el}});

  Gates gates;
  gates.add("canonical_defect", rep.inv.canonical_defect, 1e-8);
  gates.add("alpha11_defect", rep.inv.alpha11_defect, 1e-8);
  gates.add("laguerre_transform_contact", lt.contact_max, 1e-8);
  json se = json::array();
  for (double v : rep.se.max) se.push_back(v);
  json report = {
      {"surface", cfg.surface},
      {"residuals",
       {{"structure_equations", se},
        {"p2_symmetry", rep.inv.p2_symmetry},
        {"holomorphy", rep.cls.holomorphy_max},
        {"parallel_mean_curvature", rep.mean.parallel_max},
        {"el", rep.el.max},
        {"el_factor", rep.el.factor},
        {"el_fit_residual", rep.el.fit_residual},
        {"gauss_metric_mismatch", rep.gauss.metric_mismatch}}},
      {"classification",
       {{"isothermic", rep.cls.is_isothermic},
        {"l_minimal", rep.cls.is_l_minimal},
        {"generalized", rep.cls.is_generalized},
        {"p2_max", rep.cls.p2_max},
        {"lmin_max", rep.cls.lmin_max},
        {"tol", 1e-6}}},
      {"gauss_map",
       {{"spacelike", rep.gauss.spacelike},
        {"fit", fit_kind_name(fit.kind)},
        {"hyperplane_residual", fit.hyperplane_residual},
        {"quadric_residual", fit.quadric_residual}}},
      {"energies",
       {{"energy", en.energy},
        {"laguerre_area", en.area_form},
        {"minkowski_area", en.minkowski_area},
        {"euclidean_area", en.euclid_area}}}};
  finish(cfg, report, gates, {{"analyze", t_analyze}, {"total", since(t0)}});
  std::cout << "isothermic " << rep.cls.is_isothermic << "  l_minimal " << rep.cls.is_l_minimal << "  generalized "
            << rep.cls.is_generalized << "\n";
  return gates.pass ? 0 : 1;
}

BlaschkeField potential_from_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int cx = t.column("x"), cy = t.column("y"), cu = t.column("u");
  if (cx < 0 || cy < 0 || cu < 0) throw Error(ErrorCode::ConfigError, path + ": needs columns x, y, u");
  std::set<double> xs, ys;
  for (const auto& r : t.rows) {
    xs.insert(r[cx]);
    ys.insert(r[cy]);
  }
  const Grid2 g(static_cast<int>(xs.size()), static_cast<int>(ys.size()), *xs.begin(), *xs.rbegin(), *ys.begin(),
                *ys.rbegin());
  if (g.size() != t.rows.size()) throw Error(ErrorCode::ConfigError, path + ": samples do not form a tensor grid");
  Field2<double> u(g);
  for (const auto& r : t.rows) {
    const int i = static_cast<int>(std::lround((r[cx] - g.a0) / g.h1()));
    const int j = static_cast<int>(std::lround((r[cy] - g.b0) / g.h2()));
    u(i, j) = r[cu];
  }
  return potential_from_samples(g, u);
}

std::function<double(double, double)> boundary_function(const std::string& bc) {
  if (bc == "lncosh") return [](double x, double) { return std::log(std::cosh(x)); };
  if (bc == "zero") return [](double, double) { return 0.0; };
  const BlaschkeField f = potential_from_csv(bc);
  return [f](double x, double y) {
    const Grid2& g = f.grid;
    const int i = std::clamp(static_cast<int>(std::lround((x - g.a0) / g.h1())), 0, g.n1 - 1);
    const int j = std::clamp(static_cast<int>(std::lround((y - g.b0) / g.h2())), 0, g.n2 - 1);
    return f.u(i, j);
  };
}

int run_ttransform(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Grid2 g(cfg.nu, cfg.nv, cfg.domain[0], cfg.domain[1], cfg.domain[2], cfg.domain[3]);
  BlaschkeField bf;
  if (cfg.potential == "special")
    bf = solve_special(cfg.c, g, boundary_function(cfg.bc)).field;
  else if (cfg.potential.size() > 4 && cfg.potential.substr(cfg.potential.size() - 4) == ".csv")
    bf = potential_from_csv(cfg.potential);
  else
    bf = catalog_potential(cfg.potential, g, cfg.params);

  const TTransformResult base = t_transform(bf, 0.0, Mat6::Identity(), cfg.tol);
  Gates gates;
  json members = json::array();
  for (double m : cfg.m) {
    const TTransformResult r = m == 0.0 ? base : t_transform(bf, m, Mat6::Identity(), cfg.tol);
    const SpectralComparison c = compare_to_base(bf, base, r);
    const GeneralizedAudit au = generalized_audit(r.recomputed);
    std::vector<Vec4> s;
    for (std::size_t k = 0; k < r.surface.sigma.size(); ++k)
      if (r.surface.valid[k]) s.push_back(r.surface.sigma[k]);
    const HyperplaneFit fit = hyperplane_fit(s);
    const std::string tag = "m=" + format17(m);
    gates.add(tag + " flatness", r.flatness, cfg.tol.flat);
    gates.add(tag + " path_dependence", r.frames.path_dependence, 10 * cfg.tol.flat);
    gates.add(tag + " legendre", r.surface.legendre, 1e-6);
    members.push_back({{"m", m},
                       {"flatness", r.flatness},
                       {"flatness_4th_order", r.flatness4},
                       {"path_dependence", r.frames.path_dependence},
                       {"legendre", r.surface.legendre},
                       {"invalid_nodes", r.surface.invalid},
                       {"potential_error", r.potential_error},
                       {"k_recovered", r.k_recovered},
                       {"k_spread", r.k_spread},
                       {"frame_maurer_cartan", r.frame_mc},
                       {"J_diff", c.J_diff},
                       {"W_diff", c.W_diff},
                       {"generalized",
                        {{"parallel", au.parallel},
                         {"holomorphy", au.holomorphy},
                         {"ratio_mean", au.ratio_mean},
                         {"ratio_cv", au.ratio_cv}}},
                       {"gauss_fit",
                        {{"kind", fit_kind_name(fit.kind)},
                         {"hyperplane_residual", fit.hyperplane_residual},
                         {"quadric_residual", fit.quadric_residual},
                         {"level", fit.level}}}});
    write_obj(path_in(cfg, "surface_m" + format17(m) + ".obj"), points_of(r.surface.element));
  }
  finish(cfg, {{"potential", cfg.potential}, {"members", members}}, gates, {{"total", since(t0)}});
  return gates.pass ? 0 : 1;
}

CauchyData cauchy_data(const RunConfig& cfg, CatenoidCauchy* cat) {
  if (cfg.data == "catenoid") {
    *cat = catenoid_cauchy(0.0);
    return cat->data;
  }
  if (cfg.data == "zero") return constant_data(0, 0, 0, 0);
  if (cfg.data.rfind("constant:", 0) == 0) {
    const auto v = parse_list(cfg.data.substr(9));
    if (v.size() != 4) throw Error(ErrorCode::ConfigError, "constant data needs s1,s2,r1,r2");
    return constant_data(v[0], v[1], v[2], v[3]);
  }
  const CsvTable t = read_csv(cfg.data);
  const int ct = t.column("t");
  const int cs[4] = {t.column("s1"), t.column("s2"), t.column("r1"), t.column("r2")};
  if (ct < 0 || *std::min_element(cs, cs + 4) < 0)
    throw Error(ErrorCode::ConfigError, cfg.data + ": needs columns t, s1, s2, r1, r2");
  std::vector<double> ts;
  std::vector<std::array<double, 4>> v;
  for (const auto& r : t.rows) {
    ts.push_back(r[ct]);
    v.push_back({r[cs[0]], r[cs[1]], r[cs[2]], r[cs[3]]});
  }
  return sampled_data(ts, v);
}

int run_cauchy(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  CatenoidCauchy cat;
  const CauchyData data = cauchy_data(cfg, &cat);
  const InitialCurve curve = integrate_initial_curve(data, cfg.curve_nodes);
  MarchOptions opt;
  opt.growth = cfg.tol.growth;
  opt.max_height = cfg.tol.max_height;
  opt.gauge_det = cfg.tol.gauge_det;
  const MarchResult mr = extend_surface(curve, cfg.steps, cfg.hy, opt);
  const SolutionReport rep = verify_solution(mr.solution);

  Gates gates;
  const double length = std::max(1.0, data.t1 - data.t0);
  gates.add("curve_drift_per_length", curve.drift / length, 1e-10);
  gates.add("eta_pullback", rep.eta_max(), 1e-5);
  json extra = json::object();
  if (cfg.data == "zero") {
    double e = 0.0;
    const Mat6 n = beta_form(data, 0.0);
    for (std::size_t k = 0; k < curve.t.size(); ++k) {
      const double t = curve.t[k];
      const Mat6 exact = data.B * (Mat6::Identity() + t * n + 0.5 * t * t * n * n + t * t * t / 6 * n * n * n);
      e = std::max(e, (curve.points[k].A - exact).cwiseAbs().maxCoeff());
    }
    gates.add("nilpotent_exponential", e, 1e-12);
  }
  if (cfg.data == "catenoid") {
    const double e = frame_error(mr.solution, cat);
    gates.add("catenoid_frame_error", e, 1e-5);
  }
  const Reconstruction rec = surface_from_frame(mr.solution.grid, mr.solution.frames);
  write_obj(path_in(cfg, "cauchy.obj"), points_of(rec.element));
  write_csv(path_in(cfg, "cauchy.csv"), mr.solution.grid,
            {{"q1", &mr.solution.q1}, {"q2", &mr.solution.q2}, {"p1", &mr.solution.p1}, {"p2", &mr.solution.p2},
             {"a", &mr.solution.a}, {"c", &mr.solution.c}});
  json se = json::array();
  for (double v : rep.se.max) se.push_back(v);
  json report = {{"data", cfg.data},
                 {"curve", {{"nodes", curve.t.size()}, {"steps", curve.steps}, {"drift", curve.drift}}},
                 {"growth", mr.growth},
                 {"residuals",
                  {{"eta", rep.eta},
                   {"maurer_cartan", rep.maurer_cartan},
                   {"algebra", rep.algebra},
                   {"structure_equations", se},
                   {"l_minimal", rep.l_minimal},
                   {"gauge", rep.gauge}}}};
  finish(cfg, report, gates, {{"total", since(t0)}});
  return gates.pass ? 0 : 1;
}

int run_special(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Grid2 g(cfg.nu, cfg.nv, cfg.domain[0], cfg.domain[1], cfg.domain[2], cfg.domain[3]);
  const auto bc = boundary_function(cfg.bc);
  const SpecialSolution s = solve_special(cfg.c, g, bc);
  Gates gates;
  gates.add("newton_residual", s.residual, 1e-10);
  json report = {{"c", cfg.c},
                 {"iterations", s.iterations},
                 {"residual_log", s.residual_log},
                 {"character_spread", s.character_spread}};
  if (cfg.bc == "lncosh" && cfg.c == 1.0) {
    double e = 0.0;
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) e = std::max(e, std::abs(s.field.u(i, j) - bc(g.x1(i), g.x2(j))));
    report["manufactured_error"] = e;
  }
  write_csv(path_in(cfg, "special.csv"), g, {{"u", &s.field.u}});
  finish(cfg, report, gates, {{"total", since(t0)}});
  return gates.pass ? 0 : 1;
}

int run_acceptance_cmd(const RunConfig& cfg, int only) {
  const auto results = run_acceptance(cfg.seed, only);
  bool all = true;
  for (const auto& r : results) {
    std::cout << format_line(r) << std::endl;
    all = all && r.pass;
  }
  write_text(path_in(cfg, "report.json"), acceptance_json(results, cfg.seed).dump(2) + "\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laguerre surface invariants, T-transforms and L-minimal Cauchy problems"};
  app.require_subcommand(1);
  std::string config_path, params, grid, mlist, domain;
  RunConfig cli;
  int only = 0;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", config_path, "INI configuration file");
    s->add_option("--out", cli.out, "output directory");
  };
  auto* an = app.add_subcommand("analyze", "invariants of a catalog surface");
  common(an);
  an->add_option("--surface", cli.surface);
  an->add_option("--params", params, "k=v,...");
  an->add_option("--grid", grid, "NxM");
  an->add_option("--jets", cli.jets)->check(CLI::IsMember({"analytic", "fd"}));

  auto* tt = app.add_subcommand("ttransform", "T-transforms of a Blaschke potential");
  common(tt);
  tt->add_option("--potential", cli.potential, "catalog name, special, or CSV with x,y,u");
  tt->add_option("--m", mlist, "comma-separated list");
  tt->add_option("--c", cli.c, "character for --potential special");
  tt->add_option("--grid", grid);
  tt->add_option("--domain", domain, "x0,x1,y0,y1");
  tt->add_option("--params", params);

  auto* ca = app.add_subcommand("cauchy", "L-minimal surface through an initial curve");
  common(ca);
  ca->add_option("--data", cli.data, "catenoid, zero, constant:s1,s2,r1,r2, or CSV t,s1,s2,r1,r2");
  ca->add_option("--steps", cli.steps);
  ca->add_option("--hy", cli.hy);
  ca->add_option("--nodes", cli.curve_nodes);

  auto* sp = app.add_subcommand("solve-special", "Newton solver for the special potential equation");
  common(sp);
  sp->add_option("--c", cli.c);
  sp->add_option("--domain", domain, "x0,x1,y0,y1");
  sp->add_option("--bc", cli.bc, "lncosh, zero, or CSV with x,y,u");
  sp->add_option("--grid", grid);

  auto* ac = app.add_subcommand("acceptance", "run the acceptance criteria");
  common(ac);
  ac->add_option("--seed", cli.seed);
  ac->add_option("--only", only, "single criterion id");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    cfg.command = sub->get_name();
    auto given = [&](const char* opt) { return sub->get_option_no_throw(opt) && sub->count(opt) > 0; };
    if (given("--out")) cfg.out = cli.out;
    if (given("--surface")) cfg.surface = cli.surface;
    if (given("--params")) cfg.params = parse_params(params);
    if (given("--grid")) std::tie(cfg.nu, cfg.nv) = parse_grid(grid);
    if (given("--jets")) cfg.jets = cli.jets;
    if (given("--potential")) cfg.potential = cli.potential;
    if (given("--m")) cfg.m = parse_list(mlist);
    if (given("--c")) cfg.c = cli.c;
    if (given("--domain")) {
      const auto d = parse_list(domain);
      if (d.size() != 4) throw Error(ErrorCode::ConfigError, "--domain needs x0,x1,y0,y1");
      std::copy(d.begin(), d.end(), cfg.domain.begin());
    }
    if (given("--data")) cfg.data = cli.data;
    if (given("--steps")) cfg.steps = cli.steps;
    if (given("--hy")) cfg.hy = cli.hy;
    if (given("--nodes")) cfg.curve_nodes = cli.curve_nodes;
    if (given("--bc")) cfg.bc = cli.bc;
    if (given("--seed")) cfg.seed = cli.seed;
    cfg.validate();
    std::filesystem::create_directories(cfg.out);

    if (cfg.command == "analyze") return run_analyze(cfg);
    if (cfg.command == "ttransform") return run_ttransform(cfg);
    if (cfg.command == "cauchy") return run_cauchy(cfg);
    if (cfg.command == "solve-special") return run_special(cfg);
    return run_acceptance_cmd(cfg, only);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    for (const auto& [i, j] : e.nodes()) std::cerr << "  node (" << i << ", " << j << ")\n";
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "IoError: " << e.what() << "\n";
    return exit_code(ErrorCode::IoError);
  }
}
