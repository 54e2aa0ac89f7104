#include "lag/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include "lag/error.hpp"

namespace lag {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string obj_text(const Field2<Vec3>& points) {
  std::string s;
  s.reserve(points.size() * 64);
  for (const Vec3& p : points.data())
    s += "v " + format17(p(0)) + " " + format17(p(1)) + " " + format17(p(2)) + "\n";
  const int n1 = points.n1(), n2 = points.n2();
  for (int j = 0; j + 1 < n2; ++j) {
    for (int i = 0; i + 1 < n1; ++i) {
      const int a = j * n1 + i + 1, b = a + 1, c = a + n1, d = c + 1;
      s += "f " + std::to_string(a) + " " + std::to_string(b) + " " + std::to_string(d) + "\n";
      s += "f " + std::to_string(a) + " " + std::to_string(d) + " " + std::to_string(c) + "\n";
    }
  }
  return s;
}

void write_obj(const std::string& path, const Field2<Vec3>& points) { write_text(path, obj_text(points)); }

std::string csv_text(const Grid2& g, const std::vector<NamedField>& columns) {
  std::string s = "i,j,x,y";
  for (const auto& c : columns) {
    if (c.second->size() != g.size()) throw Error(ErrorCode::IoError, "column '" + c.first + "' has the wrong size");
    s += "," + c.first;
  }
  s += "\n";
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      s += std::to_string(i) + "," + std::to_string(j) + "," + format17(g.x1(i)) + "," + format17(g.x2(j));
      for (const auto& c : columns) s += "," + format17((*c.second)(i, j));
      s += "\n";
    }
  }
  return s;
}

void write_csv(const std::string& path, const Grid2& g, const std::vector<NamedField>& columns) {
  write_text(path, csv_text(g, columns));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error(ErrorCode::IoError, "write failed: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return static_cast<int>(k);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    boost::algorithm::trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    boost::algorithm::split(cells, line, boost::is_any_of(","));
    for (auto& c : cells) boost::algorithm::trim(c);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size())
      throw Error(ErrorCode::IoError, path + ":" + std::to_string(lineno) + ": wrong number of cells");
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw Error(ErrorCode::IoError, path + ":" + std::to_string(lineno) + ": not a number '" + c + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw Error(ErrorCode::IoError, path + ": empty table");
  return t;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::IoError, "SHA-256 failed");
  std::ostringstream ss;
  for (unsigned int k = 0; k < len; ++k) ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
  return ss.str();
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_text(path)); }

namespace {

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw Error(ErrorCode::ConfigError, "'" + key + "' is not a number: " + v);
  return d;
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != static_cast<int>(d)) throw Error(ErrorCode::ConfigError, "'" + key + "' is not an integer: " + v);
  return static_cast<int>(d);
}

}  // namespace

Params parse_params(const std::string& text) {
  Params p;
  if (boost::algorithm::trim_copy(text).empty()) return p;
  std::vector<std::string> items;
  boost::algorithm::split(items, text, boost::is_any_of(","));
  for (auto item : items) {
    boost::algorithm::trim(item);
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::ConfigError, "expected key=value, got '" + item + "'");
    const std::string key = boost::algorithm::trim_copy(item.substr(0, eq));
    p[key] = to_double(key, boost::algorithm::trim_copy(item.substr(eq + 1)));
  }
  return p;
}

std::pair<int, int> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::is_any_of("xX"));
  if (parts.size() == 1) {
    const int n = to_int("grid", parts[0]);
    return {n, n};
  }
  if (parts.size() != 2) throw Error(ErrorCode::ConfigError, "grid must be NxM, got '" + text + "'");
  return {to_int("grid", parts[0]), to_int("grid", parts[1])};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::is_any_of(","));
  std::vector<double> out;
  for (auto& p : parts) out.push_back(to_double("list", boost::algorithm::trim_copy(p)));
  return out;
}

void RunConfig::validate() const {
  static const std::set<std::string> commands{"analyze", "ttransform", "cauchy", "solve-special", "acceptance"};
  if (!commands.count(command)) throw Error(ErrorCode::ConfigError, "unknown command '" + command + "'");
  if (nu < 9 || nv < 9) throw Error(ErrorCode::ConfigError, "grid sizes must be at least 9");
  if (jets != "analytic" && jets != "fd") throw Error(ErrorCode::ConfigError, "jets must be analytic or fd");
  if (steps < 1 || !(hy > 0)) throw Error(ErrorCode::ConfigError, "cauchy needs steps >= 1 and hy > 0");
  if (curve_nodes < 9) throw Error(ErrorCode::ConfigError, "curve nodes must be at least 9");
  if (!(domain[1] > domain[0]) || !(domain[3] > domain[2])) throw Error(ErrorCode::ConfigError, "empty domain");
  const double t[] = {tol.rel,    tol.umbilic, tol.parabolic, tol.immersion, tol.coframe_cond, tol.boost_margin,
                      tol.closed, tol.flat,    tol.gauge_det, tol.growth,    tol.max_height};
  for (double v : t)
    if (!(v > 0)) throw Error(ErrorCode::ConfigError, "tolerances must be positive");
  if (out.empty()) throw Error(ErrorCode::ConfigError, "empty output directory");
}

RunConfig load_config(const std::string& path, RunConfig c) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  std::map<std::string, double*> tolerances{
      {"rel", &c.tol.rel},           {"umbilic", &c.tol.umbilic},       {"parabolic", &c.tol.parabolic},
      {"immersion", &c.tol.immersion}, {"coframe_cond", &c.tol.coframe_cond}, {"boost_margin", &c.tol.boost_margin},
      {"closed", &c.tol.closed},     {"flat", &c.tol.flat},             {"gauge_det", &c.tol.gauge_det},
      {"growth", &c.tol.growth},     {"max_height", &c.tol.max_height}};
  for (const auto& [section, body] : tree) {
    for (const auto& [key, node] : body) {
      const std::string v = boost::algorithm::trim_copy(node.data());
      const std::string full = section + "." + key;
      if (full == "run.command") c.command = v;
      else if (full == "run.out") c.out = v;
      else if (full == "run.seed") c.seed = static_cast<unsigned>(to_int(full, v));
      else if (full == "surface.name") c.surface = v;
      else if (full == "surface.params") c.params = parse_params(v);
      else if (full == "surface.jets") c.jets = v;
      else if (full == "grid.size") std::tie(c.nu, c.nv) = parse_grid(v);
      else if (full == "ttransform.potential") c.potential = v;
      else if (full == "ttransform.m") c.m = parse_list(v);
      else if (full == "ttransform.c" || full == "special.c") c.c = to_double(full, v);
      else if (full == "cauchy.data") c.data = v;
      else if (full == "cauchy.steps") c.steps = to_int(full, v);
      else if (full == "cauchy.hy") c.hy = to_double(full, v);
      else if (full == "cauchy.nodes") c.curve_nodes = to_int(full, v);
      else if (full == "special.bc") c.bc = v;
      else if (full == "special.domain") {
        const auto d = parse_list(v);
        if (d.size() != 4) throw Error(ErrorCode::ConfigError, "domain needs 4 numbers");
        std::copy(d.begin(), d.end(), c.domain.begin());
      } else if (section == "tolerances" && tolerances.count(key)) {
        *tolerances[key] = to_double(full, v);
      } else {
        throw Error(ErrorCode::ConfigError, "unknown key '" + full + "'");
      }
    }
  }
  return c;
}

nlohmann::json tolerances_json(const Tolerances& t) {
  return {{"rel", t.rel},       {"umbilic", t.umbilic},         {"parabolic", t.parabolic},
          {"immersion", t.immersion}, {"coframe_cond", t.coframe_cond}, {"boost_margin", t.boost_margin},
          {"closed", t.closed}, {"flat", t.flat},               {"gauge_det", t.gauge_det},
          {"growth", t.growth}, {"max_height", t.max_height}};
}

nlohmann::json config_json(const RunConfig& c) {
  return {{"command", c.command}, {"surface", c.surface},     {"params", c.params},
          {"grid", {c.nu, c.nv}}, {"jets", c.jets},           {"potential", c.potential},
          {"m", c.m},             {"c", c.c},                 {"data", c.data},
          {"steps", c.steps},     {"hy", c.hy},               {"curve_nodes", c.curve_nodes},
          {"domain", c.domain},   {"bc", c.bc},               {"tolerances", tolerances_json(c.tol)},
          {"out", c.out},         {"seed", c.seed}};
}

}  // namespace lag
