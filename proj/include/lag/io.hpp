#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lag/catalog.hpp"
#include "lag/config.hpp"
#include "lag/grid.hpp"
#include "lag/quadric.hpp"

namespace lag {

// Shortest-round-trip-safe text for a double (17 significant digits).
std::string format17(double v);

// Row-major vertices, two triangles per grid cell.
std::string obj_text(const Field2<Vec3>& points);
void write_obj(const std::string& path, const Field2<Vec3>& points);

using NamedField = std::pair<std::string, const Field2<double>*>;
// Header "i,j,x,y,<names>", one row per node in row-major order.
std::string csv_text(const Grid2& g, const std::vector<NamedField>& columns);
void write_csv(const std::string& path, const Grid2& g, const std::vector<NamedField>& columns);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  int column(const std::string& name) const;  // -1 if absent
};
CsvTable read_csv(const std::string& path);

// Hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

// Key-value parsing used by the command line and config files.
Params parse_params(const std::string& text);           // "k=v,k=v"
std::pair<int, int> parse_grid(const std::string& text);  // "NxM" or "N"
std::vector<double> parse_list(const std::string& text);  // "a,b,c"

struct RunConfig {
  std::string command;
  std::string surface = "catenoid";
  Params params;
  int nu = 64, nv = 64;
  std::string jets = "analytic";
  std::string potential = "lncosh";
  std::vector<double> m{-1.0, 0.0, 1.0};
  double c = 1.0;
  std::string data = "catenoid";
  int steps = 10;
  double hy = 1e-3;
  int curve_nodes = 81;
  std::array<double, 4> domain{-1.0, 1.0, -1.0, 1.0};
  std::string bc = "lncosh";
  Tolerances tol = default_tolerances();
  std::string out = "out";
  unsigned seed = 1;

  void validate() const;  // ConfigError on bad values
};

// INI file with sections [run], [surface], [grid], [ttransform], [cauchy],
// [special], [tolerances]; unknown keys are rejected.
RunConfig load_config(const std::string& path, RunConfig base = {});

nlohmann::json config_json(const RunConfig& c);
nlohmann::json tolerances_json(const Tolerances& t);

}  // namespace lag
