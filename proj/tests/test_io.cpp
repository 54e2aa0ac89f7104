#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "lag/io.hpp"

using namespace lag;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lag_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

int count_prefix(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  int n = 0;
  for (std::string line; std::getline(in, line);)
    if (line.rfind(prefix, 0) == 0) ++n;
  return n;
}

template <class F>
void expect_code(ErrorCode code, F&& f) {
  try {
    f();
    FAIL("no error raised");
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("OBJ output") {
  Field2<Vec3> p(2, 2, Vec3::Zero());
  p(1, 0) = Vec3(1, 0, 0);
  p(0, 1) = Vec3(0, 1, 0);
  p(1, 1) = Vec3(1, 1, 0.5);
  const std::string s = obj_text(p);
  CHECK(count_prefix(s, "v ") == 4);
  CHECK(count_prefix(s, "f ") == 2);
  CHECK(s.find("f 1 2 4\nf 1 4 3\n") != std::string::npos);

  Field2<Vec3> q(5, 3, Vec3::Zero());
  const std::string t = obj_text(q);
  CHECK(count_prefix(t, "v ") == 15);
  CHECK(count_prefix(t, "f ") == 16);
}

TEST_CASE("format17 round trips") {
  for (double v : {0.1, -1.0 / 3.0, 6.02214076e23, 2.2250738585072014e-308, 0.0}) CHECK(std::stod(format17(v)) == v);
}

TEST_CASE("CSV output and input") {
  const Grid2 g(3, 2, 0.0, 1.0, -1.0, 1.0);
  Field2<double> a(g), b(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      a(i, j) = i + 10.0 * j;
      b(i, j) = 1.0 / (1 + i + j);
    }
  const std::string s = csv_text(g, {{"a", &a}, {"b", &b}});
  CHECK(s.rfind("i,j,x,y,a,b\n", 0) == 0);
  CHECK(count_prefix(s, "") == 7);

  const fs::path path = scratch("table.csv");
  write_csv(path.string(), g, {{"a", &a}, {"b", &b}});
  const CsvTable t = read_csv(path.string());
  REQUIRE(t.rows.size() == 6);
  CHECK(t.column("b") == 5);
  CHECK(t.column("missing") == -1);
  for (const auto& r : t.rows) {
    const int i = static_cast<int>(r[0]), j = static_cast<int>(r[1]);
    CHECK(r[2] == g.x1(i));
    CHECK(r[3] == g.x2(j));
    CHECK(r[4] == a(i, j));
    CHECK(r[5] == b(i, j));
  }

  Field2<double> short_col(2, 2, 0.0);
  expect_code(ErrorCode::IoError, [&] { csv_text(g, {{"s", &short_col}}); });
}

TEST_CASE("CSV read errors") {
  const fs::path ragged = scratch("ragged.csv");
  write_text(ragged.string(), "a,b\n1,2\n3\n");
  expect_code(ErrorCode::IoError, [&] { read_csv(ragged.string()); });
  const fs::path word = scratch("word.csv");
  write_text(word.string(), "a,b\n1,x\n");
  expect_code(ErrorCode::IoError, [&] { read_csv(word.string()); });
  const fs::path empty = scratch("empty.csv");
  write_text(empty.string(), "");
  expect_code(ErrorCode::IoError, [&] { read_csv(empty.string()); });
  expect_code(ErrorCode::IoError, [&] { read_csv(scratch("absent.csv").string()); });
}

TEST_CASE("SHA-256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const std::string big(1000000, 'a');
  CHECK(sha256_hex(big) == "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
  const fs::path path = scratch("digest.txt");
  write_text(path.string(), "abc");
  CHECK(sha256_file(path.string()) == sha256_hex("abc"));
  CHECK(sha256_file(path.string()) == sha256_file(path.string()));
}

TEST_CASE("parameter parsing") {
  const Params p = parse_params("a=1.5, b = -2,c=3e-2");
  CHECK(p.size() == 3);
  CHECK(p.at("a") == 1.5);
  CHECK(p.at("b") == -2.0);
  CHECK(p.at("c") == 0.03);
  CHECK(parse_params("").empty());
  expect_code(ErrorCode::ConfigError, [] { parse_params("a"); });
  expect_code(ErrorCode::ConfigError, [] { parse_params("=1"); });
  expect_code(ErrorCode::ConfigError, [] { parse_params("a=one"); });

  CHECK(parse_grid("64") == std::pair{64, 64});
  CHECK(parse_grid("128x33") == std::pair{128, 33});
  expect_code(ErrorCode::ConfigError, [] { parse_grid("12x"); });
  expect_code(ErrorCode::ConfigError, [] { parse_grid("1.5x3"); });

  CHECK(parse_list("-1,0.5, 2") == std::vector<double>{-1.0, 0.5, 2.0});
  expect_code(ErrorCode::ConfigError, [] { parse_list("1,,2"); });
}

TEST_CASE("INI configuration") {
  const fs::path path = scratch("run.ini");
  write_text(path.string(),
             "[run]\ncommand = ttransform\nout = results\nseed = 7\n"
             "[grid]\nsize = 96x80\n"
             "[ttransform]\npotential = lncosh\nm = -0.5, 0.5\n"
             "[tolerances]\nflat = 1e-6\n");
  const RunConfig c = load_config(path.string());
  CHECK(c.command == "ttransform");
  CHECK(c.out == "results");
  CHECK(c.seed == 7u);
  CHECK(c.nu == 96);
  CHECK(c.nv == 80);
  CHECK(c.m == std::vector<double>{-0.5, 0.5});
  CHECK(c.tol.flat == 1e-6);
  CHECK(c.tol.rel == default_tolerances().rel);
  CHECK_NOTHROW(c.validate());
  CHECK(config_json(c)["seed"] == 7);

  const fs::path bad = scratch("bad.ini");
  write_text(bad.string(), "[grid]\nsize = 64\nshape = square\n");
  expect_code(ErrorCode::ConfigError, [&] { load_config(bad.string()); });
  write_text(bad.string(), "[tolerances]\nwobble = 1\n");
  expect_code(ErrorCode::ConfigError, [&] { load_config(bad.string()); });
  write_text(bad.string(), "[special]\ndomain = 0,1,0\n");
  expect_code(ErrorCode::ConfigError, [&] { load_config(bad.string()); });
}

TEST_CASE("configuration validation") {
  RunConfig c;
  c.command = "analyze";
  CHECK_NOTHROW(c.validate());
  auto broken = [&](auto edit) {
    RunConfig d = c;
    edit(d);
    expect_code(ErrorCode::ConfigError, [&] { d.validate(); });
  };
  broken([](RunConfig& d) { d.command = "draw"; });
  broken([](RunConfig& d) { d.nu = 8; });
  broken([](RunConfig& d) { d.jets = "spectral"; });
  broken([](RunConfig& d) { d.hy = 0.0; });
  broken([](RunConfig& d) { d.curve_nodes = 3; });
  broken([](RunConfig& d) { d.domain = {1.0, 0.0, -1.0, 1.0}; });
  broken([](RunConfig& d) { d.tol.flat = -1.0; });
  broken([](RunConfig& d) { d.out.clear(); });
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ErrorCode::ConfigError) == 2);
  CHECK(exit_code(ErrorCode::IoError) == 3);
  CHECK(exit_code(ErrorCode::PathDependence) == 4);
  CHECK(exit_code(ErrorCode::NotASphere) == 4);
  CHECK(std::string(error_name(ErrorCode::IllPosedGrowth)) == "IllPosedGrowth");
}
