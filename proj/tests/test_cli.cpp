#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "thermistor/cli.hpp"

using namespace thermistor;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("thermistor_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

const std::vector<std::string> tiny_study = {"--problem", "p1", "--nx", "2,4", "--nt-rule", "half",
                                             "--ref-scheme", "ie", "--ref-nx", "8", "--ref-nt", "32"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_CASE("run writes a trajectory and a manifest") {
  const fs::path dir = scratch("run");
  const auto r = cli({"run", "--problem", "p1", "--nx", "4", "--nt", "8", "--scheme", "semi", "--out", dir.string()});
  CHECK(r.code == 0);
  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("k = 0.125\n") != std::string::npos);
  CHECK(manifest.find("solver_rel_tol = 1e-10\n") != std::string::npos);
  CHECK(manifest.find("picard_tol = 1e-08\n") != std::string::npos);
  CHECK(manifest.find("quadrature = ") != std::string::npos);
  CHECK(manifest.find("wall_time_s = ") != std::string::npos);
  CHECK(fs::exists(dir / "snapshots" / "index.txt"));
  CHECK(fs::exists(dir / "snapshots" / "step_000008.bin"));
  fs::remove_all(dir);
}

TEST_CASE("run records the problem 2 viscosity") {
  const fs::path dir = scratch("run_p2");
  const auto r = cli({"run", "--problem", "p2", "--gamma", "1e-2", "--nx", "2", "--nt", "2", "--out", dir.string()});
  CHECK(r.code == 0);
  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("viscosity_voigt = [[0.01, 0.01, 0], [0.01, 0.01, 0], [0, 0, 0.01]]") != std::string::npos);
  CHECK(manifest.find("gamma = 0.01") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({"run", "--nx", "0", "--nt", "8"}).code == 2);
  CHECK(cli({"run", "--nt", "8"}).code == 2);
  CHECK(cli({"run", "--nx", "4", "--nt", "8", "--scheme", "rk4"}).code == 2);
  CHECK(cli({"run", "--nx", "4", "--nt", "8", "--problem", "p9"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({}).code == 2);
  const auto missing = cli({"run", "--problem", "custom", "--config", "/nonexistent.ini", "--nx", "2", "--nt", "2"});
  CHECK(missing.code == 2);
  CHECK_FALSE(missing.err.empty());
}

TEST_CASE("simulation failures exit with 1") {
  const fs::path dir = scratch("fail");
  const auto r = cli({"run", "--nx", "4", "--nt", "8", "--scheme", "ie", "--picard-max", "1", "--out", dir.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("Picard") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("converge writes tables and plots deterministically") {
  const fs::path a = scratch("conv_a");
  const fs::path b = scratch("conv_b");
  REQUIRE(cli(with({"converge"}, with(tiny_study, {"--out", a.string()}))).code == 0);
  REQUIRE(cli(with({"converge"}, with(tiny_study, {"--out", b.string()}))).code == 0);
  const std::string errors = slurp(a / "errors.csv");
  CHECK(errors == slurp(b / "errors.csv"));
  CHECK(slurp(a / "orders.csv") == slurp(b / "orders.csv"));
  CHECK(slurp(a / "plots" / "errors.svg") == slurp(b / "plots" / "errors.svg"));
  CHECK(line_count(errors) == 3);
  CHECK(line_count(slurp(a / "orders.csv")) == 2);
  CHECK(fs::exists(a / "timings.csv"));
  const std::string manifest = slurp(a / "manifest.txt");
  CHECK(manifest.find("reference_scheme = ie") != std::string::npos);
  CHECK(manifest.find("reference_nx = 8") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("converge options") {
  SUBCASE("no plot") {
    const fs::path dir = scratch("noplot");
    CHECK(cli(with({"converge"}, with(tiny_study, {"--out", dir.string(), "--no-plot"}))).code == 0);
    CHECK_FALSE(fs::exists(dir / "plots" / "errors.svg"));
    fs::remove_all(dir);
  }
  SUBCASE("divisibility violations are rejected up front") {
    const fs::path dir = scratch("nodiv");
    const auto r = cli({"converge", "--nx", "3", "--ref-nx", "8", "--ref-nt", "32", "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK_FALSE(fs::exists(dir / "errors.csv"));
    fs::remove_all(dir);
  }
  SUBCASE("self reference") {
    const fs::path dir = scratch("self");
    CHECK(cli({"converge", "--nx", "4", "--nt-rule", "list", "--nt", "8", "--ref-scheme", "semi", "--ref-nx", "4",
               "--ref-nt", "8", "--out", dir.string(), "--no-plot"})
              .code == 0);
    std::istringstream rows(slurp(dir / "errors.csv"));
    std::string header;
    std::string row;
    std::getline(rows, header);
    std::getline(rows, row);
    CHECK(row == "4,0.25,8,0.125,0.0000000000e+00,0.0000000000e+00,0.0000000000e+00,0.0000000000e+00,"
                 "0.0000000000e+00,0.0000000000e+00,0.0000000000e+00,nan");
    fs::remove_all(dir);
  }
  SUBCASE("gamma sweep") {
    const fs::path dir = scratch("sweep");
    CHECK(cli({"converge", "--problem", "p2", "--gamma", "1,0.1", "--nx", "2,4", "--nt-rule", "quarter", "--ref-scheme",
               "semi", "--ref-nx", "8", "--ref-nt", "16", "--out", dir.string()})
              .code == 0);
    CHECK(fs::exists(dir / "gamma_1" / "errors.csv"));
    CHECK(fs::exists(dir / "gamma_0.1" / "errors.csv"));
    CHECK(fs::exists(dir / "plots" / "gamma_sweep.svg"));
    fs::remove_all(dir);
  }
}

TEST_CASE("compare") {
  SUBCASE("missing reference flags") {
    CHECK(cli({"compare", "--nx", "2,4"}).code == 2);
    CHECK(cli({"compare", "--nx", "2,4", "--ref-nx", "8"}).code == 2);
  }
  SUBCASE("same scheme twice gives unit ratios") {
    const fs::path dir = scratch("cmp_same");
    REQUIRE(cli(with({"compare", "--schemes", "semi,semi"}, with(tiny_study, {"--out", dir.string()}))).code == 0);
    std::istringstream rows(slurp(dir / "compare.csv"));
    std::string line;
    std::getline(rows, line);
    int data = 0;
    while (std::getline(rows, line)) {
      ++data;
      std::vector<std::string> cells;
      std::istringstream cs(line);
      for (std::string c; std::getline(cs, c, ',');) cells.push_back(c);
      REQUIRE(cells.size() == 22);
      for (std::size_t c = 3; c < cells.size(); c += 3) CHECK(cells[c] == "1.0000000000e+00");
    }
    CHECK(data == 2);
    fs::remove_all(dir);
  }
  SUBCASE("semi against implicit Euler") {
    const fs::path dir = scratch("cmp");
    REQUIRE(cli(with({"compare"}, with(tiny_study, {"--out", dir.string()}))).code == 0);
    CHECK(fs::exists(dir / "0_semi" / "errors.csv"));
    CHECK(fs::exists(dir / "1_ie" / "errors.csv"));
    CHECK(slurp(dir / "compare.csv").rfind("nx,err_theta_l2_semi,err_theta_l2_ie,err_theta_l2_ratio", 0) == 0);
    fs::remove_all(dir);
  }
}

TEST_CASE("validate") {
  const auto r = cli({"validate", "--problem", "p1"});
  CHECK(r.code == 0);
  CHECK((r.out + r.err).find("semidefinite") != std::string::npos);
  CHECK(cli({"validate", "--problem", "mms-elasticity"}).code == 0);
}

TEST_CASE("custom problem from a config file") {
  const fs::path dir = scratch("custom");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "problem.ini");
    cfg << "[problem]\nname = slab\nfinal_time = 0.5\n[elasticity]\nmu = 1\nlambda = 1\n";
  }
  const auto r = cli({"run", "--problem", "custom", "--config", (dir / "problem.ini").string(), "--nx", "2", "--nt",
                      "4", "--out", (dir / "out").string()});
  CHECK(r.code == 0);
  const std::string manifest = slurp(dir / "out" / "manifest.txt");
  CHECK(manifest.find("final_time = 0.5") != std::string::npos);
  CHECK(manifest.find("k = 0.125") != std::string::npos);
  CHECK(manifest.find("elasticity_voigt = [[3, 1, 0], [1, 3, 0], [0, 0, 1]]") != std::string::npos);

  const auto preset = cli({"run", "--problem", "p1", "--config", (dir / "problem.ini").string(), "--nx", "2", "--nt",
                           "4", "--out", (dir / "out2").string()});
  CHECK(preset.code == 0);
  CHECK(slurp(dir / "out2" / "manifest.txt").find("final_time = 1\n") != std::string::npos);
  fs::remove_all(dir);
}
