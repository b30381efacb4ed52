#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "thermistor/config.hpp"
#include "thermistor/exceptions.hpp"
#include "thermistor/svg_plot.hpp"
#include "thermistor/trajectory_io.hpp"

using namespace thermistor;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("thermistor_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

PlotSpec sample_plot() {
  PlotSpec p;
  p.title = "errors";
  p.series = {{"theta L2", {0.25, 0.125, 0.0625}, {1e-1, 2.5e-2, 6.25e-3}},
              {"phi H1", {0.25, 0.125, 0.0625}, {0.4, 0.2, 0.1}}};
  return p;
}

}  // namespace

TEST_CASE("snapshot round trip") {
  const auto traj = run_simulation(make_problem1(), 2, 4, StepperConfig{});
  const Snapshot& s = traj.snapshots[3];
  std::stringstream buf;
  write_snapshot(buf, 2, 4, s);
  const std::string bytes = buf.str();
  const std::size_t nv = traj.mesh->vertex_count();
  CHECK(bytes.size() == 8 * (4 + 4 * nv));
  // Little-endian header.
  CHECK(static_cast<unsigned char>(bytes[0]) == 2);
  CHECK(static_cast<unsigned char>(bytes[8]) == 4);
  CHECK(static_cast<unsigned char>(bytes[16]) == 3);

  const SnapshotRecord rec = read_snapshot(buf);
  CHECK(rec.nx == 2);
  CHECK(rec.nt == 4);
  CHECK(rec.snapshot.n == 3);
  CHECK(rec.snapshot.t == s.t);
  CHECK(rec.snapshot.theta == s.theta);
  CHECK(rec.snapshot.phi == s.phi);
  CHECK(rec.snapshot.u == s.u);

  std::stringstream truncated(bytes.substr(0, 20));
  CHECK_THROWS(read_snapshot(truncated));
}

TEST_CASE("trajectory directory") {
  const auto traj = run_simulation(make_problem1(), 2, 4, StepperConfig{});
  const fs::path dir = scratch_dir("traj");
  write_trajectory(dir, traj);
  CHECK(fs::exists(dir / "index.txt"));
  for (int n = 0; n <= 4; ++n) CHECK(fs::exists(dir / fmt::format("step_{:06d}.bin", n)));
  const std::string index = slurp(dir / "index.txt");
  CHECK(index.rfind("# nx=2 nt=4", 0) == 0);
  CHECK(index.find("\n4 1 step_000004.bin\n") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("svg plot") {
  PlotSpec two;
  two.series = {{"e", {2.0, 1.0}, {4.0, 1.0}}};
  CHECK(render_svg(two).find("e (slope 2.00)") != std::string::npos);
  CHECK(fitted_slope(std::vector<double>{2.0, 1.0}, std::vector<double>{4.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-14));

  const std::string svg = render_svg(sample_plot());
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("theta L2 (slope 2.00)") != std::string::npos);
  CHECK(svg.find("phi H1 (slope 1.00)") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(render_svg(sample_plot()) == svg);

  const fs::path dir = scratch_dir("svg");
  write_svg_plot(sample_plot(), dir / "a.svg");
  write_svg_plot(sample_plot(), dir / "b.svg");
  CHECK(slurp(dir / "a.svg") == slurp(dir / "b.svg"));

  PlotSpec empty;
  CHECK_THROWS_AS(write_svg_plot(empty, dir / "empty.svg"), InvalidArgument);
  CHECK_FALSE(fs::exists(dir / "empty.svg"));
  PlotSpec hollow;
  hollow.series = {{"none", {}, {}}};
  CHECK_THROWS_AS(render_svg(hollow), InvalidArgument);
  PlotSpec negative;
  negative.series = {{"neg", {1.0, 0.5}, {1.0, -1.0}}};
  CHECK_THROWS_AS(render_svg(negative), InvalidArgument);
  fs::remove_all(dir);
}

TEST_CASE("problem config files") {
  SUBCASE("empty file gives problem 1 values") {
    std::istringstream in("");
    const ProblemSpec p = parse_problem_config(in);
    CHECK(p.material.viscosity == problem1_voigt());
    CHECK(p.material.conductivity == sigma_problem1());
    CHECK(p.boundary_potential(0.0, 0.0, 0.3) == 5.0);
    CHECK(p.final_time == 1.0);
  }
  SUBCASE("every section") {
    std::istringstream in(R"(
[problem]
name = trial
final_time = 0.5
gamma = 0.1

[conductivity]
law = constant
value = 2

[elasticity]
mu = 1
lambda = 2

[coupling]
m11 = 2
m12 = 0.5
m21 = 0.5
m22 = 3

[coefficients]
density = 4
specific_heat = 5
thermal_conductivity = 6
coupling_temperature = 7

[boundary]
phi_const = 1
phi_x = 2
phi_y = 3

[forcing]
fx = 0.25
fy = -1
)");
    const ProblemSpec p = parse_problem_config(in);
    CHECK(p.name == "trial");
    CHECK(p.final_time == 0.5);
    CHECK(p.material.viscosity == problem1_voigt().scaled(0.1));
    CHECK(p.material.elasticity == lame_voigt(1.0, 2.0));
    CHECK(p.material.conductivity(123.0) == 2.0);
    CHECK(p.material.thermal_expansion.m[0][1] == 0.5);
    CHECK(p.material.thermal_expansion.m[1][1] == 3.0);
    CHECK(p.material.density == 4.0);
    CHECK(p.material.specific_heat == 5.0);
    CHECK(p.material.thermal_conductivity == 6.0);
    CHECK(p.material.coupling_temperature == 7.0);
    CHECK(p.boundary_potential(0.0, 1.0, 1.0) == 6.0);
    CHECK(p.body_force(0.0, 0.3, 0.3) == Vec2{0.25, -1.0});
  }
  SUBCASE("Voigt rows and Young's modulus") {
    std::istringstream in(R"(
[viscosity]
voigt = 2 1 0 2 0 1
[elasticity]
young = 150e7
poisson = 0.01
[conductivity]
law = arctan
offset = 3
scale = 1
slope = 2
shift = 1
)");
    const ProblemSpec p = parse_problem_config(in);
    CHECK(p.material.viscosity == VoigtTensor::from_rows({2, 1, 0}, {1, 2, 0}, {0, 0, 1}));
    const auto lame = lame_from_young_poisson(150e7, 0.01);
    CHECK(p.material.elasticity == lame_voigt(lame.mu, lame.lambda));
    CHECK(p.material.conductivity(0.5) == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("bad input") {
    std::istringstream bad_law("[conductivity]\nlaw = quadratic\n");
    CHECK_THROWS_AS(parse_problem_config(bad_law), InvalidArgument);
    std::istringstream bad_number("[problem]\nfinal_time = soon\n");
    CHECK_THROWS_AS(parse_problem_config(bad_number), InvalidArgument);
    std::istringstream bad_coupling("[coupling]\nm = abc\n");
    CHECK_THROWS_AS(parse_problem_config(bad_coupling), InvalidArgument);
    std::istringstream short_voigt("[elasticity]\nvoigt = 1 2 3\n");
    CHECK_THROWS_AS(parse_problem_config(short_voigt), InvalidArgument);
    CHECK_THROWS_AS(load_problem_config("/nonexistent/problem.ini"), InvalidArgument);
  }
}
