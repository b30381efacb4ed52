#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "thermistor/assembly.hpp"
#include "thermistor/exceptions.hpp"
#include "thermistor/stepper.hpp"

using namespace thermistor;
using std::numbers::pi;

namespace {

ProblemSpec zero_spec() {
  ProblemSpec spec;
  spec.name = "zero";
  spec.material.viscosity = problem1_voigt();
  spec.material.elasticity = problem1_voigt();
  spec.material.thermal_expansion = CouplingMatrixSpec::identity();
  spec.material.conductivity = sigma_problem1();
  return spec;
}

bool all_zero(const std::vector<double>& v) {
  for (double x : v) {
    if (x != 0.0) return false;
  }
  return true;
}

// Linear and decoupled: sigma = 1, phi_b = 0, M = 0.
ProblemSpec decoupled_spec() {
  ProblemSpec spec = zero_spec();
  spec.material.conductivity = Conductivity::constant(1.0);
  spec.material.thermal_expansion = {};
  spec.material.viscosity = lame_voigt(1.0, 1.0);
  spec.material.elasticity = lame_voigt(1.0, 1.0);
  spec.initial_temperature = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
  spec.initial_displacement = [](double x, double y) { return Vec2{x * (1 - x) * y * (1 - y), 0.0}; };
  return spec;
}

std::vector<double> free_rows(std::vector<double> v, const Mesh& mesh, int components) {
  for (Index b : mesh.boundary_vertices()) {
    for (int c = 0; c < components; ++c) v[components * b + c] = 0.0;
  }
  return v;
}

}  // namespace

TEST_CASE("time grid is exact at the end") {
  for (int nt : {1, 3, 7, 10, 128, 8192}) {
    const TimeGrid grid{1.0, nt};
    CHECK(grid.time(nt) == 1.0);
    CHECK(grid.time(0) == 0.0);
    for (int n = 0; n < nt; n += std::max(1, nt / 5)) CHECK(grid.time(n) == 1.0 * n / nt);
  }
  const TimeGrid grid{0.1, 3};
  CHECK(grid.time(3) == 0.1);
}

TEST_CASE("scheme names") {
  CHECK(parse_scheme("semi") == Scheme::semi_implicit);
  CHECK(parse_scheme("semi-implicit") == Scheme::semi_implicit);
  CHECK(parse_scheme("ie") == Scheme::implicit_euler);
  CHECK(parse_scheme("implicit-euler") == Scheme::implicit_euler);
  CHECK(to_string(Scheme::implicit_euler) == "ie");
  CHECK_THROWS_AS(parse_scheme("rk4"), InvalidArgument);
}

TEST_CASE("zero data is a fixed point of both schemes") {
  for (Scheme scheme : {Scheme::semi_implicit, Scheme::implicit_euler}) {
    StepperConfig config;
    config.scheme = scheme;
    Simulation sim(zero_spec(), 4, 8, config);
    while (!sim.finished()) {
      sim.advance();
      CHECK(all_zero(sim.state().theta));
      CHECK(all_zero(sim.state().phi));
      CHECK(all_zero(sim.state().u));
      if (scheme == Scheme::implicit_euler) CHECK(sim.last_picard_iterations() == 1);
    }
  }
  const auto traj = run_simulation(zero_spec(), 3, 1, StepperConfig{});
  REQUIRE(traj.snapshots.size() == 2);
  for (const auto& s : traj.snapshots) {
    CHECK(all_zero(s.theta));
    CHECK(all_zero(s.u));
    CHECK(all_zero(s.velocity));
  }
}

TEST_CASE("initial state") {
  const ProblemSpec p1 = make_problem1();
  const Operators ops(std::make_shared<Mesh>(8), p1, TimeGrid{1.0, 32});
  const State s0 = ops.initial_state();
  const auto exact = interpolate_nodal(ops.mesh(), [](double x, double) { return 5.0 * (1.0 - x); });
  CHECK(oracle::max_abs_diff(s0.phi, exact) <= 1e-9);

  ProblemSpec moving = decoupled_spec();
  moving.initial_velocity = [](double x, double y) { return Vec2{x * y, -x}; };
  const Operators ops2(std::make_shared<Mesh>(4), moving, TimeGrid{1.0, 10});
  const State m0 = ops2.initial_state();
  const auto v0 = interpolate_nodal(ops2.mesh(), moving.initial_velocity);
  CHECK(oracle::max_abs_diff(velocity(m0, ops2.k()), v0) <= 1e-14);
}

TEST_CASE("semi-implicit temperature solve reads only lagged values") {
  const ProblemSpec p1 = make_problem1();
  const Operators ops(std::make_shared<Mesh>(4), p1, TimeGrid{1.0, 8});
  State s = ops.initial_state();
  s = semi_implicit_step(s, ops);
  s = semi_implicit_step(s, ops);

  const State next = semi_implicit_step(s, ops);
  const auto manual = ops.solve_temperature(s.theta, s.theta, s.phi, velocity(s, ops.k()), ops.grid().time(3));
  CHECK(next.theta == manual);
  // Potential and displacement follow from the new temperature.
  CHECK(next.phi == ops.solve_potential(next.theta, ops.grid().time(3)));
  CHECK(next.u == ops.solve_displacement(next.theta, s.u, s.u_prev, ops.grid().time(3)));
  CHECK(next.u_prev == s.u);

  // Changing the lagged potential changes the temperature.
  State perturbed = s;
  for (double& v : perturbed.phi) v *= 1.01;
  CHECK(semi_implicit_step(perturbed, ops).theta != next.theta);
}

TEST_CASE("Picard iteration counts") {
  SUBCASE("linear decoupled problem takes exactly two iterations") {
    StepperConfig config;
    config.scheme = Scheme::implicit_euler;
    Simulation sim(decoupled_spec(), 4, 6, config);
    while (!sim.finished()) {
      sim.advance();
      CHECK(sim.last_picard_iterations() == 2);
    }
  }
  SUBCASE("problem 1 at nx = 16, k = 2 h^2") {
    StepperConfig config;
    config.scheme = Scheme::implicit_euler;
    Simulation sim(make_problem1(), 16, 128, config);
    while (!sim.finished()) sim.advance();
    CHECK(sim.max_picard_iterations() <= 50);
    MESSAGE("max Picard iterations: " << sim.max_picard_iterations());
  }
  SUBCASE("cap exceeded") {
    StepperConfig config;
    config.scheme = Scheme::implicit_euler;
    config.picard_max_iter = 1;
    Simulation sim(make_problem1(), 4, 8, config);
    try {
      sim.advance();
      FAIL("expected PicardDivergence");
    } catch (const PicardDivergence& e) {
      CHECK(e.last_increment() > config.picard_tol);
      CHECK(std::string(e.what()).rfind("step 1:", 0) == 0);
    }
  }
}

TEST_CASE("implicit Euler result is a fixed point of the coupled system") {
  const ProblemSpec p1 = make_problem1();
  const Operators ops(std::make_shared<Mesh>(4), p1, TimeGrid{1.0, 8});
  const State s0 = ops.initial_state();
  const auto result = implicit_euler_step(s0, ops, 1e-12, 200);
  const State& s1 = result.state;
  const double t = ops.grid().time(1);
  const auto theta = ops.solve_temperature(s0.theta, s1.theta, s1.phi, velocity(s1, ops.k()), t);
  CHECK(oracle::max_abs_diff(theta, s1.theta) <= 1e-9);
  CHECK(oracle::max_abs_diff(ops.solve_potential(s1.theta, t), s1.phi) <= 1e-9);
  CHECK(oracle::max_abs_diff(ops.solve_displacement(s1.theta, s0.u, s0.u_prev, t), s1.u) <= 1e-9);
}

TEST_CASE("problem 2 with zero viscosity still steps") {
  for (Scheme scheme : {Scheme::semi_implicit, Scheme::implicit_euler}) {
    StepperConfig config;
    config.scheme = scheme;
    Simulation sim(make_problem2(0.0), 4, 8, config);
    while (!sim.finished()) sim.advance();
    for (double v : sim.state().u) CHECK(std::isfinite(v));
  }
}

TEST_CASE("snapshot stride") {
  const auto full = run_simulation(make_problem1(), 4, 8, StepperConfig{});
  CHECK(full.snapshots.size() == 9);
  CHECK(full.k == 0.125);
  CHECK(full.snapshots.back().t == 1.0);

  RunOptions options;
  options.stride = 4;
  int observed = 0;
  options.observer = [&](const Snapshot&) { ++observed; };
  const auto strided = run_simulation(make_problem1(), 4, 8, StepperConfig{}, options);
  REQUIRE(strided.snapshots.size() == 3);
  CHECK(strided.snapshots[0].t == 0.0);
  CHECK(strided.snapshots[1].t == 0.5);
  CHECK(strided.snapshots[2].t == 1.0);
  CHECK(observed == 9);
  CHECK(strided.snapshots[2].theta == full.snapshots[8].theta);

  options.stride = 3;
  const auto odd = run_simulation(make_problem1(), 4, 8, StepperConfig{}, options);
  REQUIRE(odd.snapshots.size() == 4);
  CHECK(odd.snapshots.back().n == 8);

  RunOptions tight;
  tight.memory_budget_bytes = 1;
  const auto guarded = run_simulation(make_problem1(), 2, 8, StepperConfig{}, tight);
  CHECK(guarded.snapshots.size() == 9);
}

TEST_CASE("steady state satisfies the stationary equations") {
  ProblemSpec spec = zero_spec();
  spec.material.conductivity = Conductivity::constant(1.0);
  spec.material.viscosity = lame_voigt(1.0, 1.0);
  spec.material.elasticity = lame_voigt(1.0, 1.0);
  spec.boundary_potential = [](double, double x, double) { return x; };
  spec.body_force = [](double, double, double y) { return Vec2{0.0, y}; };
  spec.final_time = 400.0;
  StepperConfig config;
  config.solver.rel_tol = 1e-12;
  Simulation sim(spec, 4, 400, config);
  const Operators& ops = sim.operators();
  int quiet = 0;
  while (!sim.finished() && quiet < 10) {
    const State before = sim.state();
    sim.advance();
    const double inc = std::max({oracle::max_abs_diff(before.theta, sim.state().theta),
                                 oracle::max_abs_diff(before.phi, sim.state().phi),
                                 oracle::max_abs_diff(before.u, sim.state().u)});
    quiet = inc < 1e-12 ? quiet + 1 : 0;
  }
  REQUIRE(quiet == 10);
  const State& s = sim.state();
  const Mesh& mesh = ops.mesh();

  const auto joule = joule_load(mesh, s.theta, s.phi, [](double) { return 1.0; });
  auto heat = ops.stiffness().multiply(s.theta);
  for (std::size_t i = 0; i < heat.size(); ++i) heat[i] -= joule[i];
  CHECK(norm2(free_rows(heat, mesh, 1)) <= 1e-9 * norm2(joule));

  const auto weights = conductivity_weights(mesh, s.theta, [](double) { return 1.0; });
  const auto current = stiffness_matrix(mesh, weights).multiply(s.phi);
  CHECK(norm2(free_rows(current, mesh, 1)) <= 1e-9 * norm2(s.phi));

  auto stress = ops.elasticity().multiply(s.u);
  const auto thermal = ops.coupling().multiply_transpose(s.theta);
  const auto force = load_vector(mesh, [](double, double y) { return Vec2{0.0, y}; });
  for (std::size_t i = 0; i < stress.size(); ++i) stress[i] -= thermal[i] + force[i];
  CHECK(norm2(free_rows(stress, mesh, 2)) <= 1e-9 * (norm2(thermal) + norm2(force)));
}
