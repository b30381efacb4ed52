#include "thermistor/stepper.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "thermistor/exceptions.hpp"

namespace thermistor {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::semi_implicit ? "semi" : "ie";
}

Scheme parse_scheme(const std::string& text) {
  if (text == "semi" || text == "semi-implicit") return Scheme::semi_implicit;
  if (text == "ie" || text == "implicit-euler") return Scheme::implicit_euler;
  throw InvalidArgument(fmt::format("unknown scheme '{}' (expected semi or ie)", text));
}

VectorField velocity(const State& state, double k) {
  VectorField v(state.u.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (state.u[i] - state.u_prev[i]) / k;
  return v;
}

namespace {

SpdSolver constrained_solver(const SparseMatrix& matrix, const std::vector<Index>& dofs,
                             const SolverOptions& options) {
  NodalMap zeros;
  for (Index d : dofs) zeros.emplace(d, 0.0);
  LinearSystem system{matrix, std::vector<double>(matrix.rows(), 0.0), {}};
  return SpdSolver(apply_dirichlet(std::move(system), zeros).matrix, options);
}

std::vector<Index> vector_dofs(const std::vector<Index>& vertices) {
  std::vector<Index> dofs;
  dofs.reserve(2 * vertices.size());
  for (Index v : vertices) {
    dofs.push_back(2 * v);
    dofs.push_back(2 * v + 1);
  }
  return dofs;
}

SparseMatrix temperature_matrix(const MaterialModel& mat, double k, const SparseMatrix& mass,
                                const SparseMatrix& stiffness) {
  return add(mass, mat.density * mat.specific_heat / k, stiffness, mat.thermal_conductivity);
}

SparseMatrix displacement_matrix(const MaterialModel& mat, double k, const SparseMatrix& vmass,
                                 const SparseMatrix& visc, const SparseMatrix& elas) {
  return add(add(vmass, mat.density / (k * k), visc, 1.0 / k), 1.0, elas, 1.0);
}

double relative_increment(const Operators& ops, const std::vector<double>& next,
                          const std::vector<double>& prev) {
  std::vector<double> diff(next.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = next[i] - prev[i];
  const double d = ops.l2(diff);
  const double scale = ops.l2(next);
  return scale > 0.0 ? d / scale : d;
}

}  // namespace

Operators::Operators(std::shared_ptr<const Mesh> mesh, ProblemSpec spec, TimeGrid grid,
                     SolverOptions solver)
    : mesh_(std::move(mesh)),
      spec_(std::move(spec)),
      sigma_(spec_.material.conductivity.law()),
      grid_(grid),
      solver_(solver),
      mass_(mass_matrix(*mesh_)),
      stiffness_(stiffness_matrix(*mesh_)),
      vector_mass_(vector_mass_matrix(*mesh_)),
      viscosity_(elasticity_matrix(*mesh_, spec_.material.viscosity)),
      elasticity_(elasticity_matrix(*mesh_, spec_.material.elasticity)),
      coupling_(coupling_matrix(*mesh_, spec_.material.thermal_expansion)),
      temperature_solver_(constrained_solver(
          temperature_matrix(spec_.material, grid.step(), mass_, stiffness_),
          mesh_->boundary_vertices(), solver)),
      displacement_solver_(constrained_solver(
          displacement_matrix(spec_.material, grid.step(), vector_mass_, viscosity_, elasticity_),
          vector_dofs(mesh_->boundary_vertices()), solver)) {
  if (grid.steps < 1) throw InvalidArgument(fmt::format("need at least one time step, got {}", grid.steps));
  if (!(grid.final_time > 0.0)) throw InvalidArgument("final time must be positive");
}

double Operators::l2(const std::vector<double>& field) const {
  const SparseMatrix& m = field.size() == mesh_->vertex_count() ? mass_ : vector_mass_;
  return std::sqrt(std::max(dot(field, m.multiply(field)), 0.0));
}

ScalarField Operators::solve_temperature(const ScalarField& theta_prev, const ScalarField& theta_lag,
                                         const ScalarField& phi_lag, const VectorField& velocity_lag,
                                         double t) const {
  const MaterialModel& mat = spec_.material;
  const double rc_over_k = mat.density * mat.specific_heat / k();
  std::vector<double> rhs = mass_.multiply(theta_prev);
  const auto joule = joule_load(*mesh_, theta_lag, phi_lag, sigma_);
  const auto coupling = coupling_.multiply(velocity_lag);
  const auto source = scalar_load_vector(
      *mesh_, [&](double x, double y) { return spec_.heat_source(t, x, y); });
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    rhs[i] = rc_over_k * rhs[i] + joule[i] - mat.coupling_temperature * coupling[i] + source[i];
  }
  for (Index v : mesh_->boundary_vertices()) rhs[v] = 0.0;
  return temperature_solver_.solve(rhs);
}

ScalarField Operators::solve_potential(const ScalarField& theta, double t) const {
  const auto weights = conductivity_weights(*mesh_, theta, sigma_);
  LinearSystem system{stiffness_matrix(*mesh_, weights),
                      std::vector<double>(mesh_->vertex_count(), 0.0), {}};
  const NodalMap values = boundary_values(
      *mesh_, [&](double x, double y) { return spec_.boundary_potential(t, x, y); });
  system = apply_dirichlet(std::move(system), values);
  return SpdSolver(system.matrix, solver_).solve(system.rhs);
}

VectorField Operators::solve_displacement(const ScalarField& theta, const VectorField& u1,
                                          const VectorField& u2, double t) const {
  const MaterialModel& mat = spec_.material;
  const double k = this->k();
  std::vector<double> inertia(u1.size());
  for (std::size_t i = 0; i < u1.size(); ++i) inertia[i] = 2.0 * u1[i] - u2[i];
  std::vector<double> rhs = vector_mass_.multiply(inertia);
  const auto damping = viscosity_.multiply(u1);
  const auto thermal = coupling_.multiply_transpose(theta);
  const auto force = load_vector(*mesh_, [&](double x, double y) { return spec_.body_force(t, x, y); });
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    rhs[i] = mat.density / (k * k) * rhs[i] + damping[i] / k + thermal[i] + force[i];
  }
  for (Index v : mesh_->boundary_vertices()) {
    rhs[2 * v] = 0.0;
    rhs[2 * v + 1] = 0.0;
  }
  return displacement_solver_.solve(rhs);
}

State Operators::initial_state() const {
  State s;
  s.n = 0;
  s.t = 0.0;
  s.theta = interpolate_nodal(*mesh_, spec_.initial_temperature);
  s.u = interpolate_nodal(*mesh_, spec_.initial_displacement);
  const VectorField v0 = interpolate_nodal(*mesh_, spec_.initial_velocity);
  s.u_prev.resize(s.u.size());
  for (std::size_t i = 0; i < s.u.size(); ++i) s.u_prev[i] = s.u[i] - k() * v0[i];
  s.phi = solve_potential(s.theta, 0.0);
  return s;
}

State semi_implicit_step(const State& state, const Operators& ops) {
  State next;
  next.n = state.n + 1;
  next.t = ops.grid().time(next.n);
  next.theta = ops.solve_temperature(state.theta, state.theta, state.phi, velocity(state, ops.k()), next.t);
  next.phi = ops.solve_potential(next.theta, next.t);
  next.u = ops.solve_displacement(next.theta, state.u, state.u_prev, next.t);
  next.u_prev = state.u;
  return next;
}

ImplicitStepResult implicit_euler_step(const State& state, const Operators& ops, double picard_tol,
                                       int picard_max_iter) {
  if (picard_max_iter < 1) throw InvalidArgument("picard_max_iter must be >= 1");
  const double k = ops.k();
  ImplicitStepResult result;
  State& it = result.state;
  it = state;
  it.n = state.n + 1;
  it.t = ops.grid().time(it.n);
  it.u_prev = state.u;

  // Aitken dynamic relaxation of the temperature iterate. The fixed point
  // is unaffected; omega only changes the path to it.
  double omega = 1.0;
  ScalarField residual_prev;
  for (int iter = 1; iter <= picard_max_iter; ++iter) {
    VectorField vel(it.u.size());
    for (std::size_t i = 0; i < vel.size(); ++i) vel[i] = (it.u[i] - state.u[i]) / k;
    ScalarField theta = ops.solve_temperature(state.theta, it.theta, it.phi, vel, it.t);
    const double theta_increment = relative_increment(ops, theta, it.theta);
    ScalarField residual(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) residual[i] = theta[i] - it.theta[i];
    if (!residual_prev.empty()) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < residual.size(); ++i) {
        const double d = residual[i] - residual_prev[i];
        num += residual_prev[i] * d;
        den += d * d;
      }
      if (den > 0.0) omega = std::clamp(-omega * num / den, 1.0 / 64, 1.0);
    }
    if (omega < 1.0) {
      for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = it.theta[i] + omega * residual[i];
    }
    residual_prev = std::move(residual);
    ScalarField phi = ops.solve_potential(theta, it.t);
    VectorField u = ops.solve_displacement(theta, state.u, state.u_prev, it.t);

    const double increment = std::max({theta_increment, relative_increment(ops, phi, it.phi),
                                       relative_increment(ops, u, it.u)});
    it.theta = std::move(theta);
    it.phi = std::move(phi);
    it.u = std::move(u);
    result.iterations = iter;
    result.increment = increment;
    if (increment <= picard_tol) return result;
  }
  throw PicardDivergence(fmt::format("Picard iteration did not reach tolerance {:.1e} in {} "
                                     "iterations (last relative increment {:.3e})",
                                     picard_tol, picard_max_iter, result.increment),
                         result.increment);
}

Snapshot make_snapshot(const State& state, double k) {
  return {state.n, state.t, state.theta, state.phi, state.u, velocity(state, k)};
}

Simulation::Simulation(const ProblemSpec& spec, int nx, int nt, const StepperConfig& config)
    : config_(config),
      ops_(std::make_shared<const Mesh>(nx), spec, TimeGrid{spec.final_time, nt}, config.solver),
      state_(ops_.initial_state()) {
  if (config.picard_max_iter < 1) throw InvalidArgument("picard_max_iter must be >= 1");
}

void Simulation::advance() {
  if (finished()) throw InvalidArgument("simulation already reached the final time");
  const int step = state_.n + 1;
  try {
    if (config_.scheme == Scheme::semi_implicit) {
      state_ = semi_implicit_step(state_, ops_);
      last_iterations_ = 0;
    } else {
      auto result = implicit_euler_step(state_, ops_, config_.picard_tol, config_.picard_max_iter);
      state_ = std::move(result.state);
      last_iterations_ = result.iterations;
      max_iterations_ = std::max(max_iterations_, last_iterations_);
    }
  } catch (const SolverFailure& e) {
    throw SolverFailure(fmt::format("step {}: {}", step, e.what()), e.residual());
  } catch (const PicardDivergence& e) {
    throw PicardDivergence(fmt::format("step {}: {}", step, e.what()), e.last_increment());
  } catch (const NotSpd& e) {
    throw NotSpd(fmt::format("step {}: {}", step, e.what()));
  }
}

Trajectory run_simulation(const ProblemSpec& spec, int nx, int nt, const StepperConfig& config,
                          const RunOptions& options) {
  Simulation sim(spec, nx, nt, config);
  Trajectory traj;
  traj.mesh = sim.operators().mesh_ptr();
  traj.nx = nx;
  traj.nt = nt;
  traj.k = sim.k();
  traj.final_time = spec.final_time;
  traj.scheme = config.scheme;

  int stride = options.stride;
  if (stride < 0) throw InvalidArgument("snapshot stride must be >= 0");
  if (stride == 0) {
    const std::size_t per_snapshot = 6 * sim.mesh().vertex_count() * sizeof(double);
    stride = 1;
    if (nt > 4096) {
      while (static_cast<std::size_t>(nt / stride + 2) * per_snapshot > options.memory_budget_bytes &&
             stride < nt) {
        ++stride;
      }
    }
  }
  traj.stride = stride;

  const auto record = [&](const Snapshot& snap) {
    if (options.observer) options.observer(snap);
    if (snap.n % stride == 0 || snap.n == nt) traj.snapshots.push_back(snap);
  };
  record(sim.snapshot());
  while (!sim.finished()) {
    sim.advance();
    record(sim.snapshot());
  }
  return traj;
}

}  // namespace thermistor
