#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "thermistor/assembly.hpp"
#include "thermistor/physics.hpp"
#include "thermistor/sparse.hpp"

namespace thermistor {

enum class Scheme { semi_implicit, implicit_euler };

std::string to_string(Scheme scheme);
/// Accepts "semi" / "semi-implicit" and "ie" / "implicit-euler".
Scheme parse_scheme(const std::string& text);

struct StepperConfig {
  Scheme scheme = Scheme::semi_implicit;
  /// Relative L2 increment at which Picard iteration stops.
  double picard_tol = 1e-8;
  int picard_max_iter = 50;
  SolverOptions solver;
};

/// Uniform grid t_n = n T / N with t_N = T exactly.
struct TimeGrid {
  double final_time = 1.0;
  int steps = 1;

  double step() const { return final_time / steps; }
  double time(int n) const {
    return n == steps ? final_time : final_time * n / steps;
  }
};

/// Fields at step n. u_prev is U^{n-1}; at n = 0 it is the fictitious
/// point u0 - k v0 so that (u - u_prev)/k reproduces v0.
struct State {
  int n = 0;
  double t = 0.0;
  ScalarField theta;
  ScalarField phi;
  VectorField u;
  VectorField u_prev;
};

VectorField velocity(const State& state, double k);

/// Everything that stays fixed over a run: the mesh, the constant matrices
/// and the factored temperature and displacement systems.
class Operators {
 public:
  Operators(std::shared_ptr<const Mesh> mesh, ProblemSpec spec, TimeGrid grid,
            SolverOptions solver = {});

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const ProblemSpec& spec() const { return spec_; }
  const TimeGrid& grid() const { return grid_; }
  double k() const { return grid_.step(); }
  const SolverOptions& solver_options() const { return solver_; }

  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const SparseMatrix& vector_mass() const { return vector_mass_; }
  const SparseMatrix& viscosity() const { return viscosity_; }
  const SparseMatrix& elasticity() const { return elasticity_; }
  const SparseMatrix& coupling() const { return coupling_; }

  /// Backward Euler heat solve at time t with lagged inputs:
  /// (rho c M/k + kappa K) theta = rho c M theta_prev / k
  ///   + joule(theta_lag, phi_lag) - theta_ref C velocity_lag + source(t).
  ScalarField solve_temperature(const ScalarField& theta_prev, const ScalarField& theta_lag,
                                const ScalarField& phi_lag, const VectorField& velocity_lag,
                                double t) const;

  /// div(sigma(theta) grad phi) = 0 with phi = phi_b(t) on the boundary.
  ScalarField solve_potential(const ScalarField& theta, double t) const;

  /// (rho M/k^2 + K_A/k + K_B) u = rho M (2 u1 - u2)/k^2 + K_A u1 / k
  ///   + C^T theta + f(t), where u1 = U^{n-1}, u2 = U^{n-2}.
  VectorField solve_displacement(const ScalarField& theta, const VectorField& u1,
                                 const VectorField& u2, double t) const;

  /// Initial state with the potential solved from sigma(theta0) and phi_b(0).
  State initial_state() const;

  /// L2 norm of a nodal scalar (vector when the length is 2 * vertices).
  double l2(const std::vector<double>& field) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  ProblemSpec spec_;
  ConductivityLaw sigma_;
  TimeGrid grid_;
  SolverOptions solver_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  SparseMatrix vector_mass_;
  SparseMatrix viscosity_;
  SparseMatrix elasticity_;
  SparseMatrix coupling_;
  SpdSolver temperature_solver_;
  SpdSolver displacement_solver_;
};

State semi_implicit_step(const State& state, const Operators& ops);

struct ImplicitStepResult {
  State state;
  int iterations = 0;
  double increment = 0.0;
};

/// Fully implicit Euler step solved by Picard iteration on (theta, phi, u).
/// Throws PicardDivergence when the cap is reached.
ImplicitStepResult implicit_euler_step(const State& state, const Operators& ops,
                                       double picard_tol = 1e-8, int picard_max_iter = 50);

struct Snapshot {
  int n = 0;
  double t = 0.0;
  ScalarField theta;
  ScalarField phi;
  VectorField u;
  /// Backward difference (U^n - U^{n-1}) / k.
  VectorField velocity;
};

Snapshot make_snapshot(const State& state, double k);

/// Step-by-step driver; the study runner advances several of these in
/// lockstep.
class Simulation {
 public:
  Simulation(const ProblemSpec& spec, int nx, int nt, const StepperConfig& config);

  void advance();
  bool finished() const { return state_.n >= ops_.grid().steps; }

  const State& state() const { return state_; }
  const Operators& operators() const { return ops_; }
  const Mesh& mesh() const { return ops_.mesh(); }
  const StepperConfig& config() const { return config_; }
  int nx() const { return ops_.mesh().nx(); }
  int nt() const { return ops_.grid().steps; }
  double k() const { return ops_.k(); }
  Snapshot snapshot() const { return make_snapshot(state_, ops_.k()); }

  int last_picard_iterations() const { return last_iterations_; }
  int max_picard_iterations() const { return max_iterations_; }

 private:
  StepperConfig config_;
  Operators ops_;
  State state_;
  int last_iterations_ = 0;
  int max_iterations_ = 0;
};

struct Trajectory {
  std::shared_ptr<const Mesh> mesh;
  int nx = 0;
  int nt = 0;
  double k = 0.0;
  double final_time = 0.0;
  int stride = 1;
  Scheme scheme = Scheme::semi_implicit;
  std::vector<Snapshot> snapshots;
};

struct RunOptions {
  /// Snapshot stride; 0 picks 1 for nt <= 4096 and otherwise the smallest
  /// stride that fits memory_budget_bytes. The final step is always kept.
  int stride = 0;
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
  /// Called for every step, including n = 0, independent of the stride.
  std::function<void(const Snapshot&)> observer;
};

Trajectory run_simulation(const ProblemSpec& spec, int nx, int nt, const StepperConfig& config,
                          const RunOptions& options = {});

}  // namespace thermistor
