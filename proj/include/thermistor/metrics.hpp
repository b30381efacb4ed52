#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "thermistor/assembly.hpp"
#include "thermistor/physics.hpp"
#include "thermistor/stepper.hpp"

namespace thermistor {

double l2_norm(const Mesh& mesh, std::span<const double> field);
double h1_seminorm(const Mesh& mesh, std::span<const double> field);
/// sqrt(<eps(u), eps(u)>_Q) for an interleaved vector field.
double strain_norm(const Mesh& mesh, std::span<const double> vfield);

/// Norm matrices of one mesh, assembled once and reused.
class NormEvaluator {
 public:
  explicit NormEvaluator(const Mesh& mesh);

  double l2(std::span<const double> field) const;
  double h1_seminorm(std::span<const double> field) const;
  double vector_l2(std::span<const double> vfield) const;
  double strain(std::span<const double> vfield) const;

 private:
  static double quadratic(const SparseMatrix& m, std::span<const double> x);
  std::size_t vertices_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  SparseMatrix vector_mass_;
  SparseMatrix strain_;
};

/// Exact P1 prolongation from a coarse mesh to a nested fine mesh. Fine
/// vertices that coincide with coarse vertices copy the coarse value.
class Transfer {
 public:
  Transfer(const Mesh& coarse, const Mesh& fine);

  ScalarField scalar(std::span<const double> coarse_field) const;
  VectorField vector(std::span<const double> coarse_field) const;

 private:
  std::size_t coarse_vertices_;
  std::vector<std::array<Index, 3>> nodes_;
  std::vector<std::array<double, 3>> weights_;
};

/// Throws InvalidArgument unless fine.nx() is a multiple of coarse.nx().
ScalarField transfer_to_fine(const Mesh& coarse, std::span<const double> field, const Mesh& fine);
VectorField transfer_vector_to_fine(const Mesh& coarse, std::span<const double> field, const Mesh& fine);

struct FieldErrors {
  double theta_l2 = 0.0;
  double theta_h1 = 0.0;
  double phi_l2 = 0.0;
  double phi_h1 = 0.0;
  double u_l2 = 0.0;
  double dtu_l2 = 0.0;
  double dtu_v = 0.0;

  /// max(this, other) entrywise.
  void absorb(const FieldErrors& other);
};

struct ErrorReport {
  /// Max over shared times n >= 1; H1 entries are seminorms.
  FieldErrors max_errors;
  /// Full H1 norms sqrt(L2^2 + seminorm^2) of the maximizing differences.
  double theta_h1_full = 0.0;
  double phi_h1_full = 0.0;
  std::vector<double> times;
  int coarse_nx = 0;
  int reference_nx = 0;
  std::string scheme;
  std::string reference_scheme;
};

/// Streams snapshot pairs at shared times, evaluating differences on the
/// reference mesh.
class ErrorAccumulator {
 public:
  ErrorAccumulator(std::shared_ptr<const Mesh> coarse, std::shared_ptr<const Mesh> reference);

  /// Errors of one pair; snapshot times must match.
  FieldErrors add(const Snapshot& coarse, const Snapshot& reference);
  const ErrorReport& report() const { return report_; }
  ErrorReport& report() { return report_; }

 private:
  std::shared_ptr<const Mesh> coarse_;
  std::shared_ptr<const Mesh> reference_;
  Transfer transfer_;
  std::shared_ptr<const NormEvaluator> norms_;
  ErrorReport report_;
};

/// Max-in-time errors of traj against ref_traj at the coarse grid's times
/// t_n, n >= 1. Requires nested meshes, traj.nt dividing ref_traj.nt, and
/// snapshots of both at every compared time.
ErrorReport max_error_over_time(const Trajectory& traj, const Trajectory& ref_traj);

/// slope_i = log(e_i / e_{i+1}) / log(h_i / h_{i+1}).
std::vector<double> observed_order(std::span<const double> errors, std::span<const double> hs);

/// L2 distance between a P1 field and a smooth function, by a degree-5
/// seven-point rule per triangle.
double l2_error_against(const Mesh& mesh, std::span<const double> field, const ScalarFunction& exact);
double vector_l2_error_against(const Mesh& mesh, std::span<const double> field, const VectorFunction& exact);

}  // namespace thermistor
