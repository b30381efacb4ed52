#pragma once

#include <memory>
#include <span>
#include <vector>

#include "thermistor/mesh.hpp"

namespace thermistor {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse rows. Column indices are strictly increasing per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
               std::vector<Index> column_indices, std::vector<double> values);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<Index>& row_offsets() const { return row_offsets_; }
  const std::vector<Index>& column_indices() const { return column_indices_; }
  const std::vector<double>& values() const { return values_; }

  /// Stored value at (i, j), zero if not in the pattern.
  double coeff(Index i, Index j) const;

  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> multiply_transpose(std::span<const double> x) const;

  SparseMatrix scaled(double alpha) const;

 private:
  friend class DirichletEditor;
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> column_indices_;
  std::vector<double> values_;
};

/// Sums duplicates; the result does not depend on triplet order.
SparseMatrix from_triplets(Index rows, Index cols, std::span<const Triplet> triplets);
SparseMatrix from_triplets(Index n, std::span<const Triplet> triplets);

/// alpha*a + beta*b over the union pattern.
SparseMatrix add(const SparseMatrix& a, double alpha, const SparseMatrix& b, double beta);

/// max |a_ij - a_ji| / max |a_ij|.
double symmetry_defect(const SparseMatrix& a);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

struct LinearSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  NodalMap constrained;
};

/// Symmetric elimination of the given dofs: free rhs entries are lifted by
/// the constrained columns, row and column i are cleared, A_ii = 1 and
/// rhs_i = value_i.
LinearSystem apply_dirichlet(LinearSystem system, const NodalMap& values);

enum class SolverBackend { cholesky, pcg };

struct SolverOptions {
  double rel_tol = 1e-10;
  SolverBackend backend = SolverBackend::cholesky;
};

/// Reusable SPD solver. The Cholesky backend factors once in the
/// constructor; the PCG backend keeps the matrix and its Jacobi scaling.
/// Every solve is checked against ||Ax - b|| <= rel_tol ||b||.
class SpdSolver {
 public:
  explicit SpdSolver(const SparseMatrix& matrix, SolverOptions options = {});
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  std::vector<double> solve(std::span<const double> rhs) const;
  const SparseMatrix& matrix() const { return matrix_; }

 private:
  struct Factor;
  SparseMatrix matrix_;
  SolverOptions options_;
  std::unique_ptr<Factor> factor_;
};

std::vector<double> solve_spd(const SparseMatrix& matrix, std::span<const double> rhs,
                              double rel_tol = 1e-10,
                              SolverBackend backend = SolverBackend::cholesky);

}  // namespace thermistor
