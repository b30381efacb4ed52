#include "thermistor/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <fmt/format.h>

#include "thermistor/exceptions.hpp"

namespace thermistor {

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
                           std::vector<Index> column_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      column_indices_(std::move(column_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != static_cast<std::size_t>(rows_) + 1 ||
      column_indices_.size() != values_.size() ||
      static_cast<std::size_t>(row_offsets_.back()) != values_.size()) {
    throw InvalidArgument("inconsistent CSR arrays");
  }
}

double SparseMatrix::coeff(Index i, Index j) const {
  const auto first = column_indices_.begin() + row_offsets_[i];
  const auto last = column_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - column_indices_.begin())];
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(cols_)) {
    throw InvalidArgument(fmt::format("matvec size mismatch: {} vs {}", x.size(), cols_));
  }
  std::vector<double> y(rows_, 0.0);
  for (Index i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      s += values_[p] * x[column_indices_[p]];
    }
    y[i] = s;
  }
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(rows_)) {
    throw InvalidArgument(fmt::format("transposed matvec size mismatch: {} vs {}", x.size(), rows_));
  }
  std::vector<double> y(cols_, 0.0);
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      y[column_indices_[p]] += values_[p] * x[i];
    }
  }
  return y;
}

SparseMatrix SparseMatrix::scaled(double alpha) const {
  SparseMatrix out = *this;
  for (double& v : out.values_) v *= alpha;
  return out;
}

SparseMatrix from_triplets(Index rows, Index cols, std::span<const Triplet> triplets) {
  if (rows < 0 || cols < 0) throw InvalidArgument("negative matrix dimension");
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw InvalidArgument(
          fmt::format("triplet ({}, {}) out of range for {}x{} matrix", t.row, t.col, rows, cols));
    }
  }
  // Stable sort keeps the summation order of duplicates fixed by value, so
  // permuted input yields bitwise identical sums.
  std::vector<Triplet> sorted(triplets.begin(), triplets.end());
  std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.value < b.value;
  });

  std::vector<Index> offsets(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<Index> columns;
  std::vector<double> values;
  columns.reserve(sorted.size());
  values.reserve(sorted.size());
  for (std::size_t p = 0; p < sorted.size();) {
    const Index r = sorted[p].row;
    const Index c = sorted[p].col;
    double sum = 0.0;
    for (; p < sorted.size() && sorted[p].row == r && sorted[p].col == c; ++p) {
      sum += sorted[p].value;
    }
    columns.push_back(c);
    values.push_back(sum);
    ++offsets[r + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(rows, cols, std::move(offsets), std::move(columns), std::move(values));
}

SparseMatrix from_triplets(Index n, std::span<const Triplet> triplets) {
  return from_triplets(n, n, triplets);
}

SparseMatrix add(const SparseMatrix& a, double alpha, const SparseMatrix& b, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("matrix sum with mismatched dimensions");
  }
  std::vector<Index> offsets(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<Index> columns;
  std::vector<double> values;
  columns.reserve(std::max(a.nnz(), b.nnz()));
  values.reserve(std::max(a.nnz(), b.nnz()));
  const auto& ao = a.row_offsets();
  const auto& bo = b.row_offsets();
  const auto& ac = a.column_indices();
  const auto& bc = b.column_indices();
  for (Index i = 0; i < a.rows(); ++i) {
    Index p = ao[i];
    Index q = bo[i];
    while (p < ao[i + 1] || q < bo[i + 1]) {
      const Index cp = p < ao[i + 1] ? ac[p] : a.cols();
      const Index cq = q < bo[i + 1] ? bc[q] : b.cols();
      if (cp == cq) {
        columns.push_back(cp);
        values.push_back(alpha * a.values()[p++] + beta * b.values()[q++]);
      } else if (cp < cq) {
        columns.push_back(cp);
        values.push_back(alpha * a.values()[p++]);
      } else {
        columns.push_back(cq);
        values.push_back(beta * b.values()[q++]);
      }
    }
    offsets[i + 1] = static_cast<Index>(columns.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(columns), std::move(values));
}

double symmetry_defect(const SparseMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  double scale = 0.0;
  for (double v : a.values()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double defect = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      const Index j = a.column_indices()[p];
      defect = std::max(defect, std::abs(a.values()[p] - a.coeff(j, i)));
    }
  }
  return defect / scale;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

// Gives apply_dirichlet write access to the CSR values.
class DirichletEditor {
 public:
  static std::vector<double>& values(SparseMatrix& m) { return m.values_; }
};

LinearSystem apply_dirichlet(LinearSystem system, const NodalMap& values) {
  SparseMatrix& a = system.matrix;
  const Index n = a.rows();
  if (a.cols() != n || system.rhs.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("apply_dirichlet needs a square system with matching rhs");
  }
  std::vector<unsigned char> fixed(n, 0);
  for (const auto& [dof, value] : values) {
    if (dof < 0 || dof >= n) {
      throw InvalidArgument(fmt::format("constrained dof {} out of range [0, {})", dof, n));
    }
    fixed[dof] = 1;
    system.constrained[dof] = value;
  }
  // Previously constrained dofs keep their prescribed values.
  for (const auto& [dof, value] : system.constrained) fixed[dof] = 1;

  auto& vals = DirichletEditor::values(a);
  const auto& offsets = a.row_offsets();
  const auto& cols = a.column_indices();
  for (Index i = 0; i < n; ++i) {
    for (Index p = offsets[i]; p < offsets[i + 1]; ++p) {
      const Index j = cols[p];
      if (fixed[i] || !fixed[j]) continue;
      system.rhs[i] -= vals[p] * system.constrained.at(j);
      vals[p] = 0.0;
    }
  }
  for (const auto& [dof, value] : system.constrained) {
    for (Index p = offsets[dof]; p < offsets[dof + 1]; ++p) {
      vals[p] = cols[p] == dof ? 1.0 : 0.0;
    }
    system.rhs[dof] = value;
  }
  return system;
}

struct SpdSolver::Factor {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double, Eigen::ColMajor, Index>, Eigen::Lower> llt;
  std::vector<double> inverse_diagonal;
};

SpdSolver::SpdSolver(const SparseMatrix& matrix, SolverOptions options)
    : matrix_(matrix), options_(options), factor_(std::make_unique<Factor>()) {
  if (matrix.rows() != matrix.cols()) throw InvalidArgument("SPD solve needs a square matrix");
  if (!(options.rel_tol > 0.0 && options.rel_tol < 1.0)) {
    throw InvalidArgument(fmt::format("solver tolerance must lie in (0, 1), got {}", options.rel_tol));
  }
  const Index n = matrix.rows();
  factor_->inverse_diagonal.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double d = matrix.coeff(i, i);
    if (!(d > 0.0)) {
      throw NotSpd(fmt::format("nonpositive diagonal entry {} at row {}", d, i));
    }
    factor_->inverse_diagonal[i] = 1.0 / d;
  }
  if (options.backend == SolverBackend::cholesky && n > 0) {
    // A symmetric CSR matrix read as CSC is the same matrix.
    Eigen::Map<const Eigen::SparseMatrix<double, Eigen::ColMajor, Index>> view(
        n, n, static_cast<Index>(matrix.nnz()), matrix.row_offsets().data(),
        matrix.column_indices().data(), matrix.values().data());
    factor_->llt.compute(view);
    if (factor_->llt.info() != Eigen::Success) {
      throw NotSpd("Cholesky factorization failed: matrix is not positive definite");
    }
  }
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

namespace {

std::vector<double> residual(const SparseMatrix& a, std::span<const double> x,
                             std::span<const double> b) {
  auto r = a.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

}  // namespace

std::vector<double> SpdSolver::solve(std::span<const double> rhs) const {
  const Index n = matrix_.rows();
  if (rhs.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument(fmt::format("rhs length {} does not match dimension {}", rhs.size(), n));
  }
  const double target = options_.rel_tol * norm2(rhs);
  std::vector<double> x(n, 0.0);
  if (n == 0) return x;

  if (options_.backend == SolverBackend::cholesky) {
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
    Eigen::Map<Eigen::VectorXd> xv(x.data(), n);
    xv = factor_->llt.solve(b);
    auto r = residual(matrix_, x, rhs);
    double rnorm = norm2(r);
    // A few steps of iterative refinement absorb round-off on stiff systems.
    for (int pass = 0; pass < 3 && rnorm > target; ++pass) {
      Eigen::Map<const Eigen::VectorXd> rv(r.data(), n);
      xv += factor_->llt.solve(rv);
      r = residual(matrix_, x, rhs);
      rnorm = norm2(r);
    }
    if (rnorm > target) {
      throw SolverFailure(
          fmt::format("Cholesky solve residual {:.3e} exceeds target {:.3e}", rnorm, target), rnorm);
    }
    return x;
  }

  // Jacobi-preconditioned conjugate gradients.
  const auto& dinv = factor_->inverse_diagonal;
  std::vector<double> r(rhs.begin(), rhs.end());
  double rnorm = norm2(r);
  if (rnorm <= target) return x;
  std::vector<double> z(n);
  for (Index i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
  std::vector<double> p = z;
  double rz = dot(r, z);
  const long max_iter = 10L * n;
  for (long it = 0; it < max_iter; ++it) {
    const auto ap = matrix_.multiply(p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) {
      throw NotSpd(fmt::format("conjugate gradients met nonpositive curvature {}", pap));
    }
    const double alpha = rz / pap;
    for (Index i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    rnorm = norm2(r);
    if (rnorm <= target) {
      // The recurrence residual can drift; confirm with the true one.
      const double true_norm = norm2(residual(matrix_, x, rhs));
      if (true_norm <= target) return x;
      r = residual(matrix_, x, rhs);
    }
    for (Index i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (Index i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolverFailure(fmt::format("conjugate gradients did not converge in {} iterations "
                                  "(residual {:.3e}, target {:.3e})",
                                  max_iter, rnorm, target),
                      rnorm);
}

std::vector<double> solve_spd(const SparseMatrix& matrix, std::span<const double> rhs,
                              double rel_tol, SolverBackend backend) {
  return SpdSolver(matrix, {rel_tol, backend}).solve(rhs);
}

}  // namespace thermistor
