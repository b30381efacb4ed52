#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "thermistor/mesh.hpp"
#include "thermistor/sparse.hpp"

namespace thermistor {

/// One value per mesh vertex.
using ScalarField = std::vector<double>;
/// Two values per mesh vertex, interleaved as (u_x, u_y) at dofs (2i, 2i+1).
using VectorField = std::vector<double>;

using Vec2 = std::array<double, 2>;
using ScalarFunction = std::function<double(double x, double y)>;
using VectorFunction = std::function<Vec2(double x, double y)>;
using ConductivityLaw = std::function<double(double theta)>;

/// Symmetric 3x3 moduli acting on (eps_11, eps_22, gamma_12), engineering
/// shear gamma_12 = du1/dy + du2/dx.
struct VoigtTensor {
  std::array<std::array<double, 3>, 3> m{};

  static VoigtTensor from_rows(std::array<double, 3> r0, std::array<double, 3> r1,
                               std::array<double, 3> r2) {
    return VoigtTensor{{r0, r1, r2}};
  }
  static VoigtTensor zero() { return {}; }
  static VoigtTensor identity() { return from_rows({1, 0, 0}, {0, 1, 0}, {0, 0, 1}); }

  bool is_symmetric(double tol = 0.0) const;
  VoigtTensor scaled(double alpha) const;
  double operator()(int i, int j) const { return m[i][j]; }
  bool operator==(const VoigtTensor&) const = default;
};

/// Thermal expansion stress matrix M (2x2, expected symmetric).
struct CouplingMatrixSpec {
  std::array<std::array<double, 2>, 2> m{};

  static CouplingMatrixSpec identity() { return {{{{1.0, 0.0}, {0.0, 1.0}}}}; }
  static CouplingMatrixSpec diagonal(double value) { return {{{{value, 0.0}, {0.0, value}}}}; }
  bool is_symmetric(double tol = 0.0) const;
  bool operator==(const CouplingMatrixSpec&) const = default;
};

/// Area and the constant gradients of the three barycentric basis functions.
struct P1Geometry {
  double area;
  std::array<double, 3> dx;
  std::array<double, 3> dy;
};

P1Geometry p1_geometry(const Mesh& mesh, Index triangle);

/// Edge-midpoint quadrature points of a triangle. Point q is the midpoint of
/// the edge opposite local vertex q, so basis function a is 1/2 there for
/// a != q and 0 for a == q. Each weight is area/3.
std::array<Point, 3> midpoint_rule_points(const Mesh& mesh, Index triangle);

SparseMatrix mass_matrix(const Mesh& mesh);
/// Mass matrix on the interleaved vector dof layout.
SparseMatrix vector_mass_matrix(const Mesh& mesh);

/// Per-element weighted Laplacian. Throws CoercivityViolation for a
/// nonpositive weight.
SparseMatrix stiffness_matrix(const Mesh& mesh, std::span<const double> coeff);
SparseMatrix stiffness_matrix(const Mesh& mesh);

SparseMatrix elasticity_matrix(const Mesh& mesh, const VoigtTensor& tensor);

struct LameParameters {
  double mu;
  double lambda;
};

VoigtTensor lame_voigt(double mu, double lambda);
LameParameters lame_from_young_poisson(double young, double poisson);

/// C[i, j] = integral of (M : eps(psi_j)) phi_i. Rows are scalar dofs,
/// columns vector dofs. C^T gives the thermal stress load <M theta, eps(v)>.
SparseMatrix coupling_matrix(const Mesh& mesh, const CouplingMatrixSpec& coupling);

/// Per-element mean of sigma(theta) over the midpoint rule.
std::vector<double> conductivity_weights(const Mesh& mesh, std::span<const double> theta,
                                         const ConductivityLaw& sigma);

/// <sigma(theta) |grad phi|^2, chi_i> with sigma sampled at the midpoints
/// from the P1 interpolant of theta.
std::vector<double> joule_load(const Mesh& mesh, std::span<const double> theta,
                               std::span<const double> phi, const ConductivityLaw& sigma);

std::vector<double> load_vector(const Mesh& mesh, const VectorFunction& f);
std::vector<double> scalar_load_vector(const Mesh& mesh, const ScalarFunction& g);

ScalarField interpolate_nodal(const Mesh& mesh, const ScalarFunction& g);
VectorField interpolate_nodal(const Mesh& mesh, const VectorFunction& g);

}  // namespace thermistor
