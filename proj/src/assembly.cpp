#include "thermistor/assembly.hpp"

#include <cmath>

#include <fmt/format.h>

#include "thermistor/exceptions.hpp"

namespace thermistor {

namespace {

constexpr std::array<std::array<double, 3>, 3> kMidpointBasis{{
    {0.0, 0.5, 0.5},
    {0.5, 0.0, 0.5},
    {0.5, 0.5, 0.0},
}};

Index count(const Mesh& mesh) { return static_cast<Index>(mesh.vertex_count()); }

Index triangles(const Mesh& mesh) { return static_cast<Index>(mesh.triangle_count()); }

// Rows of the strain-displacement operator for local node a:
// (eps_11, eps_22, gamma_12) contributions of its x- and y-dof.
std::array<std::array<double, 3>, 2> strain_columns(const P1Geometry& g, int a) {
  return {{{g.dx[a], 0.0, g.dy[a]}, {0.0, g.dy[a], g.dx[a]}}};
}

}  // namespace

bool VoigtTensor::is_symmetric(double tol) const {
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(m[i][j] - m[j][i]) > tol) return false;
    }
  }
  return true;
}

VoigtTensor VoigtTensor::scaled(double alpha) const {
  VoigtTensor out = *this;
  for (auto& row : out.m) {
    for (double& v : row) v *= alpha;
  }
  return out;
}

bool CouplingMatrixSpec::is_symmetric(double tol) const {
  return std::abs(m[0][1] - m[1][0]) <= tol;
}

P1Geometry p1_geometry(const Mesh& mesh, Index triangle) {
  const auto& tri = mesh.triangle(triangle);
  const Point& a = mesh.vertex(tri[0]);
  const Point& b = mesh.vertex(tri[1]);
  const Point& c = mesh.vertex(tri[2]);
  const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  P1Geometry g{};
  g.area = 0.5 * det;
  g.dx = {(b.y - c.y) / det, (c.y - a.y) / det, (a.y - b.y) / det};
  g.dy = {(c.x - b.x) / det, (a.x - c.x) / det, (b.x - a.x) / det};
  return g;
}

std::array<Point, 3> midpoint_rule_points(const Mesh& mesh, Index triangle) {
  const auto& tri = mesh.triangle(triangle);
  const Point& a = mesh.vertex(tri[0]);
  const Point& b = mesh.vertex(tri[1]);
  const Point& c = mesh.vertex(tri[2]);
  return {Point{0.5 * (b.x + c.x), 0.5 * (b.y + c.y)},
          Point{0.5 * (a.x + c.x), 0.5 * (a.y + c.y)},
          Point{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}};
}

SparseMatrix mass_matrix(const Mesh& mesh) {
  std::vector<Triplet> triplets;
  triplets.reserve(9 * mesh.triangle_count());
  for (Index t = 0; t < triangles(mesh); ++t) {
    const auto& tri = mesh.triangle(t);
    const double w = p1_geometry(mesh, t).area / 3.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int q = 0; q < 3; ++q) s += kMidpointBasis[q][a] * kMidpointBasis[q][b];
        triplets.push_back({tri[a], tri[b], w * s});
      }
    }
  }
  return from_triplets(count(mesh), triplets);
}

SparseMatrix vector_mass_matrix(const Mesh& mesh) {
  const SparseMatrix scalar = mass_matrix(mesh);
  std::vector<Triplet> triplets;
  triplets.reserve(2 * scalar.nnz());
  for (Index i = 0; i < scalar.rows(); ++i) {
    for (Index p = scalar.row_offsets()[i]; p < scalar.row_offsets()[i + 1]; ++p) {
      const Index j = scalar.column_indices()[p];
      triplets.push_back({2 * i, 2 * j, scalar.values()[p]});
      triplets.push_back({2 * i + 1, 2 * j + 1, scalar.values()[p]});
    }
  }
  return from_triplets(2 * count(mesh), triplets);
}

SparseMatrix stiffness_matrix(const Mesh& mesh, std::span<const double> coeff) {
  if (coeff.size() != mesh.triangle_count()) {
    throw InvalidArgument(fmt::format("stiffness needs {} element weights, got {}",
                                      mesh.triangle_count(), coeff.size()));
  }
  std::vector<Triplet> triplets;
  triplets.reserve(9 * mesh.triangle_count());
  for (Index t = 0; t < triangles(mesh); ++t) {
    if (!(coeff[t] > 0.0)) {
      throw CoercivityViolation(fmt::format(
          "element {} has diffusion weight {}; the form needs a strictly positive lower bound",
          t, coeff[t]));
    }
    const auto& tri = mesh.triangle(t);
    const P1Geometry g = p1_geometry(mesh, t);
    const double w = coeff[t] * g.area;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        triplets.push_back({tri[a], tri[b], w * (g.dx[a] * g.dx[b] + g.dy[a] * g.dy[b])});
      }
    }
  }
  return from_triplets(count(mesh), triplets);
}

SparseMatrix stiffness_matrix(const Mesh& mesh) {
  const std::vector<double> ones(mesh.triangle_count(), 1.0);
  return stiffness_matrix(mesh, ones);
}

SparseMatrix elasticity_matrix(const Mesh& mesh, const VoigtTensor& tensor) {
  if (!tensor.is_symmetric()) throw InvalidArgument("Voigt tensor must be symmetric");
  std::vector<Triplet> triplets;
  triplets.reserve(36 * mesh.triangle_count());
  for (Index t = 0; t < triangles(mesh); ++t) {
    const auto& tri = mesh.triangle(t);
    const P1Geometry g = p1_geometry(mesh, t);
    for (int a = 0; a < 3; ++a) {
      const auto ba = strain_columns(g, a);
      for (int b = 0; b < 3; ++b) {
        const auto bb = strain_columns(g, b);
        for (int da = 0; da < 2; ++da) {
          for (int db = 0; db < 2; ++db) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i) {
              for (int j = 0; j < 3; ++j) s += ba[da][i] * tensor.m[i][j] * bb[db][j];
            }
            triplets.push_back({2 * tri[a] + da, 2 * tri[b] + db, g.area * s});
          }
        }
      }
    }
  }
  return from_triplets(2 * count(mesh), triplets);
}

VoigtTensor lame_voigt(double mu, double lambda) {
  if (!(mu > 0.0)) {
    throw CoercivityViolation(fmt::format("shear modulus must be positive, got {}", mu));
  }
  return VoigtTensor::from_rows({2 * mu + lambda, lambda, 0.0}, {lambda, 2 * mu + lambda, 0.0},
                                {0.0, 0.0, mu});
}

LameParameters lame_from_young_poisson(double young, double poisson) {
  if (!(young > 0.0) || !(poisson > -1.0 && poisson < 0.5)) {
    throw InvalidArgument(
        fmt::format("need E > 0 and -1 < nu < 1/2, got E = {}, nu = {}", young, poisson));
  }
  return {young / (2.0 * (1.0 + poisson)),
          young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson))};
}

SparseMatrix coupling_matrix(const Mesh& mesh, const CouplingMatrixSpec& coupling) {
  const auto& m = coupling.m;
  std::vector<Triplet> triplets;
  triplets.reserve(18 * mesh.triangle_count());
  for (Index t = 0; t < triangles(mesh); ++t) {
    const auto& tri = mesh.triangle(t);
    const P1Geometry g = p1_geometry(mesh, t);
    const double w = g.area / 3.0;
    for (int b = 0; b < 3; ++b) {
      // M : eps(psi) for the x- and y-dof of node b; constant on the element.
      const double mx = m[0][0] * g.dx[b] + 0.5 * (m[0][1] + m[1][0]) * g.dy[b];
      const double my = m[1][1] * g.dy[b] + 0.5 * (m[0][1] + m[1][0]) * g.dx[b];
      for (int a = 0; a < 3; ++a) {
        double phi_a = 0.0;
        for (int q = 0; q < 3; ++q) phi_a += kMidpointBasis[q][a];
        triplets.push_back({tri[a], 2 * tri[b], w * phi_a * mx});
        triplets.push_back({tri[a], 2 * tri[b] + 1, w * phi_a * my});
      }
    }
  }
  return from_triplets(count(mesh), 2 * count(mesh), triplets);
}

std::vector<double> conductivity_weights(const Mesh& mesh, std::span<const double> theta,
                                         const ConductivityLaw& sigma) {
  if (theta.size() != mesh.vertex_count()) {
    throw InvalidArgument("temperature field length does not match the mesh");
  }
  std::vector<double> weights(mesh.triangle_count());
  for (Index t = 0; t < triangles(mesh); ++t) {
    const auto& tri = mesh.triangle(t);
    double s = 0.0;
    for (int q = 0; q < 3; ++q) {
      double theta_q = 0.0;
      for (int a = 0; a < 3; ++a) theta_q += kMidpointBasis[q][a] * theta[tri[a]];
      s += sigma(theta_q);
    }
    weights[t] = s / 3.0;
  }
  return weights;
}

std::vector<double> joule_load(const Mesh& mesh, std::span<const double> theta,
                               std::span<const double> phi, const ConductivityLaw& sigma) {
  if (theta.size() != mesh.vertex_count() || phi.size() != mesh.vertex_count()) {
    throw InvalidArgument("joule load fields do not match the mesh");
  }
  std::vector<double> load(mesh.vertex_count(), 0.0);
  for (Index t = 0; t < triangles(mesh); ++t) {
    const auto& tri = mesh.triangle(t);
    const P1Geometry g = p1_geometry(mesh, t);
    double gx = 0.0;
    double gy = 0.0;
    for (int a = 0; a < 3; ++a) {
      gx += phi[tri[a]] * g.dx[a];
      gy += phi[tri[a]] * g.dy[a];
    }
    const double grad2 = gx * gx + gy * gy;
    if (grad2 == 0.0) continue;
    const double w = g.area / 3.0;
    for (int q = 0; q < 3; ++q) {
      double theta_q = 0.0;
      for (int a = 0; a < 3; ++a) theta_q += kMidpointBasis[q][a] * theta[tri[a]];
      const double value = w * sigma(theta_q) * grad2;
      for (int a = 0; a < 3; ++a) load[tri[a]] += value * kMidpointBasis[q][a];
    }
  }
  return load;
}

std::vector<double> load_vector(const Mesh& mesh, const VectorFunction& f) {
  std::vector<double> load(2 * mesh.vertex_count(), 0.0);
  for (Index t = 0; t < triangles(mesh); ++t) {
    const auto& tri = mesh.triangle(t);
    const double w = p1_geometry(mesh, t).area / 3.0;
    const auto points = midpoint_rule_points(mesh, t);
    for (int q = 0; q < 3; ++q) {
      const Vec2 fq = f(points[q].x, points[q].y);
      for (int a = 0; a < 3; ++a) {
        load[2 * tri[a]] += w * fq[0] * kMidpointBasis[q][a];
        load[2 * tri[a] + 1] += w * fq[1] * kMidpointBasis[q][a];
      }
    }
  }
  return load;
}

std::vector<double> scalar_load_vector(const Mesh& mesh, const ScalarFunction& g) {
  std::vector<double> load(mesh.vertex_count(), 0.0);
  for (Index t = 0; t < triangles(mesh); ++t) {
    const auto& tri = mesh.triangle(t);
    const double w = p1_geometry(mesh, t).area / 3.0;
    const auto points = midpoint_rule_points(mesh, t);
    for (int q = 0; q < 3; ++q) {
      const double gq = g(points[q].x, points[q].y);
      for (int a = 0; a < 3; ++a) load[tri[a]] += w * gq * kMidpointBasis[q][a];
    }
  }
  return load;
}

ScalarField interpolate_nodal(const Mesh& mesh, const ScalarFunction& g) {
  ScalarField out(mesh.vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v) {
    out[v] = g(mesh.vertices()[v].x, mesh.vertices()[v].y);
  }
  return out;
}

VectorField interpolate_nodal(const Mesh& mesh, const VectorFunction& g) {
  VectorField out(2 * mesh.vertex_count());
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 value = g(mesh.vertices()[v].x, mesh.vertices()[v].y);
    out[2 * v] = value[0];
    out[2 * v + 1] = value[1];
  }
  return out;
}

}  // namespace thermistor
