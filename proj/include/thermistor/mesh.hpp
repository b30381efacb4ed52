#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <vector>

namespace thermistor {

using Index = std::int32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct PointLocation {
  Index triangle = -1;
  std::array<double, 3> barycentric{};
};

/// Crisscross triangulation of the unit square: each of the nx*nx squares is
/// split into four counterclockwise triangles through its center.
///
/// Vertex order is lattice first ((nx+1)^2 nodes, row-major with y outer),
/// then square centers (row-major). Lattice coordinates are computed as
/// double(i)/nx, so the lattice of mesh(nx) is bitwise a subset of the
/// lattice of mesh(m*nx).
class Mesh {
 public:
  explicit Mesh(int nx);

  int nx() const { return nx_; }
  double h() const { return 1.0 / nx_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  std::size_t lattice_vertex_count() const {
    return static_cast<std::size_t>(nx_ + 1) * (nx_ + 1);
  }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(Index v) const { return vertices_[v]; }
  const std::vector<std::array<Index, 3>>& triangles() const { return triangles_; }
  const std::array<Index, 3>& triangle(Index t) const { return triangles_[t]; }

  bool on_boundary(Index v) const { return boundary_mask_[v] != 0; }
  const std::vector<unsigned char>& boundary_mask() const { return boundary_mask_; }
  /// Boundary vertex indices in increasing order.
  const std::vector<Index>& boundary_vertices() const { return boundary_vertices_; }

  Index lattice_index(int i, int j) const { return j * (nx_ + 1) + i; }
  Index center_index(int i, int j) const {
    return static_cast<Index>(lattice_vertex_count()) + j * nx_ + i;
  }

  double signed_area(Index t) const;

  /// Owner triangle and barycentric coordinates of p. Points on shared
  /// edges or vertices go to the lowest-indexed containing triangle.
  PointLocation locate(Point p) const;

 private:
  int nx_;
  std::vector<Point> vertices_;
  std::vector<std::array<Index, 3>> triangles_;
  std::vector<unsigned char> boundary_mask_;
  std::vector<Index> boundary_vertices_;
};

Mesh build_crisscross_mesh(int nx);

using NodalMap = std::map<Index, double>;

/// g sampled at the boundary vertices.
NodalMap boundary_values(const Mesh& mesh, const std::function<double(double, double)>& g);

PointLocation locate_point(const Mesh& mesh, Point p);

/// Debug dump: `nx nv nt`, then `v x y b` lines, then `t i j k` lines.
void write_mesh(std::ostream& out, const Mesh& mesh);

}  // namespace thermistor
