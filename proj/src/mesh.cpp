#include "thermistor/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "thermistor/exceptions.hpp"

namespace thermistor {

namespace {

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

std::array<double, 3> barycentric(const Point& a, const Point& b, const Point& c, Point p) {
  const double det = cross(b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y);
  const double la = cross(b.x - p.x, b.y - p.y, c.x - p.x, c.y - p.y) / det;
  const double lb = cross(c.x - p.x, c.y - p.y, a.x - p.x, a.y - p.y) / det;
  const double lc = cross(a.x - p.x, a.y - p.y, b.x - p.x, b.y - p.y) / det;
  return {la, lb, lc};
}

}  // namespace

Mesh::Mesh(int nx) : nx_(nx) {
  if (nx < 1) {
    throw InvalidArgument(fmt::format("mesh subdivision count must be >= 1, got {}", nx));
  }
  const int np = nx + 1;
  vertices_.reserve(static_cast<std::size_t>(np) * np + static_cast<std::size_t>(nx) * nx);
  for (int j = 0; j < np; ++j) {
    for (int i = 0; i < np; ++i) {
      vertices_.push_back({static_cast<double>(i) / nx, static_cast<double>(j) / nx});
    }
  }
  for (int j = 0; j < nx; ++j) {
    for (int i = 0; i < nx; ++i) {
      vertices_.push_back({static_cast<double>(2 * i + 1) / (2 * nx),
                           static_cast<double>(2 * j + 1) / (2 * nx)});
    }
  }

  boundary_mask_.assign(vertices_.size(), 0);
  for (int j = 0; j < np; ++j) {
    for (int i = 0; i < np; ++i) {
      if (i == 0 || j == 0 || i == nx || j == nx) {
        boundary_mask_[lattice_index(i, j)] = 1;
        boundary_vertices_.push_back(lattice_index(i, j));
      }
    }
  }

  // Per square: bottom, right, top, left.
  triangles_.reserve(4 * static_cast<std::size_t>(nx) * nx);
  for (int j = 0; j < nx; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Index v00 = lattice_index(i, j);
      const Index v10 = lattice_index(i + 1, j);
      const Index v11 = lattice_index(i + 1, j + 1);
      const Index v01 = lattice_index(i, j + 1);
      const Index c = center_index(i, j);
      triangles_.push_back({v00, v10, c});
      triangles_.push_back({v10, v11, c});
      triangles_.push_back({v11, v01, c});
      triangles_.push_back({v01, v00, c});
    }
  }
}

double Mesh::signed_area(Index t) const {
  const auto& tri = triangles_[t];
  const Point& a = vertices_[tri[0]];
  const Point& b = vertices_[tri[1]];
  const Point& c = vertices_[tri[2]];
  return 0.5 * cross(b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y);
}

PointLocation Mesh::locate(Point p) const {
  if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
    throw OutOfDomain(fmt::format("point ({}, {}) lies outside the unit square", p.x, p.y));
  }
  constexpr double kTol = 1e-13;
  const int ci = std::min(static_cast<int>(p.x * nx_), nx_ - 1);
  const int cj = std::min(static_cast<int>(p.y * nx_), nx_ - 1);

  PointLocation best;
  // Neighboring cells are scanned too so that ties on cell borders resolve to
  // the lowest triangle index regardless of which cell floor() picked.
  for (int j = std::max(cj - 1, 0); j <= std::min(cj + 1, nx_ - 1); ++j) {
    for (int i = std::max(ci - 1, 0); i <= std::min(ci + 1, nx_ - 1); ++i) {
      for (int q = 0; q < 4; ++q) {
        const Index t = 4 * (j * nx_ + i) + q;
        if (best.triangle >= 0 && t >= best.triangle) continue;
        const auto& tri = triangles_[t];
        const auto lam = barycentric(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]], p);
        if (lam[0] >= -kTol && lam[1] >= -kTol && lam[2] >= -kTol) {
          best.triangle = t;
          best.barycentric = lam;
        }
      }
    }
  }
  if (best.triangle < 0) {
    throw OutOfDomain(fmt::format("no triangle contains ({}, {})", p.x, p.y));
  }

  auto& lam = best.barycentric;
  for (int a = 0; a < 3; ++a) {
    if (lam[a] >= 1.0 - kTol) {
      lam = {0.0, 0.0, 0.0};
      lam[a] = 1.0;
      return best;
    }
  }
  double sum = 0.0;
  for (double& l : lam) {
    l = std::max(l, 0.0);
    sum += l;
  }
  for (double& l : lam) l /= sum;
  return best;
}

Mesh build_crisscross_mesh(int nx) { return Mesh(nx); }

NodalMap boundary_values(const Mesh& mesh, const std::function<double(double, double)>& g) {
  NodalMap values;
  for (Index v : mesh.boundary_vertices()) {
    const Point& p = mesh.vertex(v);
    values.emplace(v, g(p.x, p.y));
  }
  return values;
}

PointLocation locate_point(const Mesh& mesh, Point p) { return mesh.locate(p); }

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << fmt::format("{} {} {}\n", mesh.nx(), mesh.vertex_count(), mesh.triangle_count());
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    const Point& p = mesh.vertices()[v];
    out << fmt::format("v {:.17g} {:.17g} {}\n", p.x, p.y, mesh.on_boundary(static_cast<Index>(v)) ? 1 : 0);
  }
  for (const auto& t : mesh.triangles()) {
    out << fmt::format("t {} {} {}\n", t[0], t[1], t[2]);
  }
}

}  // namespace thermistor
