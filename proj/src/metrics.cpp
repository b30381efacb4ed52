#include "thermistor/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "thermistor/exceptions.hpp"

namespace thermistor {

namespace {

void check_length(std::span<const double> field, std::size_t expected, const char* what) {
  if (field.size() != expected) {
    throw InvalidArgument(fmt::format("{}: field has {} entries, mesh needs {}", what, field.size(), expected));
  }
}

void check_nested(const Mesh& coarse, const Mesh& fine) {
  if (fine.nx() % coarse.nx() != 0) {
    throw InvalidArgument(fmt::format("mesh nx={} is not nested in nx={}", coarse.nx(), fine.nx()));
  }
}

// Degree-5 rule on the reference triangle (barycentric points, weights summing to 1).
struct QuadPoint {
  double l0, l1, l2, w;
};

const std::array<QuadPoint, 7>& degree5_rule() {
  static const std::array<QuadPoint, 7> rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0;
    const double b1 = 1.0 - 2.0 * a1;
    const double a2 = (6.0 + s15) / 21.0;
    const double b2 = 1.0 - 2.0 * a2;
    const double w1 = (155.0 - s15) / 1200.0;
    const double w2 = (155.0 + s15) / 1200.0;
    return std::array<QuadPoint, 7>{{{1.0 / 3, 1.0 / 3, 1.0 / 3, 9.0 / 40},
                                     {a1, a1, b1, w1},
                                     {a1, b1, a1, w1},
                                     {b1, a1, a1, w1},
                                     {a2, a2, b2, w2},
                                     {a2, b2, a2, w2},
                                     {b2, a2, a2, w2}}};
  }();
  return rule;
}

}  // namespace

NormEvaluator::NormEvaluator(const Mesh& mesh)
    : vertices_(mesh.vertex_count()),
      mass_(mass_matrix(mesh)),
      stiffness_(stiffness_matrix(mesh)),
      vector_mass_(vector_mass_matrix(mesh)),
      // <eps(u), eps(v)>_Q in Voigt form: the shear entry carries 1/2 because
      // gamma_12^2 / 2 = eps_12^2 + eps_21^2.
      strain_(elasticity_matrix(mesh, VoigtTensor::from_rows({1, 0, 0}, {0, 1, 0}, {0, 0, 0.5}))) {}

double NormEvaluator::quadratic(const SparseMatrix& m, std::span<const double> x) {
  return std::sqrt(std::max(dot(x, m.multiply(x)), 0.0));
}

double NormEvaluator::l2(std::span<const double> field) const {
  check_length(field, vertices_, "l2 norm");
  return quadratic(mass_, field);
}

double NormEvaluator::h1_seminorm(std::span<const double> field) const {
  check_length(field, vertices_, "h1 seminorm");
  return quadratic(stiffness_, field);
}

double NormEvaluator::vector_l2(std::span<const double> vfield) const {
  check_length(vfield, 2 * vertices_, "vector l2 norm");
  return quadratic(vector_mass_, vfield);
}

double NormEvaluator::strain(std::span<const double> vfield) const {
  check_length(vfield, 2 * vertices_, "strain norm");
  return quadratic(strain_, vfield);
}

double l2_norm(const Mesh& mesh, std::span<const double> field) { return NormEvaluator(mesh).l2(field); }

double h1_seminorm(const Mesh& mesh, std::span<const double> field) {
  return NormEvaluator(mesh).h1_seminorm(field);
}

double strain_norm(const Mesh& mesh, std::span<const double> vfield) {
  return NormEvaluator(mesh).strain(vfield);
}

Transfer::Transfer(const Mesh& coarse, const Mesh& fine) : coarse_vertices_(coarse.vertex_count()) {
  check_nested(coarse, fine);
  const int ratio = fine.nx() / coarse.nx();
  nodes_.resize(fine.vertex_count());
  weights_.resize(fine.vertex_count());
  for (std::size_t v = 0; v < fine.vertex_count(); ++v) {
    // Coincident lattice vertices: copy exactly.
    if (v < fine.lattice_vertex_count()) {
      const int i = static_cast<int>(v) % (fine.nx() + 1);
      const int j = static_cast<int>(v) / (fine.nx() + 1);
      if (i % ratio == 0 && j % ratio == 0) {
        nodes_[v] = {coarse.lattice_index(i / ratio, j / ratio), 0, 0};
        weights_[v] = {1.0, 0.0, 0.0};
        continue;
      }
    }
    const PointLocation loc = coarse.locate(fine.vertex(static_cast<Index>(v)));
    nodes_[v] = coarse.triangle(loc.triangle);
    weights_[v] = loc.barycentric;
  }
}

ScalarField Transfer::scalar(std::span<const double> coarse_field) const {
  check_length(coarse_field, coarse_vertices_, "transfer");
  ScalarField out(nodes_.size());
  for (std::size_t v = 0; v < out.size(); ++v) {
    const auto& n = nodes_[v];
    const auto& w = weights_[v];
    out[v] = w[1] == 0.0 && w[2] == 0.0 && w[0] == 1.0
                 ? coarse_field[n[0]]
                 : w[0] * coarse_field[n[0]] + w[1] * coarse_field[n[1]] + w[2] * coarse_field[n[2]];
  }
  return out;
}

VectorField Transfer::vector(std::span<const double> coarse_field) const {
  check_length(coarse_field, 2 * coarse_vertices_, "vector transfer");
  VectorField out(2 * nodes_.size());
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    const auto& n = nodes_[v];
    const auto& w = weights_[v];
    for (int c = 0; c < 2; ++c) {
      double s = 0.0;
      for (int a = 0; a < 3; ++a) {
        if (w[a] != 0.0) s += w[a] * coarse_field[2 * n[a] + c];
      }
      out[2 * v + c] = s;
    }
  }
  return out;
}

ScalarField transfer_to_fine(const Mesh& coarse, std::span<const double> field, const Mesh& fine) {
  return Transfer(coarse, fine).scalar(field);
}

VectorField transfer_vector_to_fine(const Mesh& coarse, std::span<const double> field, const Mesh& fine) {
  return Transfer(coarse, fine).vector(field);
}

void FieldErrors::absorb(const FieldErrors& o) {
  theta_l2 = std::max(theta_l2, o.theta_l2);
  theta_h1 = std::max(theta_h1, o.theta_h1);
  phi_l2 = std::max(phi_l2, o.phi_l2);
  phi_h1 = std::max(phi_h1, o.phi_h1);
  u_l2 = std::max(u_l2, o.u_l2);
  dtu_l2 = std::max(dtu_l2, o.dtu_l2);
  dtu_v = std::max(dtu_v, o.dtu_v);
}

ErrorAccumulator::ErrorAccumulator(std::shared_ptr<const Mesh> coarse,
                                   std::shared_ptr<const Mesh> reference)
    : coarse_(std::move(coarse)),
      reference_(std::move(reference)),
      transfer_(*coarse_, *reference_),
      norms_(std::make_shared<const NormEvaluator>(*reference_)) {
  report_.coarse_nx = coarse_->nx();
  report_.reference_nx = reference_->nx();
}

FieldErrors ErrorAccumulator::add(const Snapshot& coarse, const Snapshot& reference) {
  if (std::abs(coarse.t - reference.t) > 1e-12 * std::max(1.0, std::abs(reference.t))) {
    throw InvalidArgument(fmt::format("snapshot times differ: {} vs {}", coarse.t, reference.t));
  }
  const auto diff = [](std::vector<double> a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
  };
  const auto dtheta = diff(transfer_.scalar(coarse.theta), reference.theta);
  const auto dphi = diff(transfer_.scalar(coarse.phi), reference.phi);
  const auto du = diff(transfer_.vector(coarse.u), reference.u);
  const auto dv = diff(transfer_.vector(coarse.velocity), reference.velocity);

  FieldErrors e;
  e.theta_l2 = norms_->l2(dtheta);
  e.theta_h1 = norms_->h1_seminorm(dtheta);
  e.phi_l2 = norms_->l2(dphi);
  e.phi_h1 = norms_->h1_seminorm(dphi);
  e.u_l2 = norms_->vector_l2(du);
  e.dtu_l2 = norms_->vector_l2(dv);
  e.dtu_v = norms_->strain(dv);

  report_.max_errors.absorb(e);
  report_.theta_h1_full = std::max(report_.theta_h1_full, std::hypot(e.theta_l2, e.theta_h1));
  report_.phi_h1_full = std::max(report_.phi_h1_full, std::hypot(e.phi_l2, e.phi_h1));
  report_.times.push_back(coarse.t);
  return e;
}

ErrorReport max_error_over_time(const Trajectory& traj, const Trajectory& ref_traj) {
  if (!traj.mesh || !ref_traj.mesh) throw InvalidArgument("trajectory without mesh");
  if (ref_traj.nt % traj.nt != 0) {
    throw InvalidArgument(fmt::format("reference nt={} is not a multiple of nt={}", ref_traj.nt, traj.nt));
  }
  check_nested(*traj.mesh, *ref_traj.mesh);
  const int ratio = ref_traj.nt / traj.nt;

  const auto find = [](const Trajectory& t, int n) -> const Snapshot& {
    const auto it = std::lower_bound(t.snapshots.begin(), t.snapshots.end(), n,
                                     [](const Snapshot& s, int value) { return s.n < value; });
    if (it == t.snapshots.end() || it->n != n) {
      throw InvalidArgument(fmt::format("trajectory has no snapshot at step {}", n));
    }
    return *it;
  };

  ErrorAccumulator acc(traj.mesh, ref_traj.mesh);
  for (const Snapshot& snap : traj.snapshots) {
    if (snap.n == 0) continue;
    acc.add(snap, find(ref_traj, snap.n * ratio));
  }
  ErrorReport report = acc.report();
  report.scheme = to_string(traj.scheme);
  report.reference_scheme = to_string(ref_traj.scheme);
  return report;
}

std::vector<double> observed_order(std::span<const double> errors, std::span<const double> hs) {
  if (errors.size() != hs.size() || errors.size() < 2) {
    throw InvalidArgument("observed_order needs two equally long lists with at least two entries");
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(hs[i] > 0.0)) {
      throw InvalidArgument(fmt::format("observed_order needs positive entries (e={}, h={})", errors[i], hs[i]));
    }
  }
  std::vector<double> slopes;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    slopes.push_back(std::log(errors[i] / errors[i + 1]) / std::log(hs[i] / hs[i + 1]));
  }
  return slopes;
}

double l2_error_against(const Mesh& mesh, std::span<const double> field, const ScalarFunction& exact) {
  check_length(field, mesh.vertex_count(), "l2 error");
  double sum = 0.0;
  for (Index t = 0; t < static_cast<Index>(mesh.triangle_count()); ++t) {
    const auto& tri = mesh.triangle(t);
    const Point& a = mesh.vertex(tri[0]);
    const Point& b = mesh.vertex(tri[1]);
    const Point& c = mesh.vertex(tri[2]);
    const double area = mesh.signed_area(t);
    for (const QuadPoint& q : degree5_rule()) {
      const double x = q.l0 * a.x + q.l1 * b.x + q.l2 * c.x;
      const double y = q.l0 * a.y + q.l1 * b.y + q.l2 * c.y;
      const double uh = q.l0 * field[tri[0]] + q.l1 * field[tri[1]] + q.l2 * field[tri[2]];
      const double d = uh - exact(x, y);
      sum += area * q.w * d * d;
    }
  }
  return std::sqrt(sum);
}

double vector_l2_error_against(const Mesh& mesh, std::span<const double> field, const VectorFunction& exact) {
  check_length(field, 2 * mesh.vertex_count(), "vector l2 error");
  std::vector<double> ux(mesh.vertex_count());
  std::vector<double> uy(mesh.vertex_count());
  for (std::size_t v = 0; v < ux.size(); ++v) {
    ux[v] = field[2 * v];
    uy[v] = field[2 * v + 1];
  }
  const double ex = l2_error_against(mesh, ux, [&](double x, double y) { return exact(x, y)[0]; });
  const double ey = l2_error_against(mesh, uy, [&](double x, double y) { return exact(x, y)[1]; });
  return std::hypot(ex, ey);
}

}  // namespace thermistor
