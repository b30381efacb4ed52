#include "thermistor/physics.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "thermistor/exceptions.hpp"

namespace thermistor {

using std::numbers::pi;

Conductivity Conductivity::constant(double value) {
  Conductivity c;
  c.kind_ = ConductivityKind::constant;
  c.params_ = {value};
  c.lower_ = value;
  c.upper_ = value;
  c.max_slope_ = 0.0;
  return c;
}

Conductivity Conductivity::arctan(double offset, double scale, double slope, double shift) {
  Conductivity c;
  c.kind_ = ConductivityKind::arctan;
  c.params_ = {offset, scale, slope, shift};
  c.lower_ = offset - std::abs(scale) * pi / 2;
  c.upper_ = offset + std::abs(scale) * pi / 2;
  c.max_slope_ = std::abs(scale * slope);
  return c;
}

Conductivity Conductivity::mems(double ambient) {
  constexpr double prefactor = 38e6 / 27.0;
  constexpr double base = 3000.0;
  constexpr double amplitude = 550.0;
  constexpr double center = 250.0;
  constexpr double width = 250.0;
  Conductivity c;
  c.kind_ = ConductivityKind::mems;
  c.params_ = {prefactor, base, amplitude, center, width, ambient};
  c.lower_ = prefactor / (base + amplitude * pi);
  c.upper_ = prefactor / base;
  c.max_slope_ = prefactor * amplitude / width / (base * base);
  return c;
}

double Conductivity::operator()(double theta) const {
  switch (kind_) {
    case ConductivityKind::constant:
      return params_[0];
    case ConductivityKind::arctan:
      return params_[0] - params_[1] * std::atan(params_[2] * theta - params_[3]);
    case ConductivityKind::mems: {
      const double absolute = params_[5] + theta;
      return params_[0] /
             (params_[1] + params_[2] * (pi / 2 + std::atan((absolute - params_[3]) / params_[4])));
    }
  }
  return 0.0;
}

std::string Conductivity::describe() const {
  switch (kind_) {
    case ConductivityKind::constant:
      return fmt::format("constant({})", params_[0]);
    case ConductivityKind::arctan:
      return fmt::format("{} - {}*atan({}*theta - {})", params_[0], params_[1], params_[2], params_[3]);
    case ConductivityKind::mems:
      return fmt::format("mems(ambient={})", params_[5]);
  }
  return "?";
}

Conductivity sigma_problem1() { return Conductivity::arctan(2.5, 1.0, 5.0, 10.0); }

VoigtTensor problem1_voigt() { return VoigtTensor::from_rows({1, 1, 0}, {1, 1, 0}, {0, 0, 1}); }

ProblemSpec make_problem1() {
  ProblemSpec spec;
  spec.name = "p1";
  spec.material.viscosity = problem1_voigt();
  spec.material.elasticity = problem1_voigt();
  spec.material.thermal_expansion = CouplingMatrixSpec::identity();
  spec.material.conductivity = sigma_problem1();
  spec.boundary_potential = [](double, double x, double) { return 5.0 * (1.0 - x); };
  spec.final_time = 1.0;
  spec.notes = {{"phi_b", "5*(1-x)"}, {"theta0", "0"}, {"u0", "0"}, {"v0", "0"}, {"f", "0"}};
  return spec;
}

ProblemSpec make_problem2(double gamma) {
  if (!(gamma >= 0.0)) throw InvalidArgument(fmt::format("gamma must be >= 0, got {}", gamma));
  ProblemSpec spec = make_problem1();
  spec.name = "p2";
  spec.material.viscosity = problem1_voigt().scaled(gamma);
  spec.notes.emplace_back("gamma", fmt::format("{}", gamma));
  return spec;
}

ManufacturedProblem make_manufactured(ManufacturedKind kind) {
  ManufacturedProblem out;
  ProblemSpec& spec = out.spec;
  spec.material.conductivity = Conductivity::constant(1.0);
  spec.material.thermal_expansion = {};
  spec.final_time = 1.0;

  if (kind == ManufacturedKind::heat_only) {
    spec.name = "mms-heat";
    spec.material.viscosity = VoigtTensor::identity();
    spec.material.elasticity = VoigtTensor::identity();
    spec.initial_temperature = [](double x, double y) {
      return std::sin(pi * x) * std::sin(pi * y);
    };
    spec.heat_source = [](double t, double x, double y) {
      return (2.0 * pi * pi - 1.0) * std::exp(-t) * std::sin(pi * x) * std::sin(pi * y);
    };
    out.exact_temperature = [](double t, double x, double y) {
      return std::exp(-t) * std::sin(pi * x) * std::sin(pi * y);
    };
    out.exact_displacement = [](double, double, double) { return Vec2{0.0, 0.0}; };
    spec.notes = {{"theta_exact", "exp(-t)*sin(pi x)*sin(pi y)"}};
    return out;
  }

  spec.name = "mms-elasticity";
  spec.material.viscosity = lame_voigt(1.0, 1.0);
  spec.material.elasticity = lame_voigt(1.0, 1.0);
  spec.initial_displacement = [](double x, double y) {
    return Vec2{std::sin(pi * x) * std::sin(pi * y), 0.0};
  };
  // -div(2 mu eps + lambda tr(eps) I) with mu = lambda = 1.
  spec.body_force = [](double, double x, double y) {
    return Vec2{4.0 * pi * pi * std::sin(pi * x) * std::sin(pi * y),
                -2.0 * pi * pi * std::cos(pi * x) * std::cos(pi * y)};
  };
  out.exact_temperature = [](double, double, double) { return 0.0; };
  out.exact_displacement = [](double, double x, double y) {
    return Vec2{std::sin(pi * x) * std::sin(pi * y), 0.0};
  };
  spec.notes = {{"u_exact", "(sin(pi x)*sin(pi y), 0)"}};
  return out;
}

std::pair<double, std::array<double, 3>> min_eigenpair(const VoigtTensor& tensor) {
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a(i, j) = tensor.m[i][j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(a);
  const Eigen::Vector3d v = eig.eigenvectors().col(0);
  return {eig.eigenvalues()(0), {v(0), v(1), v(2)}};
}

ValidationReport validate_assumptions(const ProblemSpec& spec, const ValidationOptions& options) {
  const MaterialModel& mat = spec.material;
  ValidationReport report;

  const auto check_tensor = [&](const VoigtTensor& t, const char* name, double& min_eig) {
    if (!t.is_symmetric(1e-12 * (1.0 + std::abs(t.m[0][0]) + std::abs(t.m[1][1])))) {
      throw AssumptionViolation(fmt::format("{} tensor is not symmetric", name));
    }
    const auto [lambda, vec] = min_eigenpair(t);
    min_eig = lambda;
    double scale = 0.0;
    for (const auto& row : t.m) {
      for (double v : row) scale = std::max(scale, std::abs(v));
    }
    if (lambda <= 1e-12 * scale) {
      report.warnings.push_back(fmt::format(
          "{} tensor is only positive semidefinite: smallest eigenvalue {:.3g} with eigenvector "
          "({:.4f}, {:.4f}, {:.4f}); strict coercivity does not hold",
          name, lambda, vec[0], vec[1], vec[2]));
    }
  };
  check_tensor(mat.viscosity, "viscosity", report.viscosity_min_eigenvalue);
  check_tensor(mat.elasticity, "elasticity", report.elasticity_min_eigenvalue);
  if (!mat.thermal_expansion.is_symmetric(1e-12)) {
    throw AssumptionViolation("thermal expansion matrix is not symmetric");
  }
  if (!(mat.density > 0.0 && mat.specific_heat > 0.0 && mat.thermal_conductivity > 0.0)) {
    throw AssumptionViolation("density, specific heat and thermal conductivity must be positive");
  }

  const Conductivity& sigma = mat.conductivity;
  if (!(sigma.lower_bound() > 0.0)) {
    throw AssumptionViolation(fmt::format(
        "conductivity lower bound {} is not positive: need 0 < sigma_min <= sigma(theta) <= sigma_max",
        sigma.lower_bound()));
  }
  report.sigma_sample_min = INFINITY;
  report.sigma_sample_max = -INFINITY;
  const int n = std::max(options.samples, 2);
  for (int i = 0; i < n; ++i) {
    const double theta =
        options.theta_min + (options.theta_max - options.theta_min) * i / static_cast<double>(n - 1);
    const double s = sigma(theta);
    report.sigma_sample_min = std::min(report.sigma_sample_min, s);
    report.sigma_sample_max = std::max(report.sigma_sample_max, s);
    if (!(s >= sigma.lower_bound() && s <= sigma.upper_bound())) {
      throw AssumptionViolation(fmt::format(
          "sigma({}) = {} leaves the declared bounds [{}, {}]", theta, s, sigma.lower_bound(),
          sigma.upper_bound()));
    }
  }

  // Initial temperature must match the homogeneous boundary condition.
  const Mesh probe(16);
  for (Index v : probe.boundary_vertices()) {
    const Point& p = probe.vertex(v);
    if (std::abs(spec.initial_temperature(p.x, p.y)) > 1e-12) {
      report.warnings.push_back(fmt::format(
          "initial temperature is {} at boundary point ({}, {}); expected 0",
          spec.initial_temperature(p.x, p.y), p.x, p.y));
      break;
    }
  }
  return report;
}

}  // namespace thermistor
