#pragma once

#include <functional>
#include <string>
#include <vector>

#include "thermistor/assembly.hpp"

namespace thermistor {

enum class ConductivityKind { constant, arctan, mems };

/// Temperature-dependent electrical conductivity with declared bounds
/// sigma_min <= sigma <= sigma_max and |sigma'| <= max_slope.
///
///   constant: sigma = value
///   arctan:   sigma = offset - scale * atan(slope * theta - shift)
///   mems:     sigma = prefactor / (base + amplitude * (pi/2 + atan((ambient + theta - center) / width)))
class Conductivity {
 public:
  static Conductivity constant(double value);
  static Conductivity arctan(double offset, double scale, double slope, double shift);
  /// Silicon-like law in S/m over the temperature deviation from `ambient`.
  static Conductivity mems(double ambient = 293.15);

  double operator()(double theta) const;

  ConductivityKind kind() const { return kind_; }
  const std::vector<double>& parameters() const { return params_; }
  double lower_bound() const { return lower_; }
  double upper_bound() const { return upper_; }
  double max_slope() const { return max_slope_; }
  std::string describe() const;

  ConductivityLaw law() const {
    return [self = *this](double theta) { return self(theta); };
  }

  bool operator==(const Conductivity&) const = default;

 private:
  ConductivityKind kind_ = ConductivityKind::constant;
  std::vector<double> params_;
  double lower_ = 1.0;
  double upper_ = 1.0;
  double max_slope_ = 0.0;
};

/// sigma(theta) = 2.5 - atan(5 theta - 10).
Conductivity sigma_problem1();

struct MaterialModel {
  VoigtTensor viscosity;
  VoigtTensor elasticity;
  CouplingMatrixSpec thermal_expansion;
  Conductivity conductivity = Conductivity::constant(1.0);
  double density = 1.0;
  double specific_heat = 1.0;
  double thermal_conductivity = 1.0;
  /// Scale of the M : eps(du/dt) term in the heat equation (ambient
  /// temperature in dimensional models, 1 otherwise).
  double coupling_temperature = 1.0;
};

using TimeScalarFunction = std::function<double(double t, double x, double y)>;
using TimeVectorFunction = std::function<Vec2(double t, double x, double y)>;

/// One experiment: material, initial data, boundary potential, forcing.
/// Temperature and displacement vanish on the whole boundary; the potential
/// equals boundary_potential there. All callables must be pure.
struct ProblemSpec {
  std::string name;
  MaterialModel material;
  ScalarFunction initial_temperature = [](double, double) { return 0.0; };
  VectorFunction initial_displacement = [](double, double) { return Vec2{0.0, 0.0}; };
  VectorFunction initial_velocity = [](double, double) { return Vec2{0.0, 0.0}; };
  TimeScalarFunction boundary_potential = [](double, double, double) { return 0.0; };
  TimeVectorFunction body_force = [](double, double, double) { return Vec2{0.0, 0.0}; };
  /// Volumetric heat source; zero for the physical problems.
  TimeScalarFunction heat_source = [](double, double, double) { return 0.0; };
  double final_time = 1.0;
  /// Parameter echo for manifests (e.g. "phi_b = 5(1-x)").
  std::vector<std::pair<std::string, std::string>> notes;
};

/// [[1,1,0],[1,1,0],[0,0,1]] in Voigt form.
VoigtTensor problem1_voigt();

ProblemSpec make_problem1();
/// Problem 1 with the viscosity tensor scaled by gamma >= 0.
ProblemSpec make_problem2(double gamma);

enum class ManufacturedKind { heat_only, elasticity_only };

struct ManufacturedProblem {
  ProblemSpec spec;
  TimeScalarFunction exact_temperature;
  TimeVectorFunction exact_displacement;
};

/// heat_only: theta = exp(-t) sin(pi x) sin(pi y) with the matching source,
/// no Joule heating and no coupling.
/// elasticity_only: static u = (sin(pi x) sin(pi y), 0) with the matching
/// body force and B = A = Lame(1, 1).
ManufacturedProblem make_manufactured(ManufacturedKind kind);

struct ValidationOptions {
  double theta_min = -1e6;
  double theta_max = 1e6;
  int samples = 20001;
};

struct ValidationReport {
  double viscosity_min_eigenvalue = 0.0;
  double elasticity_min_eigenvalue = 0.0;
  double sigma_sample_min = 0.0;
  double sigma_sample_max = 0.0;
  std::vector<std::string> warnings;
};

/// Checks tensor symmetry (hard error), reports Voigt eigenvalues (a zero
/// or negative one is a warning), and samples sigma against its bounds
/// (hard error on violation). Throws AssumptionViolation.
ValidationReport validate_assumptions(const ProblemSpec& spec, const ValidationOptions& options = {});

/// Smallest eigenvalue of a symmetric Voigt tensor and a matching eigenvector.
std::pair<double, std::array<double, 3>> min_eigenpair(const VoigtTensor& tensor);

}  // namespace thermistor
