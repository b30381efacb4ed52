#include "thermistor/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "thermistor/exceptions.hpp"

namespace thermistor {

namespace pt = boost::property_tree;

namespace {

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used == 0 || used != text.size()) {
    throw InvalidArgument(fmt::format("'{}' is not a number: '{}'", key, text));
  }
  return value;
}

double number(const pt::ptree& section, const std::string& key) {
  const auto text = section.get_optional<std::string>(key);
  if (!text) throw InvalidArgument(fmt::format("missing key '{}'", key));
  return parse_number(key, *text);
}

double number(const pt::ptree& section, const std::string& key, double fallback) {
  const auto text = section.get_optional<std::string>(key);
  return text ? parse_number(key, *text) : fallback;
}

VoigtTensor read_tensor(const pt::ptree& section, const VoigtTensor& fallback, const char* name) {
  if (auto voigt = section.get_optional<std::string>("voigt")) {
    std::istringstream in(*voigt);
    std::array<double, 6> c{};
    for (double& v : c) {
      if (!(in >> v)) {
        throw InvalidArgument(fmt::format("[{}] voigt needs six numbers: c11 c12 c13 c22 c23 c33", name));
      }
    }
    return VoigtTensor::from_rows({c[0], c[1], c[2]}, {c[1], c[3], c[4]}, {c[2], c[4], c[5]});
  }
  if (section.count("young") || section.count("poisson")) {
    const auto lame = lame_from_young_poisson(number(section, "young"), number(section, "poisson"));
    return lame_voigt(lame.mu, lame.lambda);
  }
  if (section.count("mu") || section.count("lambda")) {
    return lame_voigt(number(section, "mu"), number(section, "lambda", 0.0));
  }
  return fallback;
}

}  // namespace

ProblemSpec parse_problem_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidArgument(fmt::format("config parse error: {}", e.what()));
  }

  ProblemSpec spec = make_problem1();
  spec.name = "custom";
  spec.notes.clear();
  const pt::ptree empty;
  const auto section = [&](const char* key) -> const pt::ptree& {
    const auto child = tree.get_child_optional(key);
    return child ? *child : empty;
  };

  try {
    const auto& problem = section("problem");
    spec.name = problem.get<std::string>("name", spec.name);
    spec.final_time = number(problem, "final_time", spec.final_time);
    if (!(spec.final_time > 0.0)) throw InvalidArgument("final_time must be positive");

    MaterialModel& mat = spec.material;
    const auto& cond = section("conductivity");
    const std::string law = cond.get<std::string>("law", "arctan");
    if (law == "constant") {
      mat.conductivity = Conductivity::constant(number(cond, "value", 1.0));
    } else if (law == "arctan") {
      mat.conductivity = Conductivity::arctan(number(cond, "offset", 2.5), number(cond, "scale", 1.0),
                                              number(cond, "slope", 5.0), number(cond, "shift", 10.0));
    } else if (law == "mems") {
      mat.conductivity = Conductivity::mems(number(cond, "ambient", 293.15));
    } else {
      throw InvalidArgument(fmt::format("unknown conductivity law '{}'", law));
    }

    mat.elasticity = read_tensor(section("elasticity"), mat.elasticity, "elasticity");
    mat.viscosity = read_tensor(section("viscosity"), mat.viscosity, "viscosity");
    const double gamma = number(problem, "gamma", 1.0);
    if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
    mat.viscosity = mat.viscosity.scaled(gamma);

    const auto& coupling = section("coupling");
    if (coupling.count("m")) {
      mat.thermal_expansion = CouplingMatrixSpec::diagonal(number(coupling, "m"));
    } else {
      auto& m2 = mat.thermal_expansion.m;
      m2[0][0] = number(coupling, "m11", m2[0][0]);
      m2[0][1] = number(coupling, "m12", m2[0][1]);
      m2[1][0] = number(coupling, "m21", m2[0][1]);
      m2[1][1] = number(coupling, "m22", m2[1][1]);
    }

    const auto& coeffs = section("coefficients");
    mat.density = number(coeffs, "density", mat.density);
    mat.specific_heat = number(coeffs, "specific_heat", mat.specific_heat);
    mat.thermal_conductivity = number(coeffs, "thermal_conductivity", mat.thermal_conductivity);
    mat.coupling_temperature = number(coeffs, "coupling_temperature", mat.coupling_temperature);

    const auto& boundary = section("boundary");
    const double c0 = number(boundary, "phi_const", 5.0);
    const double cx = number(boundary, "phi_x", -5.0);
    const double cy = number(boundary, "phi_y", 0.0);
    spec.boundary_potential = [c0, cx, cy](double, double x, double y) { return c0 + cx * x + cy * y; };

    const auto& forcing = section("forcing");
    const double fx = number(forcing, "fx", 0.0);
    const double fy = number(forcing, "fy", 0.0);
    spec.body_force = [fx, fy](double, double, double) { return Vec2{fx, fy}; };

    spec.notes = {{"phi_b", fmt::format("{} + {}*x + {}*y", c0, cx, cy)},
                  {"f", fmt::format("({}, {})", fx, fy)},
                  {"gamma", fmt::format("{}", gamma)}};
  } catch (const pt::ptree_error& e) {
    throw InvalidArgument(fmt::format("config value error: {}", e.what()));
  }
  return spec;
}

ProblemSpec load_problem_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open config file {}", path.string()));
  return parse_problem_config(in);
}

}  // namespace thermistor
