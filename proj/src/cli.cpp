#include "thermistor/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "thermistor/config.hpp"
#include "thermistor/exceptions.hpp"
#include "thermistor/physics.hpp"
#include "thermistor/stepper.hpp"
#include "thermistor/study.hpp"
#include "thermistor/svg_plot.hpp"
#include "thermistor/trajectory_io.hpp"

namespace thermistor {

namespace fs = std::filesystem;

namespace {

struct ProblemArgs {
  std::string problem = "p1";
  std::string config;
  std::vector<double> gamma;
};

struct NumericsArgs {
  double picard_tol = 1e-8;
  int picard_max = 50;
  double solver_tol = 1e-10;
  std::string backend = "cholesky";
};

struct StudyArgs {
  std::vector<int> nx;
  std::string nt_rule;
  std::vector<int> nt;
  std::string scheme = "semi";
  std::string ref_scheme;
  int ref_nx = 0;
  int ref_nt = 0;
  std::string out = "study";
  bool plot = true;
  bool full = false;
  bool wall_time = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_problem_flags(CLI::App* cmd, ProblemArgs& args, bool multi_gamma) {
  cmd->add_option("--problem", args.problem, "p1 | p2 | custom | mms-heat | mms-elasticity");
  cmd->add_option("--config", args.config, "problem config file (used with --problem custom)");
  auto* g = cmd->add_option("--gamma", args.gamma, "viscosity scale for p2")->check(CLI::NonNegativeNumber);
  if (multi_gamma) {
    g->delimiter(',');
  } else {
    g->expected(1);
  }
}

void add_numerics_flags(CLI::App* cmd, NumericsArgs& args) {
  cmd->add_option("--picard-tol", args.picard_tol, "relative increment tolerance for implicit Euler")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--picard-max", args.picard_max, "Picard iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--solver-tol", args.solver_tol, "relative residual tolerance of linear solves")
      ->check(CLI::Range(1e-16, 0.5));
  cmd->add_option("--solver", args.backend, "cholesky | pcg")
      ->check(CLI::IsMember({"cholesky", "pcg"}));
}

void add_study_flags(CLI::App* cmd, StudyArgs& args) {
  cmd->add_option("--nx", args.nx, "test resolutions")->delimiter(',')->check(CLI::PositiveNumber);
  cmd->add_option("--nt-rule", args.nt_rule, "half (nx^2/2) | quarter (nx^2/4) | list")
      ->check(CLI::IsMember({"half", "quarter", "list"}));
  cmd->add_option("--nt", args.nt, "explicit step counts, one per nx")->delimiter(',')->check(CLI::PositiveNumber);
  cmd->add_option("--ref-scheme", args.ref_scheme, "reference scheme: semi | ie");
  cmd->add_option("--ref-nx", args.ref_nx, "reference resolution")->check(CLI::PositiveNumber);
  cmd->add_option("--ref-nt", args.ref_nt, "reference step count")->check(CLI::PositiveNumber);
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_flag("!--no-plot", args.plot, "skip SVG plots");
  cmd->add_flag("--full", args.full, "paper-scale resolutions (hours)");
  cmd->add_flag("--wall-time", args.wall_time, "fill the wall_s column (breaks byte reproducibility)");
}

ProblemSpec resolve_problem(const ProblemArgs& args, double gamma, std::ostream& err) {
  if (args.problem == "custom") {
    if (args.config.empty()) throw UsageError("--problem custom needs --config");
    return load_problem_config(args.config);
  }
  if (!args.config.empty()) {
    err << fmt::format("note: preset '{}' overrides values from {}\n", args.problem, args.config);
  }
  if (args.problem == "p1") return make_problem1();
  if (args.problem == "p2") return make_problem2(gamma);
  if (args.problem == "mms-heat") return make_manufactured(ManufacturedKind::heat_only).spec;
  if (args.problem == "mms-elasticity") return make_manufactured(ManufacturedKind::elasticity_only).spec;
  throw UsageError(fmt::format("unknown problem '{}'", args.problem));
}

StepperConfig make_stepper(const NumericsArgs& n, Scheme scheme) {
  StepperConfig cfg;
  cfg.scheme = scheme;
  cfg.picard_tol = n.picard_tol;
  cfg.picard_max_iter = n.picard_max;
  cfg.solver.rel_tol = n.solver_tol;
  cfg.solver.backend = n.backend == "pcg" ? SolverBackend::pcg : SolverBackend::cholesky;
  return cfg;
}

std::string voigt_text(const VoigtTensor& t) {
  return fmt::format("[[{}, {}, {}], [{}, {}, {}], [{}, {}, {}]]", t.m[0][0], t.m[0][1], t.m[0][2], t.m[1][0],
                     t.m[1][1], t.m[1][2], t.m[2][0], t.m[2][1], t.m[2][2]);
}

void write_problem_manifest(std::ostream& out, const ProblemSpec& spec) {
  const MaterialModel& m = spec.material;
  out << fmt::format("problem = {}\n", spec.name);
  out << fmt::format("final_time = {:.17g}\n", spec.final_time);
  out << fmt::format("viscosity_voigt = {}\n", voigt_text(m.viscosity));
  out << fmt::format("elasticity_voigt = {}\n", voigt_text(m.elasticity));
  out << fmt::format("thermal_expansion = [[{}, {}], [{}, {}]]\n", m.thermal_expansion.m[0][0],
                     m.thermal_expansion.m[0][1], m.thermal_expansion.m[1][0], m.thermal_expansion.m[1][1]);
  out << fmt::format("conductivity = {}\n", m.conductivity.describe());
  out << fmt::format("density = {}\nspecific_heat = {}\nthermal_conductivity = {}\ncoupling_temperature = {}\n",
                     m.density, m.specific_heat, m.thermal_conductivity, m.coupling_temperature);
  for (const auto& [key, value] : spec.notes) out << fmt::format("{} = {}\n", key, value);
}

void write_numerics_manifest(std::ostream& out, const StepperConfig& cfg) {
  out << "voigt_convention = engineering shear (eps11, eps22, gamma12)\n";
  out << "quadrature = 3-point edge-midpoint rule (degree 2)\n";
  out << "mass_matrix = consistent\n";
  out << fmt::format("solver_backend = {}\n", cfg.solver.backend == SolverBackend::pcg ? "pcg-jacobi" : "sparse-cholesky");
  out << fmt::format("solver_rel_tol = {:.3g}\n", cfg.solver.rel_tol);
  out << fmt::format("picard_tol = {:.3g}\n", cfg.picard_tol);
  out << fmt::format("picard_max_iter = {}\n", cfg.picard_max_iter);
  out << "initial_velocity = fictitious point u_prev = u0 - k v0\n";
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  return out;
}

struct StudyDefaults {
  std::vector<int> nx;
  NtRule rule;
  Scheme ref_scheme;
  int ref_nx;
  int ref_nt;
};

StudyDefaults defaults_for(const std::string& problem, bool full) {
  if (problem == "p2") {
    return full ? StudyDefaults{{4, 8, 16, 32}, NtRule::quarter_square, Scheme::semi_implicit, 64, 1024}
                : StudyDefaults{{4, 8, 16}, NtRule::quarter_square, Scheme::semi_implicit, 32, 256};
  }
  return full ? StudyDefaults{{4, 8, 16, 32, 64}, NtRule::half_square, Scheme::implicit_euler, 128, 8192}
              : StudyDefaults{{4, 8, 16}, NtRule::half_square, Scheme::implicit_euler, 32, 512};
}

StudyConfig make_study(const StudyArgs& a, const ProblemSpec& spec, const NumericsArgs& n,
                       const std::string& problem, bool require_reference) {
  if (require_reference && (a.ref_nx == 0 || a.ref_nt == 0)) {
    throw UsageError("--ref-nx and --ref-nt are required");
  }
  const StudyDefaults d = defaults_for(problem, a.full);
  StudyConfig cfg;
  cfg.spec = spec;
  cfg.nx = a.nx.empty() ? d.nx : a.nx;
  cfg.nt_rule = d.rule;
  if (a.nt_rule == "half") cfg.nt_rule = NtRule::half_square;
  if (a.nt_rule == "quarter") cfg.nt_rule = NtRule::quarter_square;
  if (a.nt_rule == "list" || !a.nt.empty()) {
    cfg.nt_rule = NtRule::explicit_list;
    cfg.explicit_nt = a.nt;
  }
  cfg.test = make_stepper(n, parse_scheme(a.scheme));
  cfg.reference = make_stepper(n, a.ref_scheme.empty() ? d.ref_scheme : parse_scheme(a.ref_scheme));
  cfg.reference_nx = a.ref_nx ? a.ref_nx : d.ref_nx;
  cfg.reference_nt = a.ref_nt ? a.ref_nt : d.ref_nt;
  try {
    validate_study(cfg);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

void write_study_manifest(const fs::path& path, const StudyConfig& cfg, const std::string& command,
                          double wall) {
  auto out = open_output(path);
  out << fmt::format("command = {}\n", command);
  write_problem_manifest(out, cfg.spec);
  std::string nx_list;
  for (int nx : cfg.nx) nx_list += fmt::format("{}{}", nx_list.empty() ? "" : ",", nx);
  std::string nt_list;
  for (int nt : test_step_counts(cfg)) nt_list += fmt::format("{}{}", nt_list.empty() ? "" : ",", nt);
  out << fmt::format("test_nx = {}\ntest_nt = {}\n", nx_list, nt_list);
  out << fmt::format("test_scheme = {}\n", to_string(cfg.test.scheme));
  out << fmt::format("reference_scheme = {}\nreference_nx = {}\nreference_nt = {}\n",
                     to_string(cfg.reference.scheme), cfg.reference_nx, cfg.reference_nt);
  out << "error_evaluation = exact P1 transfer to the reference mesh, max over shared t_n (n >= 1)\n";
  write_numerics_manifest(out, cfg.test);
  out << fmt::format("wall_time_s = {:.3f}\n", wall);
}

void write_study_outputs(const fs::path& dir, const StudyResult& result, bool plot, bool wall_time,
                         const std::string& title) {
  {
    auto out = open_output(dir / "errors.csv");
    write_errors_csv(out, result, wall_time);
  }
  {
    auto out = open_output(dir / "orders.csv");
    write_orders_csv(out, result);
  }
  {
    auto out = open_output(dir / "timings.csv");
    out << "nx,nt,wall_s,max_picard_iterations\n";
    for (const auto& row : result.rows) {
      out << fmt::format("{},{},{:.3f},{}\n", row.nx, row.nt, row.wall_s, row.max_picard_iterations);
    }
    out << fmt::format("reference,,{:.3f},{}\n", result.reference_wall_s, result.reference_max_picard_iterations);
  }
  if (!plot || result.rows.size() < 2) return;
  PlotSpec spec;
  spec.title = title;
  spec.y_label = "max-in-time error";
  const std::vector<std::pair<std::string, double FieldErrors::*>> fields{
      {"theta L2", &FieldErrors::theta_l2}, {"phi L2", &FieldErrors::phi_l2}, {"U L2", &FieldErrors::u_l2},
      {"theta H1", &FieldErrors::theta_h1}, {"phi H1", &FieldErrors::phi_h1}, {"DtU V", &FieldErrors::dtu_v}};
  for (const auto& [label, member] : fields) {
    PlotSeries s{label, {}, {}};
    for (const auto& row : result.rows) {
      if (row.errors.*member > 0.0) {
        s.x.push_back(row.h);
        s.y.push_back(row.errors.*member);
      }
    }
    if (!s.x.empty()) spec.series.push_back(std::move(s));
  }
  if (!spec.series.empty()) write_svg_plot(spec, dir / "plots" / "errors.svg");
}

int cmd_run(const ProblemArgs& p, const NumericsArgs& n, int nx, int nt, const std::string& scheme,
            const std::string& out_dir, int stride, std::ostream& out, std::ostream& err) {
  const ProblemSpec spec = resolve_problem(p, p.gamma.empty() ? 1.0 : p.gamma.front(), err);
  const StepperConfig cfg = make_stepper(n, parse_scheme(scheme));
  const auto start = std::chrono::steady_clock::now();
  RunOptions options;
  options.stride = stride;
  const Trajectory traj = run_simulation(spec, nx, nt, cfg, options);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir(out_dir);
  write_trajectory(dir / "snapshots", traj);
  auto manifest = open_output(dir / "manifest.txt");
  manifest << "command = run\n";
  write_problem_manifest(manifest, spec);
  manifest << fmt::format("scheme = {}\nnx = {}\nh = {:.17g}\nnt = {}\nk = {:.17g}\nstride = {}\nsnapshots = {}\n",
                          to_string(cfg.scheme), nx, 1.0 / nx, nt, traj.k, traj.stride, traj.snapshots.size());
  write_numerics_manifest(manifest, cfg);
  manifest << fmt::format("wall_time_s = {:.3f}\n", wall);
  out << fmt::format("run {} nx={} nt={} k={} -> {} snapshots in {}\n", to_string(cfg.scheme), nx, nt, traj.k,
                     traj.snapshots.size(), dir.string());
  return 0;
}

int cmd_converge(const ProblemArgs& p, const NumericsArgs& n, const StudyArgs& a, std::ostream& out,
                 std::ostream& err) {
  const std::vector<double> gammas = p.gamma.empty() ? std::vector<double>{1.0} : p.gamma;
  const bool sweep = gammas.size() > 1;
  const fs::path root(a.out);
  std::vector<std::pair<double, StudyResult>> sweep_results;
  // Validate every configuration before computing anything.
  std::vector<StudyConfig> configs;
  for (double gamma : gammas) {
    configs.push_back(make_study(a, resolve_problem(p, gamma, err), n, p.problem, false));
  }
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    const auto start = std::chrono::steady_clock::now();
    const StudyResult result = run_convergence_study(configs[g]);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const fs::path dir = sweep ? root / fmt::format("gamma_{}", gammas[g]) : root;
    write_study_outputs(dir, result, a.plot, a.wall_time,
                        fmt::format("{} {} vs {} reference", configs[g].spec.name, result.scheme,
                                    result.reference_scheme));
    write_study_manifest(dir / "manifest.txt", configs[g], "converge", wall);
    if (sweep) out << fmt::format("gamma = {}\n", gammas[g]);
    out << format_table(result);
    sweep_results.emplace_back(gammas[g], result);
  }
  if (sweep && a.plot) {
    PlotSpec spec;
    spec.title = "U L2 error across viscosity scales";
    spec.y_label = "max-in-time U error";
    for (const auto& [gamma, result] : sweep_results) {
      PlotSeries s{fmt::format("gamma={}", gamma), {}, {}};
      for (const auto& row : result.rows) {
        if (row.errors.u_l2 > 0.0) {
          s.x.push_back(row.h);
          s.y.push_back(row.errors.u_l2);
        }
      }
      if (!s.x.empty()) spec.series.push_back(std::move(s));
    }
    if (!spec.series.empty()) write_svg_plot(spec, root / "plots" / "gamma_sweep.svg");
  }
  return 0;
}

int cmd_compare(const ProblemArgs& p, const NumericsArgs& n, const StudyArgs& a,
                const std::vector<std::string>& schemes, std::ostream& out, std::ostream& err) {
  if (schemes.size() != 2) throw UsageError("--schemes needs exactly two entries");
  const ProblemSpec spec = resolve_problem(p, p.gamma.empty() ? 1.0 : p.gamma.front(), err);
  const StudyConfig cfg = make_study(a, spec, n, p.problem, true);
  const std::vector<Scheme> list{parse_scheme(schemes[0]), parse_scheme(schemes[1])};
  const auto start = std::chrono::steady_clock::now();
  const auto results = run_convergence_studies(cfg, list);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const fs::path root(a.out);
  for (std::size_t s = 0; s < 2; ++s) {
    const fs::path dir = root / fmt::format("{}_{}", s, results[s].scheme);
    write_study_outputs(dir, results[s], a.plot, a.wall_time,
                        fmt::format("{} {} vs {} reference", spec.name, results[s].scheme,
                                    results[s].reference_scheme));
    out << format_table(results[s]);
  }
  {
    auto csv = open_output(root / "compare.csv");
    write_compare_csv(csv, results[0], results[1]);
  }
  write_study_manifest(root / "manifest.txt", cfg, fmt::format("compare {} {}", schemes[0], schemes[1]), wall);
  out << fmt::format("wrote {}\n", (root / "compare.csv").string());
  return 0;
}

int cmd_validate(const ProblemArgs& p, std::ostream& out, std::ostream& err) {
  const ProblemSpec spec = resolve_problem(p, p.gamma.empty() ? 1.0 : p.gamma.front(), err);
  const ValidationReport report = validate_assumptions(spec);
  out << fmt::format("problem = {}\n", spec.name);
  out << fmt::format("viscosity_min_eigenvalue = {:.6g}\n", report.viscosity_min_eigenvalue);
  out << fmt::format("elasticity_min_eigenvalue = {:.6g}\n", report.elasticity_min_eigenvalue);
  out << fmt::format("sigma_bounds = [{:.6g}, {:.6g}], max_slope = {:.6g}\n",
                     spec.material.conductivity.lower_bound(), spec.material.conductivity.upper_bound(),
                     spec.material.conductivity.max_slope());
  out << fmt::format("sigma_sampled = [{:.6g}, {:.6g}]\n", report.sigma_sample_min, report.sigma_sample_max);
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  out << (report.warnings.empty() ? "ok\n" : "ok (with warnings)\n");
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joule heating thermoviscoelastic FEM solver and convergence harness", "thermistor"};
  app.require_subcommand(1);

  ProblemArgs problem;
  NumericsArgs numerics;
  StudyArgs study;

  auto* run = app.add_subcommand("run", "run one simulation and dump its trajectory");
  int nx = 0;
  int nt = 0;
  int stride = 0;
  std::string scheme = "semi";
  std::string out_dir = "run";
  add_problem_flags(run, problem, false);
  add_numerics_flags(run, numerics);
  run->add_option("--nx", nx, "squares per side")->required()->check(CLI::PositiveNumber);
  run->add_option("--nt", nt, "time steps")->required()->check(CLI::PositiveNumber);
  run->add_option("--scheme", scheme, "semi | ie")->check(CLI::IsMember({"semi", "ie"}));
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--stride", stride, "snapshot stride (0 = automatic)")->check(CLI::NonNegativeNumber);

  auto* converge = app.add_subcommand("converge", "convergence study against a reference run");
  add_problem_flags(converge, problem, true);
  add_numerics_flags(converge, numerics);
  add_study_flags(converge, study);
  converge->add_option("--scheme", study.scheme, "scheme under test: semi | ie")
      ->check(CLI::IsMember({"semi", "ie"}));

  auto* compare = app.add_subcommand("compare", "compare two schemes against one reference run");
  std::vector<std::string> schemes{"semi", "ie"};
  add_problem_flags(compare, problem, false);
  add_numerics_flags(compare, numerics);
  add_study_flags(compare, study);
  compare->add_option("--schemes", schemes, "two schemes, e.g. semi,ie")->delimiter(',');

  auto* validate = app.add_subcommand("validate", "check material data against the model assumptions");
  add_problem_flags(validate, problem, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    err << "run 'thermistor --help' for usage\n";
    return 2;
  }

  try {
    if (*run) return cmd_run(problem, numerics, nx, nt, scheme, out_dir, stride, out, err);
    if (*converge) return cmd_converge(problem, numerics, study, out, err);
    if (*compare) return cmd_compare(problem, numerics, study, schemes, out, err);
    if (*validate) return cmd_validate(problem, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace thermistor
