#include "thermistor/study.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>

#include <fmt/format.h>

#include "thermistor/exceptions.hpp"

namespace thermistor {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.10e}", v);
}

}  // namespace

std::vector<int> test_step_counts(const StudyConfig& config) {
  std::vector<int> nts;
  for (std::size_t i = 0; i < config.nx.size(); ++i) {
    const int nx = config.nx[i];
    switch (config.nt_rule) {
      case NtRule::half_square:
        nts.push_back(std::max(nx * nx / 2, 1));
        break;
      case NtRule::quarter_square:
        nts.push_back(std::max(nx * nx / 4, 1));
        break;
      case NtRule::explicit_list:
        if (i >= config.explicit_nt.size()) {
          throw InvalidArgument("explicit nt list is shorter than the nx list");
        }
        nts.push_back(config.explicit_nt[i]);
        break;
    }
  }
  return nts;
}

void validate_study(const StudyConfig& config) {
  if (config.nx.empty()) throw InvalidArgument("study needs at least one test nx");
  if (config.reference_nx < 1 || config.reference_nt < 1) {
    throw InvalidArgument("reference nx and nt must be positive");
  }
  if (config.nt_rule == NtRule::explicit_list && config.explicit_nt.size() != config.nx.size()) {
    throw InvalidArgument(fmt::format("explicit nt list has {} entries for {} nx values",
                                      config.explicit_nt.size(), config.nx.size()));
  }
  const auto nts = test_step_counts(config);
  for (std::size_t i = 0; i < config.nx.size(); ++i) {
    if (config.nx[i] < 1 || nts[i] < 1) {
      throw InvalidArgument(fmt::format("invalid test grid nx={}, nt={}", config.nx[i], nts[i]));
    }
    if (config.reference_nx % config.nx[i] != 0) {
      throw InvalidArgument(fmt::format("reference nx={} is not divisible by test nx={}",
                                        config.reference_nx, config.nx[i]));
    }
    if (config.reference_nt % nts[i] != 0) {
      throw InvalidArgument(fmt::format("reference nt={} is not divisible by test nt={}",
                                        config.reference_nt, nts[i]));
    }
  }
}

std::vector<StudyResult> run_convergence_studies(const StudyConfig& config,
                                                 std::span<const Scheme> schemes) {
  validate_study(config);
  const auto nts = test_step_counts(config);

  struct Test {
    std::size_t study;
    std::size_t row;
    int ratio;
    std::unique_ptr<Simulation> sim;
    std::unique_ptr<ErrorAccumulator> acc;
    double wall = 0.0;
  };

  const auto ref_start = Clock::now();
  Simulation reference(config.spec, config.reference_nx, config.reference_nt, config.reference);
  double ref_wall = seconds_since(ref_start);

  std::vector<StudyResult> results(schemes.size());
  std::vector<Test> tests;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    results[s].scheme = to_string(schemes[s]);
    results[s].reference_scheme = to_string(config.reference.scheme);
    for (std::size_t i = 0; i < config.nx.size(); ++i) {
      StepperConfig cfg = config.test;
      cfg.scheme = schemes[s];
      const auto start = Clock::now();
      Test t{s, i, config.reference_nt / nts[i],
             std::make_unique<Simulation>(config.spec, config.nx[i], nts[i], cfg), nullptr};
      t.acc = std::make_unique<ErrorAccumulator>(t.sim->operators().mesh_ptr(),
                                                 reference.operators().mesh_ptr());
      t.wall = seconds_since(start);
      tests.push_back(std::move(t));
      StudyRow row;
      row.nx = config.nx[i];
      row.h = 1.0 / config.nx[i];
      row.nt = nts[i];
      row.k = config.spec.final_time / nts[i];
      results[s].rows.push_back(row);
    }
  }

  // Reference and tests advance together, so no trajectory is stored.
  for (int n = 1; n <= config.reference_nt; ++n) {
    const auto start = Clock::now();
    reference.advance();
    ref_wall += seconds_since(start);
    const Snapshot ref_snap = reference.snapshot();
    for (Test& t : tests) {
      if (n % t.ratio != 0) continue;
      const auto test_start = Clock::now();
      t.sim->advance();
      t.wall += seconds_since(test_start);
      t.acc->add(t.sim->snapshot(), ref_snap);
    }
  }

  for (Test& t : tests) {
    StudyRow& row = results[t.study].rows[t.row];
    row.errors = t.acc->report().max_errors;
    row.wall_s = t.wall;
    row.max_picard_iterations = t.sim->max_picard_iterations();
  }
  for (auto& r : results) {
    r.reference_wall_s = ref_wall;
    r.reference_max_picard_iterations = reference.max_picard_iterations();
  }
  return results;
}

StudyResult run_convergence_study(const StudyConfig& config) {
  const Scheme scheme = config.test.scheme;
  return run_convergence_studies(config, std::span<const Scheme>(&scheme, 1)).front();
}

const std::vector<std::string>& error_column_names() {
  static const std::vector<std::string> names{"err_theta_l2", "err_theta_h1", "err_phi_l2", "err_phi_h1",
                                              "err_u_l2",     "err_dtu_l2",   "err_dtu_V"};
  return names;
}

std::vector<double> error_columns(const FieldErrors& e) {
  return {e.theta_l2, e.theta_h1, e.phi_l2, e.phi_h1, e.u_l2, e.dtu_l2, e.dtu_v};
}

void write_errors_csv(std::ostream& out, const StudyResult& result, bool include_wall_time) {
  out << "nx,h,nt,k";
  for (const auto& name : error_column_names()) out << ',' << name;
  out << ",wall_s\n";
  for (const StudyRow& row : result.rows) {
    out << fmt::format("{},{:.17g},{},{:.17g}", row.nx, row.h, row.nt, row.k);
    for (double v : error_columns(row.errors)) out << ',' << number(v);
    out << ',' << (include_wall_time ? fmt::format("{:.3f}", row.wall_s) : std::string("nan")) << '\n';
  }
}

void write_orders_csv(std::ostream& out, const StudyResult& result) {
  out << "nx_coarse,nx_fine";
  for (const auto& name : error_column_names()) out << ",order_" << name.substr(4);
  out << '\n';
  for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
    const StudyRow& a = result.rows[i];
    const StudyRow& b = result.rows[i + 1];
    out << a.nx << ',' << b.nx;
    const auto ea = error_columns(a.errors);
    const auto eb = error_columns(b.errors);
    for (std::size_t c = 0; c < ea.size(); ++c) {
      const double slope = ea[c] > 0.0 && eb[c] > 0.0 ? std::log(ea[c] / eb[c]) / std::log(a.h / b.h) : NAN;
      out << ',' << (std::isnan(slope) ? std::string("nan") : fmt::format("{:.4f}", slope));
    }
    out << '\n';
  }
}

void write_compare_csv(std::ostream& out, const StudyResult& a, const StudyResult& b) {
  if (a.rows.size() != b.rows.size()) throw InvalidArgument("compared studies have different rows");
  std::string la = a.scheme;
  std::string lb = b.scheme;
  if (la == lb) {
    la += "_a";
    lb += "_b";
  }
  out << "nx";
  for (const auto& name : error_column_names()) {
    out << fmt::format(",{0}_{1},{0}_{2},{0}_ratio", name, la, lb);
  }
  out << '\n';
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    out << a.rows[i].nx;
    const auto ea = error_columns(a.rows[i].errors);
    const auto eb = error_columns(b.rows[i].errors);
    for (std::size_t c = 0; c < ea.size(); ++c) {
      const double ratio = ea[c] == eb[c] ? 1.0 : ea[c] / eb[c];
      out << ',' << number(ea[c]) << ',' << number(eb[c]) << ',' << number(ratio);
    }
    out << '\n';
  }
}

std::string format_table(const StudyResult& result) {
  std::string out = fmt::format("scheme={} reference={}\n", result.scheme, result.reference_scheme);
  out += fmt::format("{:>4} {:>6} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}\n", "nx", "nt",
                     "theta_l2", "theta_h1", "phi_l2", "phi_h1", "u_l2", "dtu_l2", "dtu_V");
  for (const StudyRow& row : result.rows) {
    const auto& e = row.errors;
    out += fmt::format("{:>4} {:>6} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}\n",
                       row.nx, row.nt, e.theta_l2, e.theta_h1, e.phi_l2, e.phi_h1, e.u_l2, e.dtu_l2, e.dtu_v);
  }
  return out;
}

}  // namespace thermistor
