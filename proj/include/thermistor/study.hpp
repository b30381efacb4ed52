#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "thermistor/metrics.hpp"
#include "thermistor/physics.hpp"
#include "thermistor/stepper.hpp"

namespace thermistor {

enum class NtRule { explicit_list, half_square, quarter_square };

/// One convergence study: several test resolutions compared against a
/// single reference run.
struct StudyConfig {
  ProblemSpec spec;
  std::vector<int> nx;
  NtRule nt_rule = NtRule::half_square;
  /// Used with NtRule::explicit_list, one entry per nx.
  std::vector<int> explicit_nt;
  StepperConfig test;
  StepperConfig reference;
  int reference_nx = 32;
  int reference_nt = 512;
};

std::vector<int> test_step_counts(const StudyConfig& config);

/// Checks nesting and divisibility of every test grid in the reference
/// grid; throws InvalidArgument before any computation.
void validate_study(const StudyConfig& config);

struct StudyRow {
  int nx = 0;
  double h = 0.0;
  int nt = 0;
  double k = 0.0;
  FieldErrors errors;
  double wall_s = 0.0;
  int max_picard_iterations = 0;
};

struct StudyResult {
  std::string scheme;
  std::string reference_scheme;
  std::vector<StudyRow> rows;
  double reference_wall_s = 0.0;
  int reference_max_picard_iterations = 0;
};

/// Runs the reference once and every (scheme, nx) test configuration in
/// lockstep with it, comparing at each shared time. One result per
/// entry of `schemes`, rows in nx order.
std::vector<StudyResult> run_convergence_studies(const StudyConfig& config,
                                                 std::span<const Scheme> schemes);
StudyResult run_convergence_study(const StudyConfig& config);

/// Error columns in CSV order with their header names.
const std::vector<std::string>& error_column_names();
std::vector<double> error_columns(const FieldErrors& errors);

/// nx,h,nt,k,<error columns>,wall_s. wall_s is "nan" unless
/// include_wall_time, which keeps the file byte-reproducible.
void write_errors_csv(std::ostream& out, const StudyResult& result, bool include_wall_time = false);
/// Pairwise observed orders between consecutive rows.
void write_orders_csv(std::ostream& out, const StudyResult& result);
/// Side-by-side errors of two studies with a ratio column a/b per field.
void write_compare_csv(std::ostream& out, const StudyResult& a, const StudyResult& b);

/// Fixed-width table for the terminal.
std::string format_table(const StudyResult& result);

}  // namespace thermistor
