#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "klexpand/config.hpp"

namespace klexpand {

struct RunReport {
  std::string case_label;
  Method method = Method::galerkin_ibq;
  std::size_t n = 0;
  std::optional<std::size_t> ntilde;  // IBQ Galerkin only
  int degree = 0;
  double h = 0.0;
  double setup_seconds = 0.0;
  double matvec_mean_seconds = 0.0;
  double eigensolve_seconds = 0.0;
  int iterations = 0;
  std::vector<double> eigenvalues;
  std::vector<double> imag_parts;
  std::vector<double> residuals;
  std::vector<bool> complex_flags;
  std::vector<double> reference;
  std::vector<double> rel_errors;
  std::optional<double> mean_rel_error;
  bool partial = false;
};

/// Number of warm applies averaged into matvec_mean_seconds.
inline constexpr int kTimedApplies = 20;

/// Setup, eigensolve and metrics for one configuration. Writes eigenvalues.csv,
/// timings.csv, modes_line.csv and (with a reference) errors.csv to config.output.
/// Partial convergence sets report.partial; the CSVs are still written.
RunReport run(const BenchmarkConfig& config);

struct SweepResult {
  std::vector<RunReport> reports;
  std::vector<std::string> failures;  // one message per failed config
  int exit_code = 0;
};

/// Runs every `*.cfg` file in `dir` in name order, each into `dir/results/<stem>` unless it
/// sets `output`, and writes `dir/summary.csv`. Failing configs leave a row with empty
/// numeric fields and the sweep continues.
SweepResult sweep(const std::filesystem::path& dir);

/// Reads eigenvalues from a CSV with an `eigenvalue` column or one number per line.
std::vector<double> read_reference_eigenvalues(const std::filesystem::path& file);

/// Descending eigenvalues of σ² exp(-|x-y|/b) on an interval of the given length.
std::vector<double> analytic_exponential_eigenvalues(std::size_t count, double variance, double b,
                                                     double length);

/// Process exit code for a report: 0 ok, 3 partial convergence.
int exit_code(const RunReport& r);

}  // namespace klexpand
