#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqhd/config.hpp"
#include "sqhd/lindblad.hpp"

namespace sqhd {

/// Metric extremes from the reference landscape shared by every run.
struct ReferenceExtremes {
  int resolution = 0;
  double scan_fmin = 0.0;
  double scan_fmax = 0.0;
  double fmin = 0.0;
  double fmax = 0.0;
  std::vector<double> argmin;
  std::vector<double> argmax;
};
ReferenceExtremes reference_extremes(const FiniteSumObjective& objective, int resolution);

struct RunOutcome {
  RunSpec spec;
  std::vector<long> iterations;
  std::vector<MetricPoint> points;
  bool has_stderr = false;
  std::vector<double> stderr_loss;
  std::vector<double> stderr_success;
  std::vector<double> final_distribution;             // quantum runs
  std::vector<std::vector<double>> final_points;      // measured (quantum) or iterates (sgdm)
  double max_norm_deviation = 0.0;
  bool degenerate_range = false;
  double wall_seconds = 0.0;
};

/// Executes one run against the given extremes. Invariant violations are
/// rethrown with the run label prefixed.
RunOutcome execute_run(const RunSpec& spec, const ReferenceExtremes& reference);

struct ExperimentResult {
  ExperimentConfig config;
  ReferenceExtremes reference;
  std::vector<RunOutcome> runs;
  std::optional<WeakApproxReport> weak;
  std::string started_utc;
  std::string finished_utc;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// "iteration,time,expected_loss,success_prob[,stderr_loss,stderr_succ]".
std::string trajectory_csv(const RunOutcome& run);
std::string final_points_csv(const std::vector<std::vector<double>>& points);
nlohmann::json weak_report_json(const WeakApproxReport& report);
nlohmann::json summary_json(const ExperimentResult& result);

/// Writes <label>.csv, <label>_distribution.csv (or <label>_final_points.csv
/// for sgdm), weak_approx.json in weak-approx mode, and summary.json.
/// Returns the written paths.
std::vector<std::filesystem::path> write_artifacts(const ExperimentResult& result, const std::filesystem::path& out_dir);

}  // namespace sqhd
