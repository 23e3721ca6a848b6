#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sqhd/dynamics.hpp"

namespace sqhd {

/// Parsed `key = value` lines. '#' starts a comment; blank lines are skipped.
struct RawConfig {
  struct Entry {
    std::string value;
    int line = 0;
    std::string source;
  };
  std::map<std::string, Entry> entries;

  /// Throws ConfigError on a malformed line or a duplicate key.
  static RawConfig parse(const std::string& text, const std::string& source);
  static RawConfig load(const std::string& path);

  /// Entries of `other` replace ours.
  void merge(const RawConfig& other);
  const Entry* find(const std::string& key) const;
};

/// Embedded experiment configs, keyed by name.
const std::vector<std::pair<std::string, std::string>>& preset_texts();
std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown preset.
RawConfig preset_config(const std::string& name);

std::vector<std::string> objective_names();

enum class Algorithm { Sqhd, Qhd, SqhdAdaptive, Sgdm };
std::string algorithm_name(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(const std::string& name);

enum class Mode { Compare, WeakApprox };

struct ObjectiveSpec {
  std::string name;
  double theta = 0.0;
  double scale = 1.2;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> centers;
  std::vector<double> slice;  // fixed trailing coordinates; empty = no slice
};
std::shared_ptr<const FiniteSumObjective> build_objective(const ObjectiveSpec& spec);

struct RunSpec {
  std::string label;
  Algorithm algorithm = Algorithm::Sqhd;
  RunConfig run;  // fmin / fmax are filled from the reference landscape at execution
  int sgdm_runs = 1000;
};

struct ExperimentConfig {
  std::string name;
  Mode mode = Mode::Compare;
  bool adaptive_weak_approx = false;
  ObjectiveSpec objective_spec;
  std::shared_ptr<const FiniteSumObjective> objective;
  std::vector<RunSpec> runs;
  /// Weak-approximation mode uses this single configuration.
  RunConfig weak_run;
  std::uint64_t master_seed = 0;
  int reference_resolution = 1024;
  double delta = 0.01;
  double noise_sign = 1.0;
  KineticSign kinetic_sign = KineticSign::Standard;
  double coefficient_clamp = 0.0;
  int threads = 1;
  /// Every key with the value in effect after defaults, for the summary.
  std::map<std::string, std::string> resolved;
};

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

/// Resolves `base`, applies defaults and validates every field. Throws
/// ConfigError naming the offending field and line.
ExperimentConfig build_experiment(const RawConfig& raw, const CliOverrides& overrides = {});

}  // namespace sqhd
