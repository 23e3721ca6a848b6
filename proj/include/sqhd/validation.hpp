#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqhd/lindblad.hpp"

namespace sqhd {

struct CheckResult {
  std::string id;
  bool passed = false;
  double value = 0.0;
  std::string requirement;  // human-readable bound, e.g. "<= 1e-10"
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  nlohmann::json details = nlohmann::json::object();

  bool passed() const;
  std::vector<std::string> failing() const;
  nlohmann::json to_json() const;
};

std::vector<std::string> validation_suites();

/// invariants, oracle or order. Throws std::invalid_argument otherwise.
SuiteReport run_validation(const std::string& suite, std::uint64_t seed = 0, int threads = 1);

/// d = 1, n_r = 4, m = 2 (centers -0.5, 0.5), N = 3 channel test configuration.
RunConfig oracle_config();
/// Averaged density matrix of `samples` independent single-stream runs.
DensityState monte_carlo_density(const RunConfig& cfg, long samples, std::uint64_t seed, int threads = 1);

/// d = 1, n_r = 4, m = 2 quadratic, T = 0.4, log scaling schedule (C = 2,
/// t_eps = 1); the order check runs it at eta and eta / 2.
RunConfig order_config(double eta);

}  // namespace sqhd
