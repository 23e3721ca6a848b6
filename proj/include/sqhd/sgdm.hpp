#pragma once

#include <cstdint>
#include <vector>

#include "sqhd/metrics.hpp"
#include "sqhd/objectives.hpp"
#include "sqhd/rng.hpp"

namespace sqhd {

struct SgdmState {
  std::vector<double> x;
  std::vector<double> v;
  long k = 0;
};

struct SgdmCoefficients {
  double beta;   // k / (k + 2)
  double gamma;  // 2 eta / (k + 3)
};
SgdmCoefficients sgdm_coefficients(long k, double eta);

/// One update: draw j, v = beta_k v + grad f_j(x), x = clamp(x - gamma_k v).
/// Throws InvariantViolation naming the iterate on a non-finite gradient.
void sgdm_step(const FiniteSumObjective& objective, double eta, SgdmState& state, Rng& rng);

struct SgdmPath {
  std::vector<long> iterations;  // 0, stride, ..., steps
  std::vector<std::vector<double>> points;
};

/// x0 drawn uniformly on [-1, 1]^d from rng, then `steps` updates.
SgdmPath sgdm_run(const FiniteSumObjective& objective, double eta, long steps, Rng& rng, long stride = 1);
/// Same, from a given starting point.
SgdmPath sgdm_run_from(const FiniteSumObjective& objective, double eta, long steps, Rng& rng,
                       std::vector<double> x0, long stride = 1);

struct EnsembleConfig {
  double eta = 0.01;
  long steps = 1;
  int runs = 1;
  std::uint64_t seed = 0;  // run r uses derive_seed(seed, r)
  double delta = 0.01;
  double fmin = 0.0;
  double fmax = 1.0;
  long stride = 1;
  int threads = 1;
};

struct EnsembleCurves {
  std::vector<long> iterations;
  std::vector<MetricPoint> points;  // time = k eta
  std::vector<double> stderr_loss;
  std::vector<double> stderr_success;
  std::vector<std::vector<double>> final_points;
  /// fmax <= fmin: every run counts as a success.
  bool degenerate_range = false;
};

EnsembleCurves sgdm_ensemble(const FiniteSumObjective& objective, const EnsembleConfig& cfg);

}  // namespace sqhd
