#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sqhd/grid.hpp"
#include "sqhd/metrics.hpp"
#include "sqhd/objectives.hpp"
#include "sqhd/schedules.hpp"
#include "sqhd/spectral.hpp"

namespace sqhd {

/// Inputs of one quantum run. T = eta * steps.
struct RunConfig {
  std::shared_ptr<const FiniteSumObjective> objective;
  Schedule schedule;
  GridSpec grid{1, 2};
  double eta = 0.01;
  long steps = 1;
  std::uint64_t seed = 0;
  long checkpoint_stride = 1;
  int samples = 1;  // independent xi streams averaged by run_sqhd
  double delta = 0.01;
  double fmin = 0.0;  // reference extremes for the metrics
  double fmax = 1.0;
  KineticSign kinetic_sign = KineticSign::Standard;
  double coefficient_clamp = 0.0;  // 0 = off
  int threads = 1;

  double total_time() const { return eta * static_cast<double>(steps); }

  /// Throws std::invalid_argument on eta <= 0, steps < 0, missing objective,
  /// grid/objective dimension mismatch, stride < 1 or samples < 1.
  void validate() const;
};

struct Trajectory {
  std::vector<long> iterations;
  std::vector<MetricPoint> points;
  std::vector<double> stderr_loss;  // filled when samples > 1
  std::vector<double> stderr_success;
  std::vector<double> final_distribution;
  std::vector<std::vector<double>> measured_points;  // one final measurement per sample
  std::uint64_t seed = 0;
  double max_norm_deviation = 0.0;
  double wall_seconds = 0.0;
};

/// Kinetic half step, diagonal phase exp(-i eta b f), kinetic half step.
WaveState sqhd_step(const WaveState& state, double a, double b, double eta, std::span<const double> component_values,
                    KineticSign sign = KineticSign::Standard);

/// Algorithm 1 from the uniform state. With samples > 1 the metrics are
/// averaged over independent streams seeded by derive_seed(seed, sample).
Trajectory run_sqhd(const RunConfig& cfg);

/// Deterministic split-step evolution with the total objective.
Trajectory run_qhd(const RunConfig& cfg);

/// Two-factor steps exp(-i eta_j a_j K) exp(-i eta_j b_j f_xi) with
/// eta_j = u((j + 1/2) eta) eta and a_j, b_j on the (j + 1/2) eta clock.
Trajectory run_adaptive_sqhd(const RunConfig& cfg);

/// Two-factor evolution with an explicit step vector on the (j + 1/2) eta
/// clock and a given component sequence; returns the final state.
WaveState evolve_two_factor(const RunConfig& cfg, std::span<const double> steps, std::span<const std::size_t> xi);

/// Strang evolution of one trajectory with a given component sequence.
WaveState evolve_strang(const RunConfig& cfg, std::span<const std::size_t> xi);

/// Single-stream SQHD that also reports the drawn components.
struct SampledRun {
  WaveState state;
  std::vector<std::size_t> xi;
};
SampledRun run_sqhd_sample(const RunConfig& cfg, Rng& rng);

enum class Layout { Strang, TwoFactor };

/// Averaged states at the checkpoint iterations (0, stride, ..., steps).
struct ChannelPath {
  std::vector<long> iterations;
  std::vector<DensityState> states;
};

/// Exhaustive average over all m^N component sequences (Strang layout).
/// Requires m^N <= 100000 and at most 256 grid points.
DensityState channel_average(const RunConfig& cfg);
ChannelPath channel_average_path(const RunConfig& cfg);

/// The same channel evaluated by propagating the density matrix through the
/// per-step averaged map rho -> (1/m) sum_xi U_xi rho U_xi^dagger, which is
/// exact because the xi_j are independent.
ChannelPath channel_propagate_path(const RunConfig& cfg, Layout layout = Layout::Strang);

/// Metrics of a position distribution under the run's reference extremes.
/// Constant objectives score success 1.
MetricPoint distribution_metrics(std::span<const double> probabilities, std::span<const double> fvalues,
                                 const RunConfig& cfg, double time);

}  // namespace sqhd
