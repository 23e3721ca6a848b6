#include "sqhd/dynamics.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sqhd/errors.hpp"
#include "sqhd/io.hpp"
#include "sqhd/parallel.hpp"

namespace sqhd {

void RunConfig::validate() const {
  if (!objective) throw std::invalid_argument("run config: no objective");
  if (objective->dim() != grid.dim()) throw std::invalid_argument("run config: objective and grid dimensions differ");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("run config: eta must be positive");
  if (steps < 0) throw std::invalid_argument("run config: negative iteration count");
  if (checkpoint_stride < 1) throw std::invalid_argument("run config: checkpoint stride must be >= 1");
  if (samples < 1) throw std::invalid_argument("run config: sample count must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("run config: delta must be in (0, 1]");
  if (!schedule.psi_exp || !schedule.chi_exp || !schedule.u) throw std::invalid_argument("run config: no schedule");
}

namespace {

std::vector<long> checkpoint_iterations(long steps, long stride) {
  std::vector<long> out;
  for (long k = 0; k <= steps; k += stride) out.push_back(k);
  if (out.back() != steps) out.push_back(steps);
  return out;
}

void apply_potential(std::span<Complex> amps, double scale, std::span<const double> values) {
  for (std::size_t k = 0; k < amps.size(); ++k) amps[k] *= std::polar(1.0, -scale * values[k]);
}

struct Tables {
  std::vector<std::vector<double>> components;
  std::vector<double> total;

  explicit Tables(const RunConfig& cfg)
      : components(tabulate_components(*cfg.objective, cfg.grid)), total(mean_of_tables(components)) {}
};

/// Per-trajectory stepping machinery; owns the FFT scratch.
class Stepper {
 public:
  explicit Stepper(const RunConfig& cfg) : cfg_(cfg), kinetic_(cfg.grid, cfg.kinetic_sign) {}

  void strang(std::span<Complex> amps, long j, std::span<const double> potential) {
    const auto p = discrete_params(cfg_.schedule, cfg_.eta, j, cfg_.coefficient_clamp);
    kinetic_.apply(amps, cfg_.eta * p.a / 2.0);
    apply_potential(amps, cfg_.eta * p.b, potential);
    kinetic_.apply(amps, cfg_.eta * p.a / 2.0);
  }

  void two_factor(std::span<Complex> amps, long j, double step, std::span<const double> potential) {
    const auto p = discrete_params(cfg_.schedule, cfg_.eta, j, cfg_.coefficient_clamp);
    apply_potential(amps, step * p.b, potential);
    kinetic_.apply(amps, step * p.a);
  }

  KineticPropagator& kinetic() { return kinetic_; }

 private:
  const RunConfig& cfg_;
  KineticPropagator kinetic_;
};

struct SampleResult {
  std::vector<MetricPoint> points;
  std::vector<double> final_distribution;
  std::vector<double> measured;
  double max_norm_deviation = 0.0;
};

/// Evolves one trajectory from the uniform state. `step(amps, j)` advances
/// iteration j; metrics are taken at the checkpoints.
template <typename StepFn>
SampleResult evolve_sample(const RunConfig& cfg, const Tables& tables, const std::vector<long>& checkpoints,
                           Rng& rng, StepFn&& step) {
  SampleResult out;
  WaveState psi = uniform_state(cfg.grid);
  std::size_t next = 0;
  for (long j = 0;; ++j) {
    if (next < checkpoints.size() && checkpoints[next] == j) {
      const double deviation = std::abs(psi.norm() - 1.0);
      out.max_norm_deviation = std::max(out.max_norm_deviation, deviation);
      if (deviation > 1e-10)
        throw InvariantViolation("state norm drifted by " + format_double(deviation) + " at iteration " +
                                 std::to_string(j));
      const auto p = psi.probabilities();
      out.points.push_back(distribution_metrics(p, tables.total, cfg, static_cast<double>(j) * cfg.eta));
      ++next;
    }
    if (j == cfg.steps) break;
    step(psi.amplitudes(), j);
  }
  out.final_distribution = psi.probabilities();
  out.measured = measure_position(psi, rng);
  return out;
}

Trajectory combine(const RunConfig& cfg, const std::vector<long>& checkpoints, std::vector<SampleResult>& samples,
                   std::chrono::steady_clock::time_point start) {
  Trajectory t;
  t.iterations = checkpoints;
  t.seed = cfg.seed;
  const double r = static_cast<double>(samples.size());
  t.points.resize(checkpoints.size());
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    MetricPoint mean{samples.front().points[c].time, 0.0, 0.0};
    for (const auto& s : samples) {
      mean.expected_loss += s.points[c].expected_loss;
      mean.success_prob += s.points[c].success_prob;
    }
    mean.expected_loss /= r;
    mean.success_prob /= r;
    t.points[c] = mean;
  }
  if (samples.size() > 1) {
    t.stderr_loss.resize(checkpoints.size());
    t.stderr_success.resize(checkpoints.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      double vl = 0.0, vs = 0.0;
      for (const auto& s : samples) {
        vl += std::pow(s.points[c].expected_loss - t.points[c].expected_loss, 2);
        vs += std::pow(s.points[c].success_prob - t.points[c].success_prob, 2);
      }
      t.stderr_loss[c] = std::sqrt(vl / (r - 1.0) / r);
      t.stderr_success[c] = std::sqrt(vs / (r - 1.0) / r);
    }
  }
  t.final_distribution.assign(cfg.grid.size(), 0.0);
  for (const auto& s : samples) {
    for (std::size_t k = 0; k < t.final_distribution.size(); ++k) t.final_distribution[k] += s.final_distribution[k];
    t.measured_points.push_back(s.measured);
    t.max_norm_deviation = std::max(t.max_norm_deviation, s.max_norm_deviation);
  }
  for (auto& p : t.final_distribution) p /= r;
  t.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return t;
}

}  // namespace

MetricPoint distribution_metrics(std::span<const double> probabilities, std::span<const double> fvalues,
                                 const RunConfig& cfg, double time) {
  MetricPoint m;
  m.time = time;
  m.expected_loss = expected_loss(probabilities, fvalues, cfg.fmin);
  if (m.expected_loss < -1e-9)
    throw InvariantViolation("expected loss " + format_double(m.expected_loss) + " below the reference minimum");
  m.success_prob = cfg.fmax > cfg.fmin ? success_probability(probabilities, fvalues, cfg.fmin, cfg.fmax, cfg.delta)
                                       : 1.0;
  return m;
}

WaveState sqhd_step(const WaveState& state, double a, double b, double eta, std::span<const double> component_values,
                    KineticSign sign) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("sqhd_step: non-finite coefficient");
  if (component_values.size() != state.size()) throw std::invalid_argument("sqhd_step: potential length mismatch");
  WaveState out = state;
  KineticPropagator kinetic(state.grid(), sign);
  kinetic.apply(out.amplitudes(), eta * a / 2.0);
  apply_potential(out.amplitudes(), eta * b, component_values);
  kinetic.apply(out.amplitudes(), eta * a / 2.0);
  return out;
}

Trajectory run_sqhd(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Tables tables(cfg);
  const auto checkpoints = checkpoint_iterations(cfg.steps, cfg.checkpoint_stride);
  const std::size_t m = tables.components.size();
  std::vector<SampleResult> samples(static_cast<std::size_t>(cfg.samples));
  parallel_for(samples.size(), cfg.threads, [&](std::size_t s) {
    Rng rng(derive_seed(cfg.seed, s));
    Stepper stepper(cfg);
    samples[s] = evolve_sample(cfg, tables, checkpoints, rng, [&](std::span<Complex> amps, long j) {
      stepper.strang(amps, j, tables.components[rng.uniform_index(m)]);
    });
  });
  return combine(cfg, checkpoints, samples, start);
}

Trajectory run_qhd(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Tables tables(cfg);
  const auto checkpoints = checkpoint_iterations(cfg.steps, cfg.checkpoint_stride);
  std::vector<SampleResult> samples(1);
  Rng rng(derive_seed(cfg.seed, 0));
  Stepper stepper(cfg);
  samples[0] = evolve_sample(cfg, tables, checkpoints, rng,
                             [&](std::span<Complex> amps, long j) { stepper.strang(amps, j, tables.total); });
  return combine(cfg, checkpoints, samples, start);
}

Trajectory run_adaptive_sqhd(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Tables tables(cfg);
  const auto checkpoints = checkpoint_iterations(cfg.steps, cfg.checkpoint_stride);
  const auto steps = cfg.steps > 0 ? adaptive_steps(cfg.schedule, cfg.eta, cfg.steps) : std::vector<double>{};
  const std::size_t m = tables.components.size();
  std::vector<SampleResult> samples(static_cast<std::size_t>(cfg.samples));
  parallel_for(samples.size(), cfg.threads, [&](std::size_t s) {
    Rng rng(derive_seed(cfg.seed, s));
    Stepper stepper(cfg);
    samples[s] = evolve_sample(cfg, tables, checkpoints, rng, [&](std::span<Complex> amps, long j) {
      stepper.two_factor(amps, j, steps[j], tables.components[rng.uniform_index(m)]);
    });
  });
  return combine(cfg, checkpoints, samples, start);
}

WaveState evolve_two_factor(const RunConfig& cfg, std::span<const double> steps, std::span<const std::size_t> xi) {
  cfg.validate();
  if (steps.size() != xi.size()) throw std::invalid_argument("evolve_two_factor: step and component counts differ");
  const Tables tables(cfg);
  Stepper stepper(cfg);
  WaveState psi = uniform_state(cfg.grid);
  for (std::size_t j = 0; j < steps.size(); ++j)
    stepper.two_factor(psi.amplitudes(), static_cast<long>(j), steps[j], tables.components.at(xi[j]));
  return psi;
}

WaveState evolve_strang(const RunConfig& cfg, std::span<const std::size_t> xi) {
  cfg.validate();
  const Tables tables(cfg);
  Stepper stepper(cfg);
  WaveState psi = uniform_state(cfg.grid);
  for (std::size_t j = 0; j < xi.size(); ++j)
    stepper.strang(psi.amplitudes(), static_cast<long>(j), tables.components.at(xi[j]));
  return psi;
}

SampledRun run_sqhd_sample(const RunConfig& cfg, Rng& rng) {
  cfg.validate();
  const Tables tables(cfg);
  Stepper stepper(cfg);
  SampledRun out{uniform_state(cfg.grid), {}};
  const std::size_t m = tables.components.size();
  for (long j = 0; j < cfg.steps; ++j) {
    out.xi.push_back(rng.uniform_index(m));
    stepper.strang(out.state.amplitudes(), j, tables.components[out.xi.back()]);
  }
  return out;
}

namespace {

constexpr double kEnumerationCap = 100000.0;
constexpr std::size_t kDensityGridCap = 256;

}  // namespace

ChannelPath channel_average_path(const RunConfig& cfg) {
  cfg.validate();
  const Tables tables(cfg);
  const std::size_t m = tables.components.size();
  if (std::pow(static_cast<double>(m), static_cast<double>(cfg.steps)) > kEnumerationCap)
    throw std::invalid_argument("channel_average: m^N exceeds the enumeration cap of 100000");
  if (cfg.grid.size() > kDensityGridCap) throw std::invalid_argument("channel_average: grid exceeds 256 points");

  const auto checkpoints = checkpoint_iterations(cfg.steps, cfg.checkpoint_stride);
  const auto n = static_cast<Eigen::Index>(cfg.grid.size());
  std::vector<Eigen::MatrixXcd> acc(checkpoints.size(), Eigen::MatrixXcd::Zero(n, n));
  std::vector<long> slot(static_cast<std::size_t>(cfg.steps) + 1, -1);
  for (std::size_t c = 0; c < checkpoints.size(); ++c) slot[static_cast<std::size_t>(checkpoints[c])] = static_cast<long>(c);

  Stepper stepper(cfg);
  auto deposit = [&](long depth, const WaveState& psi, double weight) {
    const long c = slot[static_cast<std::size_t>(depth)];
    if (c < 0) return;
    const auto amps = psi.amplitudes();
    Eigen::Map<const Eigen::VectorXcd> v(amps.data(), n);
    acc[static_cast<std::size_t>(c)].noalias() += weight * (v * v.adjoint());
  };

  if (m == 1) {
    WaveState psi = uniform_state(cfg.grid);
    for (long j = 0;; ++j) {
      deposit(j, psi, 1.0);
      if (j == cfg.steps) break;
      stepper.strang(psi.amplitudes(), j, tables.components[0]);
    }
  } else {
    // Depth-first over the m-ary tree of component sequences; N <= log2(cap).
    std::vector<WaveState> level(static_cast<std::size_t>(cfg.steps) + 1, uniform_state(cfg.grid));
    std::vector<std::size_t> choice(static_cast<std::size_t>(cfg.steps) + 1, 0);
    std::vector<double> weight(static_cast<std::size_t>(cfg.steps) + 1, 1.0);
    for (std::size_t d = 1; d < weight.size(); ++d) weight[d] = weight[d - 1] / static_cast<double>(m);
    long depth = 0;
    deposit(0, level[0], 1.0);
    while (depth >= 0) {
      const auto d = static_cast<std::size_t>(depth);
      if (depth == cfg.steps || choice[d] == m) {
        choice[d] = 0;
        --depth;
        continue;
      }
      const std::size_t xi = choice[d]++;
      level[d + 1] = level[d];
      stepper.strang(level[d + 1].amplitudes(), depth, tables.components[xi]);
      deposit(depth + 1, level[d + 1], weight[d + 1]);
      ++depth;
    }
  }

  ChannelPath path;
  path.iterations = checkpoints;
  for (auto& a : acc) path.states.emplace_back(cfg.grid, 0.5 * (a + a.adjoint()));
  return path;
}

DensityState channel_average(const RunConfig& cfg) {
  auto path = channel_average_path(cfg);
  return std::move(path.states.back());
}

namespace {

/// rho -> E rho E^dagger with E = exp(-i theta K), applied column-wise via FFT.
void conjugate_kinetic(Eigen::MatrixXcd& rho, KineticPropagator& kinetic, double theta) {
  const auto n = static_cast<std::size_t>(rho.rows());
  for (Eigen::Index c = 0; c < rho.cols(); ++c) kinetic.apply(std::span<Complex>(rho.col(c).data(), n), theta);
  rho.adjointInPlace();
  for (Eigen::Index c = 0; c < rho.cols(); ++c) kinetic.apply(std::span<Complex>(rho.col(c).data(), n), theta);
  rho.adjointInPlace();
}

/// rho -> (1/m) sum_xi P_xi rho P_xi^dagger with diagonal P_xi = exp(-i scale f_xi).
void average_potential(Eigen::MatrixXcd& rho, double scale, const std::vector<std::vector<double>>& components) {
  const auto n = rho.rows();
  Eigen::MatrixXcd phases(n, static_cast<Eigen::Index>(components.size()));
  for (std::size_t j = 0; j < components.size(); ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      phases(k, static_cast<Eigen::Index>(j)) = std::polar(1.0, -scale * components[j][static_cast<std::size_t>(k)]);
  const Eigen::MatrixXcd mask = phases * phases.adjoint() / static_cast<double>(components.size());
  rho = rho.cwiseProduct(mask);
}

}  // namespace

ChannelPath channel_propagate_path(const RunConfig& cfg, Layout layout) {
  cfg.validate();
  const Tables tables(cfg);
  const auto checkpoints = checkpoint_iterations(cfg.steps, cfg.checkpoint_stride);
  const auto steps = (layout == Layout::TwoFactor && cfg.steps > 0) ? adaptive_steps(cfg.schedule, cfg.eta, cfg.steps)
                                                                     : std::vector<double>{};
  KineticPropagator kinetic(cfg.grid, cfg.kinetic_sign);
  Eigen::MatrixXcd rho = DensityState::pure(uniform_state(cfg.grid)).matrix();
  ChannelPath path;
  std::size_t next = 0;
  for (long j = 0;; ++j) {
    if (next < checkpoints.size() && checkpoints[next] == j) {
      path.iterations.push_back(j);
      path.states.emplace_back(cfg.grid, rho);
      ++next;
    }
    if (j == cfg.steps) break;
    const auto p = discrete_params(cfg.schedule, cfg.eta, j, cfg.coefficient_clamp);
    if (layout == Layout::Strang) {
      conjugate_kinetic(rho, kinetic, cfg.eta * p.a / 2.0);
      average_potential(rho, cfg.eta * p.b, tables.components);
      conjugate_kinetic(rho, kinetic, cfg.eta * p.a / 2.0);
    } else {
      average_potential(rho, steps[j] * p.b, tables.components);
      conjugate_kinetic(rho, kinetic, steps[j] * p.a);
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
  }
  return path;
}

}  // namespace sqhd
