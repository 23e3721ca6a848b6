#include "sqhd/sgdm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sqhd/errors.hpp"
#include "sqhd/parallel.hpp"

namespace sqhd {

SgdmCoefficients sgdm_coefficients(long k, double eta) {
  const double kd = static_cast<double>(k);
  return {kd / (kd + 2.0), 2.0 * eta / (kd + 3.0)};
}

void sgdm_step(const FiniteSumObjective& objective, double eta, SgdmState& state, Rng& rng) {
  const auto j = static_cast<std::size_t>(rng.uniform_index(objective.components()));
  const auto c = sgdm_coefficients(state.k, eta);
  const auto grad = objective.component_gradient(j, state.x);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i]))
      throw InvariantViolation("sgdm: non-finite gradient at iterate " + std::to_string(state.k));
    state.v[i] = c.beta * state.v[i] + grad[i];
    state.x[i] = std::clamp(state.x[i] - c.gamma * state.v[i], -1.0, 1.0);
  }
  ++state.k;
}

SgdmPath sgdm_run_from(const FiniteSumObjective& objective, double eta, long steps, Rng& rng,
                       std::vector<double> x0, long stride) {
  if (steps < 1) throw std::invalid_argument("sgdm: N must be >= 1");
  if (stride < 1) throw std::invalid_argument("sgdm: stride must be >= 1");
  if (x0.size() != static_cast<std::size_t>(objective.dim())) throw std::invalid_argument("sgdm: x0 dimension");
  SgdmState state{std::move(x0), std::vector<double>(static_cast<std::size_t>(objective.dim()), 0.0), 0};
  SgdmPath path;
  path.iterations.push_back(0);
  path.points.push_back(state.x);
  while (state.k < steps) {
    sgdm_step(objective, eta, state, rng);
    if (state.k % stride == 0 || state.k == steps) {
      path.iterations.push_back(state.k);
      path.points.push_back(state.x);
    }
  }
  return path;
}

SgdmPath sgdm_run(const FiniteSumObjective& objective, double eta, long steps, Rng& rng, long stride) {
  std::vector<double> x0(static_cast<std::size_t>(objective.dim()));
  for (auto& v : x0) v = rng.uniform(-1.0, 1.0);
  return sgdm_run_from(objective, eta, steps, rng, std::move(x0), stride);
}

EnsembleCurves sgdm_ensemble(const FiniteSumObjective& objective, const EnsembleConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("sgdm ensemble: runs must be >= 1");
  const auto runs = static_cast<std::size_t>(cfg.runs);
  const bool degenerate = !(cfg.fmax > cfg.fmin);
  std::vector<std::vector<double>> losses(runs);
  std::vector<std::vector<char>> hits(runs);
  std::vector<std::vector<double>> finals(runs);
  std::vector<long> iterations;

  parallel_for(runs, cfg.threads, [&](std::size_t r) {
    Rng rng(derive_seed(cfg.seed, r));
    const auto path = sgdm_run(objective, cfg.eta, cfg.steps, rng, cfg.stride);
    for (const auto& x : path.points) {
      const double loss = objective.value(x) - cfg.fmin;
      losses[r].push_back(loss);
      hits[r].push_back(degenerate || loss / (cfg.fmax - cfg.fmin) < cfg.delta);
    }
    finals[r] = path.points.back();
    if (r == 0) iterations = path.iterations;
  });

  EnsembleCurves out;
  out.iterations = iterations;
  out.final_points = std::move(finals);
  out.degenerate_range = degenerate;
  const double n = static_cast<double>(runs);
  for (std::size_t c = 0; c < iterations.size(); ++c) {
    double sum_loss = 0.0, sum_hit = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
      sum_loss += losses[r][c];
      sum_hit += hits[r][c];
    }
    const double mean_loss = sum_loss / n, mean_hit = sum_hit / n;
    double var_loss = 0.0;
    for (std::size_t r = 0; r < runs; ++r) var_loss += (losses[r][c] - mean_loss) * (losses[r][c] - mean_loss);
    const double se_loss = runs > 1 ? std::sqrt(var_loss / (n - 1.0) / n) : 0.0;
    const double se_hit = runs > 1 ? std::sqrt(mean_hit * (1.0 - mean_hit) * n / (n - 1.0) / n) : 0.0;
    out.points.push_back({static_cast<double>(iterations[c]) * cfg.eta, mean_loss, mean_hit});
    out.stderr_loss.push_back(se_loss);
    out.stderr_success.push_back(se_hit);
  }
  return out;
}

}  // namespace sqhd
