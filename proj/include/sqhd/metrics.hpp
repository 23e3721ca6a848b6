#pragma once

#include <span>
#include <string>

namespace sqhd {

struct MetricPoint {
  double time = 0.0;
  double expected_loss = 0.0;
  double success_prob = 0.0;
};

/// sum_k p_k f_k - fmin. Values in [-1e-9, 0) are clipped to 0.
/// Throws if the probabilities do not sum to 1 within 1e-8.
double expected_loss(std::span<const double> probabilities, std::span<const double> fvalues, double fmin);

/// Mass on points with (f - fmin) / (fmax - fmin) < delta.
/// Throws on a degenerate range or delta outside (0, 1].
double success_probability(std::span<const double> probabilities, std::span<const double> fvalues, double fmin,
                           double fmax, double delta);

/// Per-objective default delta: 0.01 cubewave/dw, 0.05 sino-alt, 0.1 mich/sino.
double default_delta(const std::string& objective_name);

}  // namespace sqhd
