#include "sqhd/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "sqhd/io.hpp"

namespace sqhd {

namespace {

void check_distribution(std::span<const double> p, std::span<const double> f) {
  if (p.size() != f.size()) throw std::invalid_argument("metric: probability and value lengths differ");
  double total = 0.0;
  for (double v : p) total += v;
  if (std::abs(total - 1.0) > 1e-8)
    throw std::invalid_argument("metric: probabilities sum to " + format_double(total));
}

}  // namespace

double expected_loss(std::span<const double> probabilities, std::span<const double> fvalues, double fmin) {
  check_distribution(probabilities, fvalues);
  double sum = 0.0;
  for (std::size_t k = 0; k < fvalues.size(); ++k) sum += probabilities[k] * fvalues[k];
  const double loss = sum - fmin;
  return (loss < 0.0 && loss >= -1e-9) ? 0.0 : loss;
}

double success_probability(std::span<const double> probabilities, std::span<const double> fvalues, double fmin,
                           double fmax, double delta) {
  check_distribution(probabilities, fvalues);
  if (!(fmax > fmin)) throw std::invalid_argument("success_probability: degenerate range");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("success_probability: delta must be in (0, 1]");
  const double range = fmax - fmin;
  double mass = 0.0;
  for (std::size_t k = 0; k < fvalues.size(); ++k)
    if ((fvalues[k] - fmin) / range < delta) mass += probabilities[k];
  return mass;
}

double default_delta(const std::string& objective_name) {
  const auto base = objective_name.substr(0, objective_name.find('@'));
  if (base == "cubewave" || base == "dw") return 0.01;
  if (base == "sino-alt") return 0.05;
  if (base == "mich" || base == "sino") return 0.1;
  return 0.01;
}

}  // namespace sqhd
