#include <stdexcept>
#include <doctest.h>

#include <memory>
#include <random>

#include "sqhd/sgdm.hpp"

using namespace sqhd;

namespace {

/// Plateau of E[f(x_N)] - fmin from a plain loop with its own generator.
double reference_plateau(const std::vector<std::vector<double>>& centers, double eta, long steps, int runs,
                         unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
  const std::size_t d = centers.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& c : centers)
    for (std::size_t i = 0; i < d; ++i) mean[i] += c[i] / static_cast<double>(centers.size());
  double total = 0.0;
  std::vector<double> x(d), v(d);
  for (int r = 0; r < runs; ++r) {
    for (auto& xi : x) xi = box(gen);
    std::fill(v.begin(), v.end(), 0.0);
    for (long k = 0; k < steps; ++k) {
      const auto& c = centers[pick(gen)];
      const double beta = static_cast<double>(k) / (k + 2.0), gamma = 2.0 * eta / (k + 3.0);
      for (std::size_t i = 0; i < d; ++i) {
        v[i] = beta * v[i] + (x[i] - c[i]);
        x[i] = std::clamp(x[i] - gamma * v[i], -1.0, 1.0);
      }
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < d; ++i) loss += 0.5 * (x[i] - mean[i]) * (x[i] - mean[i]);
    total += loss;
  }
  return total / runs;
}

}  // namespace

TEST_CASE("sgdm coefficients") {
  const auto c0 = sgdm_coefficients(0, 0.3);
  CHECK(c0.beta == 0.0);
  CHECK(c0.gamma == doctest::Approx(0.2).epsilon(1e-15));
  const auto c5 = sgdm_coefficients(5, 0.01);
  CHECK(c5.beta == doctest::Approx(5.0 / 7.0));
  CHECK(c5.gamma == doctest::Approx(0.0025));
}

TEST_CASE("sgdm from a stationary point stays put") {
  const auto obj = make_convex_quadratic({{0.25, -0.5}});
  Rng rng(1);
  const auto path = sgdm_run_from(obj, 0.1, 50, rng, {0.25, -0.5});
  for (const auto& x : path.points) CHECK(x == std::vector<double>{0.25, -0.5});
}

TEST_CASE("sgdm converges on a single quadratic") {
  const std::vector<double> c{0.3, -0.6};
  const auto obj = make_convex_quadratic({c});
  Rng rng(5);
  const auto path = sgdm_run(obj, 0.1, 5000, rng, 500);
  CHECK(path.iterations.back() == 5000);
  CHECK(obj.value(path.points.back()) <= 1e-4);

  // Same recursion written out directly.
  std::vector<double> x = path.points.front(), v(2, 0.0);
  for (long k = 0; k < 5000; ++k) {
    const double beta = static_cast<double>(k) / (k + 2.0), gamma = 0.2 / (k + 3.0);
    for (int i = 0; i < 2; ++i) {
      v[i] = beta * v[i] + (x[i] - c[i]);
      x[i] = std::clamp(x[i] - gamma * v[i], -1.0, 1.0);
    }
  }
  CHECK(std::abs(x[0] - path.points.back()[0]) <= 1e-12);
  CHECK(std::abs(x[1] - path.points.back()[1]) <= 1e-12);
}

TEST_CASE("sgdm iterates stay in the box and errors are reported") {
  const auto obj = make_convex_quadratic({{0.9, 0.9}, {-0.9, 1.0}});
  Rng rng(2);
  for (const auto& x : sgdm_run(obj, 5.0, 300, rng).points)
    for (double v : x) REQUIRE(std::abs(v) <= 1.0);
  CHECK_THROWS(sgdm_run(obj, 0.1, 0, rng));

  const FiniteSumObjective nan_grad("bad", 1, 1, [](std::size_t, std::span<const double>) { return 0.0; },
                                    [](std::size_t, std::span<const double>, std::span<double> g) { g[0] = NAN; });
  try {
    sgdm_run(nan_grad, 0.1, 10, rng);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("iterate 0") != std::string::npos);
  }
}

TEST_CASE("sgdm homogeneity") {
  const std::vector<std::vector<double>> centers{{0.4, 0.1}, {-0.2, 0.3}};
  const double c = 4.0;
  const auto base = make_convex_quadratic(centers);
  const FiniteSumObjective scaled(
      "scaled", 2, 2, [&](std::size_t j, std::span<const double> x) { return c * base.component(j, x); },
      [&](std::size_t j, std::span<const double> x, std::span<double> g) {
        base.component_gradient(j, x, g);
        for (auto& v : g) v *= c;
      });
  Rng a(9), b(9);
  const auto p = sgdm_run(base, 0.08, 200, a);
  const auto q = sgdm_run(scaled, 0.08 / c, 200, b);
  for (std::size_t i = 0; i < p.points.size(); ++i)
    for (int k = 0; k < 2; ++k) REQUIRE(p.points[i][k] == doctest::Approx(q.points[i][k]).epsilon(1e-12));
}

TEST_CASE("sgdm ensemble") {
  const auto obj = make_convex_quadratic({{0.5, 0.0}, {-0.5, 0.0}});
  EnsembleConfig cfg;
  cfg.eta = 0.01;
  cfg.steps = 400;
  cfg.runs = 1;
  cfg.seed = 3;
  cfg.fmin = 0.125;
  cfg.fmax = 1.125;
  cfg.delta = 0.1;
  cfg.stride = 100;
  const auto one = sgdm_ensemble(obj, cfg);
  Rng rng(derive_seed(3, 0));
  const auto path = sgdm_run(obj, 0.01, 400, rng, 100);
  REQUIRE(one.points.size() == path.points.size());
  for (std::size_t c = 0; c < path.points.size(); ++c) {
    CHECK(one.points[c].expected_loss == obj.value(path.points[c]) - 0.125);
    CHECK(one.points[c].time == doctest::Approx(path.iterations[c] * 0.01));
  }

  cfg.runs = 64;
  cfg.threads = 1;
  const auto serial = sgdm_ensemble(obj, cfg);
  cfg.threads = 4;
  const auto parallel = sgdm_ensemble(obj, cfg);
  for (std::size_t c = 0; c < serial.points.size(); ++c) {
    CHECK(serial.points[c].expected_loss == parallel.points[c].expected_loss);
    CHECK(serial.points[c].success_prob == parallel.points[c].success_prob);
    CHECK(serial.stderr_loss[c] == parallel.stderr_loss[c]);
  }
  CHECK_FALSE(serial.degenerate_range);

  const FiniteSumObjective flat("flat", 2, 1, [](std::size_t, std::span<const double>) { return 2.0; },
                                [](std::size_t, std::span<const double>, std::span<double> g) { g[0] = g[1] = 0.0; });
  cfg.fmin = cfg.fmax = 2.0;
  const auto constant = sgdm_ensemble(flat, cfg);
  CHECK(constant.degenerate_range);
  for (const auto& p : constant.points) {
    CHECK(p.expected_loss == 0.0);
    CHECK(p.success_prob == 1.0);
  }
  cfg.runs = 0;
  CHECK_THROWS(sgdm_ensemble(obj, cfg));
}

TEST_CASE("sgdm plateau against an independent long-run simulation") {
  const std::vector<std::vector<double>> centers{{0.5, 0.0}, {-0.5, 0.0}};
  const auto obj = make_convex_quadratic(centers);
  EnsembleConfig cfg;
  cfg.eta = 0.01;
  cfg.steps = 8000;
  cfg.runs = 1000;
  cfg.seed = 11;
  cfg.fmin = 0.125;
  cfg.fmax = 1.125;
  cfg.stride = 8000;
  const auto curves = sgdm_ensemble(obj, cfg);
  const double ours = curves.points.back().expected_loss;
  const double se = curves.stderr_loss.back();
  const double reference = reference_plateau(centers, 0.01, 8000, 100000, 123);
  CHECK(std::abs(ours - reference) <= 4.0 * se + 0.05 * reference);
}
