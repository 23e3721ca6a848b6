#include <stdexcept>
#include <doctest.h>

#include <memory>

#include "helpers.hpp"
#include "sqhd/dynamics.hpp"
#include "sqhd/lindblad.hpp"
#include "sqhd/validation.hpp"

using namespace sqhd;

namespace {

RunConfig small_config(std::vector<std::vector<double>> centers, int n_r, double eta, long steps) {
  RunConfig cfg;
  cfg.objective = std::make_shared<FiniteSumObjective>(make_convex_quadratic(centers));
  cfg.schedule = sgdm_schedule();
  cfg.grid = GridSpec(static_cast<int>(centers.front().size()), n_r);
  cfg.eta = eta;
  cfg.steps = steps;
  const auto land = landscape(*cfg.objective, cfg.grid);
  cfg.fmin = land.fmin;
  cfg.fmax = land.fmax;
  return cfg;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("sqhd_step special cases") {
  const GridSpec g(1, 8);
  const auto s = testing::random_state(g, 1);
  std::vector<double> f(g.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::sin(3.0 * k);

  const auto no_potential = sqhd_step(s, 2.0, 0.0, 0.1, f);
  const auto kinetic = apply_kinetic_phase(s, 0.1 * 2.0);
  CHECK((testing::as_vector(no_potential) - testing::as_vector(kinetic)).norm() <= 1e-12);

  const auto no_kinetic = sqhd_step(s, 0.0, 3.0, 0.1, f);
  CHECK(max_abs_diff(no_kinetic.probabilities(), s.probabilities()) <= 1e-15);
  CHECK(std::abs(sqhd_step(s, 1e5, 7.0, 0.3, f).norm() - 1.0) <= 1e-12);
  CHECK_THROWS(sqhd_step(s, INFINITY, 1.0, 0.1, f));
  CHECK_THROWS(sqhd_step(s, 1.0, std::nan(""), 0.1, f));
}

TEST_CASE("sqhd_step matches the dense product") {
  const GridSpec g(1, 4);
  const auto s = testing::random_state(g, 2);
  const std::vector<double> f{0.3, -1.2, 0.7, 2.0};
  const double a = 1.7, b = 0.6, eta = 0.2;
  const Eigen::MatrixXcd k = dense_laplacian(g).cast<Complex>() / 2.0;
  const Eigen::MatrixXcd half = testing::unitary_exp(k, eta * a / 2.0);
  const Eigen::MatrixXcd p = testing::unitary_exp(testing::diagonal(f), eta * b);
  const Eigen::VectorXcd oracle = half * p * half * testing::as_vector(s);
  CHECK((testing::as_vector(sqhd_step(s, a, b, eta, f)) - oracle).norm() <= 1e-9);
}

TEST_CASE("run_sqhd with m = 1 reproduces run_qhd") {
  auto cfg = small_config({{0.3, -0.2}}, 16, 0.02, 300);
  cfg.checkpoint_stride = 10;
  const auto s = run_sqhd(cfg);
  const auto q = run_qhd(cfg);
  REQUIRE(s.points.size() == q.points.size());
  for (std::size_t c = 0; c < s.points.size(); ++c) {
    CHECK(s.points[c].expected_loss == q.points[c].expected_loss);
    CHECK(s.points[c].success_prob == q.points[c].success_prob);
  }
  CHECK(s.final_distribution == q.final_distribution);
}

TEST_CASE("zero iterations report the initial state") {
  auto cfg = small_config({{0.5}, {-0.5}}, 8, 0.1, 0);
  const auto tables = tabulate_components(*cfg.objective, cfg.grid);
  const auto f = mean_of_tables(tables);
  double mean = 0.0;
  for (double v : f) mean += v / static_cast<double>(f.size());
  for (const auto& t : {run_sqhd(cfg), run_qhd(cfg), run_adaptive_sqhd(cfg)}) {
    REQUIRE(t.points.size() == 1);
    CHECK(t.points[0].time == 0.0);
    CHECK(t.points[0].expected_loss == doctest::Approx(mean - cfg.fmin).epsilon(1e-13));
  }
}

TEST_CASE("run_sqhd_sample replays through sqhd_step") {
  auto cfg = small_config({{0.5}, {-0.5}}, 4, 0.1, 3);
  Rng rng(42);
  const auto run = run_sqhd_sample(cfg, rng);
  REQUIRE(run.xi.size() == 3);
  const auto tables = tabulate_components(*cfg.objective, cfg.grid);
  WaveState psi = uniform_state(cfg.grid);
  for (long j = 0; j < 3; ++j) {
    const auto p = discrete_params(cfg.schedule, cfg.eta, j);
    psi = sqhd_step(psi, p.a, p.b, cfg.eta, tables[run.xi[j]]);
  }
  CHECK((testing::as_vector(psi) - testing::as_vector(run.state)).norm() <= 1e-12);
  CHECK((testing::as_vector(evolve_strang(cfg, run.xi)) - testing::as_vector(run.state)).norm() == 0.0);
}

TEST_CASE("seed determinism and checkpoints") {
  auto cfg = small_config({{0.5, 0.1}, {-0.5, 0.2}, {0.0, -0.7}}, 8, 0.05, 103);
  cfg.checkpoint_stride = 25;
  cfg.samples = 4;
  cfg.seed = 77;
  const auto a = run_sqhd(cfg);
  cfg.threads = 3;
  const auto b = run_sqhd(cfg);
  CHECK(a.iterations == std::vector<long>{0, 25, 50, 75, 100, 103});
  for (std::size_t c = 0; c < a.points.size(); ++c) {
    CHECK(a.points[c].expected_loss == b.points[c].expected_loss);
    CHECK(a.points[c].success_prob == b.points[c].success_prob);
    CHECK(a.stderr_loss[c] == b.stderr_loss[c]);
    CHECK(a.points[c].expected_loss >= 0.0);
    CHECK(a.points[c].success_prob >= 0.0);
    CHECK(a.points[c].success_prob <= 1.0);
  }
  CHECK(a.measured_points == b.measured_points);
  cfg.seed = 78;
  CHECK(run_sqhd(cfg).points.back().expected_loss != a.points.back().expected_loss);
}

TEST_CASE("norm preservation over long runs") {
  auto cfg = small_config({{0.5, 0.1}, {-0.5, 0.2}}, 32, 0.01, 8000);
  cfg.checkpoint_stride = 100;
  CHECK(run_sqhd(cfg).max_norm_deviation <= 1e-10);
  cfg.schedule = nagd_schedule();
  CHECK(run_qhd(cfg).max_norm_deviation <= 1e-10);
}

TEST_CASE("run_qhd on a constant objective keeps the uniform distribution") {
  RunConfig cfg;
  cfg.objective = std::make_shared<FiniteSumObjective>(
      "flat", 2, 1, [](std::size_t, std::span<const double>) { return 1.0; },
      [](std::size_t, std::span<const double>, std::span<double> g) { g[0] = g[1] = 0.0; });
  cfg.schedule = nagd_schedule();
  cfg.grid = GridSpec(2, 8);
  cfg.eta = 0.05;
  cfg.steps = 200;
  cfg.checkpoint_stride = 20;
  cfg.fmin = cfg.fmax = 1.0;
  const auto t = run_qhd(cfg);
  for (double p : t.final_distribution) CHECK(p == doctest::Approx(1.0 / 64).epsilon(1e-12));
  for (const auto& m : t.points) {
    CHECK(m.success_prob == 1.0);
    CHECK(std::abs(m.expected_loss) <= 1e-12);
  }
}

TEST_CASE("run_qhd expected loss decreases after the initial transient") {
  auto cfg = small_config({{0.4}}, 8, 0.01, 1000);
  cfg.schedule = nagd_schedule();
  cfg.checkpoint_stride = 10;
  const auto t = run_qhd(cfg);
  for (std::size_t c = 11; c < t.points.size(); ++c)
    REQUIRE(t.points[c].expected_loss <= t.points[c - 1].expected_loss + 1e-3);
  CHECK(t.points.back().expected_loss < t.points[10].expected_loss);
}

TEST_CASE("adaptive variant") {
  // u = 1/2 equals u = 1 with halved steps on the unchanged midpoint clock.
  auto cfg = small_config({{0.2}}, 16, 0.05, 60);
  const auto half_rate = run_adaptive_sqhd(cfg);
  const std::vector<double> steps(60, 0.025);
  const std::vector<std::size_t> xi(60, 0);
  auto unit = cfg;
  unit.schedule = cfg.schedule.with_unit_rate();
  const auto direct = evolve_two_factor(unit, steps, xi);
  CHECK(max_abs_diff(half_rate.final_distribution, direct.probabilities()) == 0.0);

  // Two-factor vs Strang with constant coefficients: exactly a trailing
  // kinetic half step apart, so the gap shrinks linearly in eta.
  auto c = small_config({{0.5}, {-0.5}}, 16, 0.1, 10);
  c.schedule = constant_schedule(1.0, 1.0, 1.0);
  const std::vector<std::size_t> seq{0, 1, 1, 0, 1, 0, 0, 1, 1, 1};
  const auto strang = evolve_strang(c, seq);
  const std::vector<double> unit_steps(seq.size(), c.eta);
  const auto two = evolve_two_factor(c, unit_steps, seq);
  const auto identity = apply_kinetic_phase(strang, c.eta / 2.0);
  CHECK((testing::as_vector(two) - testing::as_vector(identity)).norm() <= 1e-12);

  auto gap = [&](double eta) {
    auto cc = small_config({{0.5}, {-0.5}}, 4, eta, std::lround(1.0 / eta));
    cc.schedule = constant_schedule(1.0, 1.0, 1.0);
    const auto a = channel_propagate_path(cc, Layout::Strang).states.back();
    const auto b = channel_propagate_path(cc, Layout::TwoFactor).states.back();
    return trace_distance(a, b);
  };
  const double ratio = gap(0.02) / gap(0.01);
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.4);
}

TEST_CASE("channel average small cases") {
  auto single = small_config({{0.3}}, 8, 0.1, 5);
  const auto rho = channel_average(single);
  Rng rng(1);
  const auto psi = run_sqhd_sample(single, rng).state;
  const Eigen::VectorXcd v = testing::as_vector(psi);
  CHECK((rho.matrix() - v * v.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);

  auto pair = small_config({{0.5}, {-0.5}}, 4, 0.1, 1);
  const auto one = channel_average(pair);
  const Eigen::VectorXcd u1 = testing::as_vector(evolve_strang(pair, std::vector<std::size_t>{0}));
  const Eigen::VectorXcd u2 = testing::as_vector(evolve_strang(pair, std::vector<std::size_t>{1}));
  const Eigen::MatrixXcd oracle = 0.5 * (u1 * u1.adjoint() + u2 * u2.adjoint());
  CHECK((one.matrix() - oracle).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(std::abs(one.matrix().trace() - 1.0) <= 1e-14);

  auto big = small_config({{0.5}, {-0.5}}, 4, 0.1, 17);
  CHECK_THROWS(channel_average(big));
  auto wide = small_config({{0.5, 0.0}, {-0.5, 0.0}}, 32, 0.1, 1);
  CHECK_THROWS(channel_average(wide));
}

TEST_CASE("channel average invariants and the propagation route") {
  auto cfg = small_config({{0.5}, {-0.5}, {0.1}}, 8, 0.07, 7);
  cfg.checkpoint_stride = 2;
  const auto enumerated = channel_average_path(cfg);
  const auto propagated = channel_propagate_path(cfg);
  REQUIRE(enumerated.iterations == propagated.iterations);
  for (std::size_t c = 0; c < enumerated.states.size(); ++c) {
    const auto r = enumerated.states[c].residuals();
    CHECK(r.hermiticity <= 1e-10);
    CHECK(r.trace_error <= 1e-10);
    CHECK(r.min_eigenvalue >= -1e-10);
    CHECK((enumerated.states[c].matrix() - propagated.states[c].matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("channel average against Monte-Carlo sampling") {
  const auto cfg = oracle_config();
  const double distance = trace_distance(channel_average(cfg), monte_carlo_density(cfg, 10000, 3));
  CHECK(distance <= 0.03);
}
