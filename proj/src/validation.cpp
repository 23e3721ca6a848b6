#include "sqhd/validation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "sqhd/errors.hpp"
#include "sqhd/experiment.hpp"
#include "sqhd/parallel.hpp"

namespace sqhd {

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<std::string> SuiteReport::failing() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.id);
  return out;
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks)
    list.push_back({{"id", c.id}, {"passed", c.passed}, {"value", c.value}, {"requirement", c.requirement}});
  return {{"suite", suite}, {"passed", passed()}, {"failing", failing()}, {"checks", list}, {"details", details}};
}

std::vector<std::string> validation_suites() { return {"invariants", "oracle", "order"}; }

namespace {

std::shared_ptr<const FiniteSumObjective> two_center_quadratic() {
  return std::make_shared<FiniteSumObjective>(make_convex_quadratic({{-0.5}, {0.5}}));
}

CheckResult at_most(const std::string& id, double value, double bound, const std::string& text) {
  return {id, std::isfinite(value) && value <= bound, value, "<= " + text};
}

CheckResult at_least(const std::string& id, double value, double bound, const std::string& text) {
  return {id, std::isfinite(value) && value >= bound, value, ">= " + text};
}

void invariants(SuiteReport& report, std::uint64_t seed, int threads) {
  RunConfig cfg;
  cfg.objective = std::make_shared<FiniteSumObjective>(make_dw(0.7));
  cfg.schedule = sgdm_schedule();
  cfg.grid = GridSpec(2, 16);
  cfg.eta = 0.01;
  cfg.steps = 400;
  cfg.checkpoint_stride = 20;
  cfg.samples = 2;
  cfg.seed = seed;
  cfg.threads = threads;
  const auto land = landscape(*cfg.objective, cfg.grid);
  cfg.fmin = land.fmin;
  cfg.fmax = land.fmax;
  report.checks.push_back(at_most("norm.sqhd", run_sqhd(cfg).max_norm_deviation, 1e-10, "1e-10"));
  RunConfig qhd = cfg;
  qhd.schedule = nagd_schedule();
  report.checks.push_back(at_most("norm.qhd", run_qhd(qhd).max_norm_deviation, 1e-10, "1e-10"));
  report.checks.push_back(at_most("norm.sqhd_adaptive", run_adaptive_sqhd(cfg).max_norm_deviation, 1e-10, "1e-10"));

  const auto ch = channel_average(oracle_config());
  const auto res = ch.residuals();
  report.checks.push_back(at_most("channel.trace", res.trace_error, 1e-10, "1e-10"));
  report.checks.push_back(at_least("channel.min_eigenvalue", res.min_eigenvalue, -1e-10, "-1e-10"));

  const auto slice = make_slice(make_sino(SinoVariant::Sino, 0), {0.0});
  const GridSpec grid(1, 8);
  const auto gen = make_generator(slice, grid, log_scaling_schedule(2.0, 1.0), 0.01);
  const auto mixed = DensityState::maximally_mixed(grid);
  report.checks.push_back(at_most("lindblad.rhs_maximally_mixed", lindblad_rhs(mixed.matrix(), 0.5, gen).cwiseAbs().maxCoeff(),
                                  1e-12, "1e-12"));
  try {
    const auto run = integrate(DensityState::pure(uniform_state(grid)), 0.0, 1.0, 1e-3, gen);
    report.checks.push_back(at_most("lindblad.trace_drift", run.stats.max_trace_drift, 1e-8, "1e-8"));
    report.checks.push_back(at_most("lindblad.hermiticity", run.stats.max_hermiticity_residual, 1e-10, "1e-10"));
    report.checks.push_back(at_least("lindblad.min_eigenvalue", run.stats.min_eigenvalue, -1e-8, "-1e-8"));
  } catch (const InvariantViolation& e) {
    report.checks.push_back({"lindblad.integrate", false, NAN, e.what()});
  }

  double gamma_min = 1.0;
  for (std::size_t m = 1; m <= 16; ++m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gamma_matrix(m), Eigen::EigenvaluesOnly);
    gamma_min = std::min(gamma_min, solver.eigenvalues().minCoeff());
  }
  report.checks.push_back(at_least("gamma.psd", gamma_min, -1e-12, "-1e-12"));
}

}  // namespace

RunConfig oracle_config() {
  RunConfig cfg;
  cfg.objective = two_center_quadratic();
  cfg.schedule = sgdm_schedule();
  cfg.grid = GridSpec(1, 4);
  cfg.eta = 0.1;
  cfg.steps = 3;
  cfg.checkpoint_stride = 1;
  return cfg;
}

DensityState monte_carlo_density(const RunConfig& cfg, long samples, std::uint64_t seed, int threads) {
  if (samples < 1) throw std::invalid_argument("monte_carlo_density: samples must be >= 1");
  const auto n = static_cast<Eigen::Index>(cfg.grid.size());
  std::vector<Eigen::VectorXcd> states(static_cast<std::size_t>(samples));
  parallel_for(states.size(), threads, [&](std::size_t s) {
    Rng rng(derive_seed(seed, s));
    const auto run = run_sqhd_sample(cfg, rng);
    const auto amps = run.state.amplitudes();
    states[s] = Eigen::Map<const Eigen::VectorXcd>(amps.data(), n);
  });
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& v : states) rho += v * v.adjoint();
  rho /= static_cast<double>(samples);
  return DensityState(cfg.grid, rho);
}

RunConfig order_config(double eta) {
  RunConfig cfg;
  cfg.objective = two_center_quadratic();
  cfg.schedule = log_scaling_schedule(2.0, 1.0);
  cfg.grid = GridSpec(1, 4);
  cfg.eta = eta;
  cfg.steps = std::lround(0.4 / eta);
  cfg.checkpoint_stride = 1;
  return cfg;
}

SuiteReport run_validation(const std::string& suite, std::uint64_t seed, int threads) {
  SuiteReport report;
  report.suite = suite;
  if (suite == "invariants") {
    invariants(report, seed, threads);
  } else if (suite == "oracle") {
    const auto cfg = oracle_config();
    const auto exact = channel_average(cfg);
    const auto mc = monte_carlo_density(cfg, 10000, seed, threads);
    report.checks.push_back(at_most("oracle.trace_distance", trace_distance(exact, mc), 0.03, "0.03"));
    report.details = {{"samples", 10000}, {"n_r", 4}, {"m", 2}, {"N", 3}};
  } else if (suite == "order") {
    const auto r = weak_approx_report(order_config(0.05));
    const bool in_range = r.empirical_order >= 1.5 && r.empirical_order <= 2.5;
    report.checks.push_back({"order.empirical", in_range, r.empirical_order, "in [1.5, 2.5]"});
    report.details = weak_report_json(r);
  } else {
    throw std::invalid_argument("unknown validation suite '" + suite + "'");
  }
  return report;
}

}  // namespace sqhd
