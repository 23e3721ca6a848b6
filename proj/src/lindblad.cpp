#include "sqhd/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sqhd/errors.hpp"
#include "sqhd/io.hpp"

namespace sqhd {

namespace {

constexpr std::size_t kDenseCap = 256;
constexpr double kEnumerationCap = 100000.0;

}  // namespace

double GeneratorConfig::norm_bound(double t) const {
  const auto v = schedule.at(t);
  const double u = apply_rate ? v.u : 1.0;
  const double kmax = kinetic.cwiseAbs().rowwise().sum().maxCoeff();
  const auto [lo, hi] = std::minmax_element(potential.begin(), potential.end());
  const double hamiltonian = 2.0 * (v.psi_exp * kmax) + v.chi_exp * (*hi - *lo);
  const double noise = u * u * eta * v.chi_exp * v.chi_exp / 2.0 * noise_weights.cwiseAbs().maxCoeff();
  return u * hamiltonian + noise;
}

GeneratorConfig make_generator(const FiniteSumObjective& objective, const GridSpec& grid, const Schedule& schedule,
                               double eta, const GeneratorOptions& options) {
  if (grid.size() > kDenseCap) throw std::invalid_argument("master equation: grid exceeds 256 points");
  GeneratorConfig gen;
  gen.grid = grid;
  gen.schedule = schedule;
  gen.eta = eta;
  gen.kinetic = sign_factor(options.kinetic_sign) * dense_laplacian(grid) / 2.0;
  gen.components = tabulate_components(objective, grid);
  gen.potential = mean_of_tables(gen.components);
  gen.noise_sign = options.noise_sign;
  gen.apply_rate = options.apply_rate;
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double m = static_cast<double>(gen.components.size());
  gen.noise_weights.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      const double df = gen.potential[k] - gen.potential[l];
      double avg = 0.0;
      for (const auto& c : gen.components) avg += (c[k] - c[l]) * (c[k] - c[l]);
      gen.noise_weights(k, l) = df * df - avg / m;
    }
  }
  return gen;
}

Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho, double t, const GeneratorConfig& gen) {
  const auto n = static_cast<Eigen::Index>(gen.grid.size());
  if (rho.rows() != n || rho.cols() != n) throw std::invalid_argument("lindblad_rhs: dimension mismatch");
  const auto v = gen.schedule.at(t);
  const double u = gen.apply_rate ? v.u : 1.0;
  const Complex minus_i(0.0, -1.0);
  Eigen::MatrixXcd commutator = v.psi_exp * (gen.kinetic * rho - rho * gen.kinetic);
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index k = 0; k < n; ++k)
      commutator(k, l) += v.chi_exp * (gen.potential[k] - gen.potential[l]) * rho(k, l);
  const double noise_scale = gen.noise_sign * u * u * gen.eta * v.chi_exp * v.chi_exp / 2.0;
  return (u * minus_i) * commutator + noise_scale * gen.noise_weights.cast<Complex>().cwiseProduct(rho);
}

Eigen::MatrixXd gamma_matrix(std::size_t m) {
  if (m == 0) throw std::invalid_argument("gamma_matrix: m must be >= 1");
  const auto size = static_cast<Eigen::Index>(m);
  const double md = static_cast<double>(m);
  return Eigen::MatrixXd::Identity(size, size) / md - Eigen::MatrixXd::Constant(size, size, 1.0 / (md * md));
}

IntegrationResult integrate(const DensityState& rho0, double t0, double t1, double dt, const GeneratorConfig& gen,
                            const IntegrateOptions& options) {
  if (!(rho0.grid() == gen.grid)) throw std::invalid_argument("integrate: state and generator grids differ");
  if (!(t1 >= t0)) throw std::invalid_argument("integrate: t1 must not precede t0");
  if (gen.schedule.singular_at_zero && !(t0 > 0.0))
    throw std::invalid_argument("integrate: schedule is singular at 0; start at t0 > 0");
  if (!(t0 >= 0.0)) throw std::invalid_argument("integrate: negative start time");
  IntegrationStats stats;
  if (t1 == t0) return {rho0, stats};
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");

  const long steps = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9)));
  const double h = (t1 - t0) / static_cast<double>(steps);
  const Complex trace0 = rho0.matrix().trace();
  Eigen::MatrixXcd rho = rho0.matrix();
  for (long s = 0; s < steps; ++s) {
    const double t = t0 + h * static_cast<double>(s);
    const Eigen::MatrixXcd k1 = lindblad_rhs(rho, t, gen);
    const Eigen::MatrixXcd k2 = lindblad_rhs(rho + (h / 2) * k1, t + h / 2, gen);
    const Eigen::MatrixXcd k3 = lindblad_rhs(rho + (h / 2) * k2, t + h / 2, gen);
    const Eigen::MatrixXcd k4 = lindblad_rhs(rho + h * k3, t + h, gen);
    rho += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double drift = std::abs(rho.trace() - trace0);
    stats.max_hermiticity_residual = std::max(stats.max_hermiticity_residual, herm);
    stats.max_trace_drift = std::max(stats.max_trace_drift, drift);
    const std::string where = " at integration step " + std::to_string(s + 1) + " (t = " + format_double(t + h) + ")";
    if (!std::isfinite(drift) || drift > 1e-8)
      throw InvariantViolation("trace drift " + format_double(drift) + where);
    if (herm > 1e-10) throw InvariantViolation("Hermiticity residual " + format_double(herm) + where);
    const bool check = options.eig_check_stride > 0 && ((s + 1) % options.eig_check_stride == 0 || s + 1 == steps);
    if (check) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
      const double lowest = solver.eigenvalues().minCoeff();
      stats.min_eigenvalue = std::min(stats.min_eigenvalue, lowest);
      if (lowest < -1e-8) throw InvariantViolation("negative eigenvalue " + format_double(lowest) + where);
    }
  }
  stats.steps = steps;
  return {DensityState(gen.grid, std::move(rho)), stats};
}

double trace_distance(const DensityState& rho, const DensityState& sigma) {
  if (rho.matrix().rows() != sigma.matrix().rows() || rho.matrix().cols() != sigma.matrix().cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  const Eigen::MatrixXcd diff = rho.matrix() - sigma.matrix();
  const Eigen::MatrixXcd herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

WeakApproxSeries weak_approx_series(const RunConfig& cfg, const WeakApproxOptions& options) {
  cfg.validate();
  WeakApproxSeries series;
  series.eta = cfg.eta;

  const std::size_t m = cfg.objective->components();
  ChannelPath discrete;
  if (options.mode == WeakApproxMode::Adaptive) {
    discrete = channel_propagate_path(cfg, Layout::TwoFactor);
    series.channel_method = "propagation (two-factor adaptive)";
  } else if (std::pow(static_cast<double>(m), static_cast<double>(cfg.steps)) <= kEnumerationCap &&
             cfg.grid.size() <= kDenseCap) {
    discrete = channel_average_path(cfg);
    series.channel_method = "enumeration";
  } else {
    discrete = channel_propagate_path(cfg, Layout::Strang);
    series.channel_method = "propagation";
  }

  GeneratorOptions gopts;
  gopts.kinetic_sign = cfg.kinetic_sign;
  gopts.noise_sign = options.noise_sign;
  gopts.apply_rate = options.mode == WeakApproxMode::Adaptive;
  const GeneratorConfig gen = make_generator(*cfg.objective, cfg.grid, cfg.schedule, cfg.eta, gopts);

  // Schedules singular at 0 start the continuous clock half a step in.
  series.start_time = cfg.schedule.singular_at_zero ? cfg.eta / 2.0 : 0.0;
  DensityState continuous = discrete.states.front();
  double t = series.start_time;
  IntegrateOptions iopts;
  iopts.eig_check_stride = 0;
  for (std::size_t c = 0; c < discrete.iterations.size(); ++c) {
    const double target = static_cast<double>(discrete.iterations[c]) * cfg.eta;
    // Advance one eta-chunk at a time so the step tracks the generator norm.
    while (target - t > 1e-12 * cfg.eta) {
      const double next = std::min(target, (std::floor(t / cfg.eta + 1e-9) + 1.0) * cfg.eta);
      const double bound = std::max(gen.norm_bound(t), gen.norm_bound(next));
      const double dt = std::min(options.dt_fraction * cfg.eta, options.stiffness_safety / bound);
      auto result = integrate(continuous, t, next, dt, gen, iopts);
      series.integrator_steps += result.stats.steps;
      continuous = std::move(result.state);
      t = next;
    }
    t = std::max(t, target);
    const double distance = trace_distance(continuous, discrete.states[c]);
    series.times.push_back(target);
    series.distances.push_back(distance);
    series.max_distance = std::max(series.max_distance, distance);
  }
  return series;
}

WeakApproxReport weak_approx_report(const RunConfig& cfg, const WeakApproxOptions& options) {
  WeakApproxReport report;
  report.coarse = weak_approx_series(cfg, options);
  RunConfig half = cfg;
  half.eta = cfg.eta / 2.0;
  half.steps = cfg.steps * 2;
  half.checkpoint_stride = cfg.checkpoint_stride * 2;
  report.fine = weak_approx_series(half, options);
  report.empirical_order = std::log2(report.coarse.max_distance / report.fine.max_distance);
  return report;
}

}  // namespace sqhd
