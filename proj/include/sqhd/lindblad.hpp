#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sqhd/dynamics.hpp"

namespace sqhd {

/// Dense operators of the master equation
///   d rho/dt = u (-i [H, rho]) + s_noise u^2 eta e^{2 chi}/2 ([F,[F,rho]] - (1/m) sum_j [F_j,[F_j,rho]])
/// with H = e^psi K + e^chi F and K = (-Laplacian)/2.
struct GeneratorConfig {
  GridSpec grid{1, 2};
  Schedule schedule;
  double eta = 0.0;
  Eigen::MatrixXd kinetic;
  std::vector<double> potential;
  std::vector<std::vector<double>> components;
  /// W_kl = (F_k - F_l)^2 - (1/m) sum_j (F_jk - F_jl)^2; the noise term is W o rho.
  Eigen::MatrixXd noise_weights;
  double noise_sign = 1.0;
  /// When false u is taken as 1 (the channel compared against Algorithm 1).
  bool apply_rate = true;

  /// Upper bound on the superoperator norm of the generator at time t.
  double norm_bound(double t) const;
};

struct GeneratorOptions {
  KineticSign kinetic_sign = KineticSign::Standard;
  double noise_sign = 1.0;
  bool apply_rate = true;
};

/// Requires at most 256 grid points.
GeneratorConfig make_generator(const FiniteSumObjective& objective, const GridSpec& grid, const Schedule& schedule,
                               double eta, const GeneratorOptions& options = {});

Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho, double t, const GeneratorConfig& gen);

/// gamma_jk = delta_jk / m - 1/m^2.
Eigen::MatrixXd gamma_matrix(std::size_t m);

struct IntegrationStats {
  long steps = 0;
  double max_trace_drift = 0.0;
  double max_hermiticity_residual = 0.0;  // before re-Hermitization
  double min_eigenvalue = 1.0;
};

struct IntegrationResult {
  DensityState state;
  IntegrationStats stats;
};

struct IntegrateOptions {
  /// Eigenvalue check every this many steps (and at the last step); 0 disables.
  long eig_check_stride = 1;
};

/// Fixed-step classical RK4 on [t0, t1] with ceil((t1 - t0)/dt) equal steps,
/// re-Hermitizing after each step. Throws InvariantViolation naming the step
/// if trace drifts by more than 1e-8, the pre-symmetrization Hermiticity
/// residual exceeds 1e-10, or an eigenvalue drops below -1e-8.
IntegrationResult integrate(const DensityState& rho0, double t0, double t1, double dt, const GeneratorConfig& gen,
                            const IntegrateOptions& options = {});

/// Half the trace norm of rho - sigma.
double trace_distance(const DensityState& rho, const DensityState& sigma);

enum class WeakApproxMode {
  Standard,  // Algorithm 1 channel vs the master equation with u = 1
  Adaptive,  // two-factor adaptive channel vs the master equation with u(t)
};

struct WeakApproxOptions {
  WeakApproxMode mode = WeakApproxMode::Standard;
  double dt_fraction = 0.1;       // integrator step = dt_fraction * eta ...
  double stiffness_safety = 0.25;  // ... capped at safety / norm_bound(t)
  double noise_sign = 1.0;
};

struct WeakApproxSeries {
  double eta = 0.0;
  std::vector<double> times;
  std::vector<double> distances;
  double max_distance = 0.0;
  std::string channel_method;
  long integrator_steps = 0;
  double start_time = 0.0;
};

struct WeakApproxReport {
  WeakApproxSeries coarse;  // eta
  WeakApproxSeries fine;    // eta / 2, same total time
  double empirical_order = 0.0;
};

/// Trace distance between the master-equation state at k eta and the
/// discrete channel after k steps, at eta and eta/2.
WeakApproxSeries weak_approx_series(const RunConfig& cfg, const WeakApproxOptions& options = {});
WeakApproxReport weak_approx_report(const RunConfig& cfg, const WeakApproxOptions& options = {});

}  // namespace sqhd
