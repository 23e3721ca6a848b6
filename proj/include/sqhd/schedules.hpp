#pragma once

#include <functional>
#include <string>
#include <vector>

namespace sqhd {

/// Time-dependent coefficients of H(t) = e^psi(t) (-Laplacian/2) + e^chi(t) f
/// and the learning-rate schedule u(t) in [0, 1].
struct Schedule {
  std::string name;
  std::function<double(double)> psi_exp;  // e^{psi(t)}
  std::function<double(double)> chi_exp;  // e^{chi(t)}
  std::function<double(double)> u;
  bool singular_at_zero = false;

  struct Values {
    double psi_exp;
    double chi_exp;
    double u;
  };

  /// Throws std::domain_error at t <= 0 for schedules singular at zero.
  Values at(double t) const;

  /// Same coefficients with u replaced by 1.
  Schedule with_unit_rate() const;
};

/// e^psi = 2 t^-3, e^chi = 2 t^3, u = 1.
Schedule nagd_schedule();

/// e^psi = t^-2, e^chi = 2 t, u = 1/2.
Schedule sgdm_schedule();

/// Constant coefficients; used by tests and sensitivity runs.
Schedule constant_schedule(double psi_exp, double chi_exp, double u = 1.0);

/// Exponents alpha, beta, gamma and the derivatives of beta and gamma.
struct ScalingFunctions {
  std::function<double(double)> alpha;
  std::function<double(double)> beta;
  std::function<double(double)> gamma;
  std::function<double(double)> beta_dot;
  std::function<double(double)> gamma_dot;
};

/// psi = alpha - gamma, chi = alpha + beta + gamma, u = e^{-(alpha + beta)}.
/// Checks beta' = gamma' = e^alpha at 50 times in (0, horizon] through the
/// supplied derivatives and through central differences; throws
/// std::invalid_argument on a violation beyond 1e-6.
Schedule strong_ideal_scaling(const ScalingFunctions& f, double horizon = 10.0, std::string name = "strong-ideal");

/// alpha = -log(t + t_eps), beta = log(t + t_eps) + log C, gamma = log(t + t_eps).
/// Gives e^psi = (t + t_eps)^-2, e^chi = C (t + t_eps), u = 1/C.
Schedule log_scaling_schedule(double c, double t_eps);

struct DiscreteParams {
  double a;  // e^{psi((j + 1/2) eta)}
  double b;  // e^{chi((j + 1/2) eta)}
};

/// Midpoint coefficients of iteration j. A positive `clamp` caps a and b
/// (off by default); non-finite values throw std::domain_error.
DiscreteParams discrete_params(const Schedule& schedule, double eta, long j, double clamp = 0.0);

/// eta_j = u((2j+1) eta / 2) * eta for j = 0..N-1.
std::vector<double> adaptive_steps(const Schedule& schedule, double eta, long steps);

/// nagd, sgdm-style, or strong-ideal (C, t_eps).
Schedule make_schedule(const std::string& name, double c = 2.0, double t_eps = 0.01);

std::vector<std::string> schedule_names();

}  // namespace sqhd
