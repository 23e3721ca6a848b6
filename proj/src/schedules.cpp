#include "sqhd/schedules.hpp"

#include <cmath>
#include <stdexcept>

#include "sqhd/io.hpp"

namespace sqhd {

Schedule::Values Schedule::at(double t) const {
  if (singular_at_zero && !(t > 0.0))
    throw std::domain_error("schedule '" + name + "' is singular at t <= 0 (t = " + format_double(t) + ")");
  return {psi_exp(t), chi_exp(t), u(t)};
}

Schedule Schedule::with_unit_rate() const {
  Schedule out = *this;
  out.u = [](double) { return 1.0; };
  return out;
}

Schedule nagd_schedule() {
  return {"nagd", [](double t) { return 2.0 / (t * t * t); }, [](double t) { return 2.0 * t * t * t; },
          [](double) { return 1.0; }, true};
}

Schedule sgdm_schedule() {
  return {"sgdm-style", [](double t) { return 1.0 / (t * t); }, [](double t) { return 2.0 * t; },
          [](double) { return 0.5; }, true};
}

Schedule constant_schedule(double psi_exp, double chi_exp, double u) {
  return {"constant", [psi_exp](double) { return psi_exp; }, [chi_exp](double) { return chi_exp; },
          [u](double) { return u; }, false};
}

Schedule strong_ideal_scaling(const ScalingFunctions& f, double horizon, std::string name) {
  if (!(horizon > 0.0)) throw std::invalid_argument("strong_ideal_scaling: horizon must be positive");
  constexpr int samples = 50;
  constexpr double tol = 1e-6;
  for (int i = 1; i <= samples; ++i) {
    const double t = horizon * i / samples;
    const double target = std::exp(f.alpha(t));
    const double h = 1e-5 * std::max(1.0, t);
    const double beta_fd = (f.beta(t + h) - f.beta(t - h)) / (2.0 * h);
    const double gamma_fd = (f.gamma(t + h) - f.gamma(t - h)) / (2.0 * h);
    const double scale = std::max(1.0, std::abs(target));
    for (double got : {f.beta_dot(t), f.gamma_dot(t), beta_fd, gamma_fd}) {
      if (!(std::abs(got - target) <= tol * scale))
        throw std::invalid_argument("strong ideal scaling violated at t = " + format_double(t) + ": derivative " +
                                    format_double(got) + " vs e^alpha = " + format_double(target));
    }
  }
  Schedule s;
  s.name = std::move(name);
  s.psi_exp = [f](double t) { return std::exp(f.alpha(t) - f.gamma(t)); };
  s.chi_exp = [f](double t) { return std::exp(f.alpha(t) + f.beta(t) + f.gamma(t)); };
  s.u = [f](double t) { return std::exp(-(f.alpha(t) + f.beta(t))); };
  return s;
}

Schedule log_scaling_schedule(double c, double t_eps) {
  if (!(c > 1.0)) throw std::invalid_argument("log_scaling_schedule: C must exceed 1");
  if (!(t_eps > 0.0)) throw std::invalid_argument("log_scaling_schedule: t_eps must be positive");
  ScalingFunctions f;
  f.alpha = [t_eps](double t) { return -std::log(t + t_eps); };
  f.beta = [t_eps, c](double t) { return std::log(t + t_eps) + std::log(c); };
  f.gamma = [t_eps](double t) { return std::log(t + t_eps); };
  f.beta_dot = [t_eps](double t) { return 1.0 / (t + t_eps); };
  f.gamma_dot = f.beta_dot;
  Schedule s = strong_ideal_scaling(f, 10.0, "strong-ideal(C=" + format_double(c) + ",t_eps=" + format_double(t_eps) + ")");
  // Closed forms avoid exp(log(.)) rounding.
  s.psi_exp = [t_eps](double t) { return 1.0 / ((t + t_eps) * (t + t_eps)); };
  s.chi_exp = [t_eps, c](double t) { return c * (t + t_eps); };
  s.u = [c](double) { return 1.0 / c; };
  return s;
}

DiscreteParams discrete_params(const Schedule& schedule, double eta, long j, double clamp) {
  if (!(eta > 0.0)) throw std::invalid_argument("discrete_params: eta must be positive");
  if (j < 0) throw std::invalid_argument("discrete_params: negative iteration");
  const auto v = schedule.at((static_cast<double>(j) + 0.5) * eta);
  DiscreteParams p{v.psi_exp, v.chi_exp};
  if (!std::isfinite(p.a) || !std::isfinite(p.b))
    throw std::domain_error("discrete_params: non-finite coefficient at iteration " + std::to_string(j));
  if (clamp > 0.0) {
    p.a = std::min(p.a, clamp);
    p.b = std::min(p.b, clamp);
  }
  return p;
}

std::vector<double> adaptive_steps(const Schedule& schedule, double eta, long steps) {
  if (steps < 1) throw std::invalid_argument("adaptive_steps: need at least one step");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (long j = 0; j < steps; ++j) out[j] = schedule.at((2.0 * j + 1.0) * eta / 2.0).u * eta;
  return out;
}

Schedule make_schedule(const std::string& name, double c, double t_eps) {
  if (name == "nagd") return nagd_schedule();
  if (name == "sgdm-style") return sgdm_schedule();
  if (name == "strong-ideal") return log_scaling_schedule(c, t_eps);
  throw std::invalid_argument("unknown schedule '" + name + "'");
}

std::vector<std::string> schedule_names() { return {"nagd", "sgdm-style", "strong-ideal"}; }

}  // namespace sqhd
