#include <stdexcept>
#include <doctest.h>

#include <memory>

#include "helpers.hpp"
#include "sqhd/errors.hpp"
#include "sqhd/lindblad.hpp"

using namespace sqhd;

namespace {

Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return a * b - b * a; }

/// Hamiltonian part plus the noise term in the form sum_jk gamma_jk (A_j rho A_k^+ - {A_k^+ A_j, rho}/2),
/// A_j = u sqrt(eta) e^chi F_j.
Eigen::MatrixXcd jump_form(const Eigen::MatrixXcd& rho, double t, const FiniteSumObjective& obj, const GridSpec& g,
                           const Schedule& s, double eta) {
  const auto v = s.at(t);
  const auto tables = tabulate_components(obj, g);
  const std::size_t m = tables.size();
  const Eigen::MatrixXcd k = dense_laplacian(g).cast<Complex>() / 2.0;
  const Eigen::MatrixXcd h = v.psi_exp * k + v.chi_exp * testing::diagonal(mean_of_tables(tables));
  Eigen::MatrixXcd out = Complex(0.0, -v.u) * commutator(h, rho);
  const double c = v.u * std::sqrt(eta) * v.chi_exp;
  const auto gamma = gamma_matrix(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Eigen::MatrixXcd aj = c * testing::diagonal(tables[j]);
    for (std::size_t l = 0; l < m; ++l) {
      const Eigen::MatrixXcd al = c * testing::diagonal(tables[l]);
      const Eigen::MatrixXcd prod = al.adjoint() * aj;
      out += gamma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) *
             (aj * rho * al.adjoint() - 0.5 * (prod * rho + rho * prod));
    }
  }
  return out;
}

/// Full-rank state, so RK4 truncation cannot push an eigenvalue below zero.
DensityState blended(const GridSpec& g, unsigned seed) {
  const auto pure = DensityState::pure(testing::random_state(g, seed));
  const auto n = static_cast<Eigen::Index>(g.size());
  const Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(n);
  return DensityState(g, 0.7 * pure.matrix() + 0.3 * mixed);
}

std::shared_ptr<FiniteSumObjective> random_sum(std::size_t m, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::array<double, 3>> coeff(m);
  for (auto& c : coeff)
    for (auto& x : c) x = u(gen);
  return std::make_shared<FiniteSumObjective>(
      "random", 1, m,
      [coeff](std::size_t j, std::span<const double> x) {
        return coeff[j][0] + coeff[j][1] * x[0] + coeff[j][2] * std::sin(3.0 * x[0]);
      },
      [coeff](std::size_t j, std::span<const double> x, std::span<double> g) {
        g[0] = coeff[j][1] + 3.0 * coeff[j][2] * std::cos(3.0 * x[0]);
      });
}

DensityState evolve_unitary_oracle(const DensityState& rho0, double t0, double t1, double h, const GeneratorConfig& gen) {
  // Fourth-order commutator-free Magnus steps on the time-dependent Hamiltonian u(t) H(t).
  const double r3 = std::sqrt(3.0);
  const double c1 = 0.5 - r3 / 6.0, c2 = 0.5 + r3 / 6.0;
  const double a1 = (3.0 - 2.0 * r3) / 12.0, a2 = (3.0 + 2.0 * r3) / 12.0;
  auto ham = [&](double t) {
    const auto v = gen.schedule.at(t);
    const Eigen::MatrixXcd hh = v.psi_exp * gen.kinetic.cast<Complex>() + v.chi_exp * testing::diagonal(gen.potential);
    return Eigen::MatrixXcd(v.u * hh);
  };
  const long steps = std::lround((t1 - t0) / h);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(rho0.matrix().rows(), rho0.matrix().cols());
  for (long s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    const auto h1 = ham(t + c1 * h), h2 = ham(t + c2 * h);
    u = testing::unitary_exp(a1 * h1 + a2 * h2, h) * testing::unitary_exp(a2 * h1 + a1 * h2, h) * u;
  }
  return DensityState(rho0.grid(), u * rho0.matrix() * u.adjoint());
}

}  // namespace

TEST_CASE("gamma matrix is PSD") {
  for (std::size_t m = 1; m <= 16; ++m) {
    const auto g = gamma_matrix(m);
    CHECK(g(0, 0) == doctest::Approx(1.0 / m - 1.0 / (m * m)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g);
    CHECK(solver.eigenvalues().minCoeff() >= -1e-12);
  }
  CHECK_THROWS(gamma_matrix(0));
}

TEST_CASE("rhs special cases") {
  const GridSpec g(1, 8);
  const auto obj = random_sum(3, 1);
  const auto sched = log_scaling_schedule(2.0, 1.0);
  GeneratorOptions unit;
  unit.apply_rate = false;
  const auto gen0 = make_generator(*obj, g, sched, 0.0, unit);
  const Eigen::MatrixXcd rho = testing::random_hermitian(8, 4);
  const auto v = sched.at(0.7);
  const Eigen::MatrixXcd h = v.psi_exp * gen0.kinetic.cast<Complex>() + v.chi_exp * testing::diagonal(gen0.potential);
  CHECK((lindblad_rhs(rho, 0.7, gen0) - Complex(0, -1) * commutator(h, rho)).cwiseAbs().maxCoeff() <= 1e-12);

  const auto gen = make_generator(*obj, g, sched, 0.1);
  const auto mixed = DensityState::maximally_mixed(g).matrix();
  CHECK(lindblad_rhs(mixed, 0.7, gen).cwiseAbs().maxCoeff() <= 1e-15);
  const Eigen::MatrixXcd out = lindblad_rhs(rho, 0.7, gen);
  CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs(out.trace()) <= 1e-12);

  CHECK_THROWS(make_generator(make_convex_quadratic({{0.1, 0.1}}), GridSpec(2, 32), sched, 0.1));
  CHECK_THROWS(lindblad_rhs(Eigen::MatrixXcd::Identity(4, 4), 0.7, gen));
  const auto singular = make_generator(*obj, g, sgdm_schedule(), 0.1);
  CHECK_THROWS(lindblad_rhs(rho, 0.0, singular));
}

TEST_CASE("rhs matches the jump-operator form") {
  for (int n : {2, 4, 8}) {
    for (std::size_t m : {1, 2, 3, 4}) {
      const GridSpec g(1, n);
      const auto obj = random_sum(m, static_cast<unsigned>(10 * n + m));
      const auto sched = constant_schedule(1.3, 0.8, 0.6);
      const double eta = 0.05;
      const auto gen = make_generator(*obj, g, sched, eta);
      for (unsigned trial = 0; trial < 3; ++trial) {
        const Eigen::MatrixXcd rho = testing::random_hermitian(n, trial + 100 * n);
        const Eigen::MatrixXcd diff = lindblad_rhs(rho, 0.4, gen) - jump_form(rho, 0.4, *obj, g, sched, eta);
        REQUIRE(diff.cwiseAbs().maxCoeff() <= 1e-10);
      }
    }
  }
}

TEST_CASE("trace distance") {
  const GridSpec g(1, 2);
  const auto a = DensityState::pure(basis_state(g, 0));
  const auto b = DensityState::pure(basis_state(g, 1));
  CHECK(trace_distance(a, a) == 0.0);
  CHECK(trace_distance(a, b) == doctest::Approx(1.0).epsilon(1e-14));
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2), q = Eigen::MatrixXcd::Zero(2, 2);
  p(0, 0) = 0.7;
  p(1, 1) = 0.3;
  q(0, 0) = q(1, 1) = 0.5;
  CHECK(trace_distance(DensityState(g, p), DensityState(g, q)) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK_THROWS(trace_distance(a, DensityState::maximally_mixed(GridSpec(1, 4))));
}

TEST_CASE("integrate basics") {
  const GridSpec g(1, 4);
  const auto obj = random_sum(2, 3);
  const auto gen = make_generator(*obj, g, log_scaling_schedule(2.0, 1.0), 0.05);
  const auto rho = DensityState::pure(testing::random_state(g, 5));
  const auto same = integrate(rho, 0.3, 0.3, 0.01, gen);
  CHECK(same.state.matrix() == rho.matrix());
  CHECK(same.stats.steps == 0);
  CHECK_THROWS(integrate(rho, 0.5, 0.3, 0.01, gen));
  CHECK_THROWS(integrate(rho, 0.0, 0.3, 0.0, gen));
  const auto singular = make_generator(*obj, g, sgdm_schedule(), 0.05);
  CHECK_THROWS(integrate(rho, 0.0, 0.3, 0.01, singular));
  CHECK_NOTHROW(integrate(rho, 0.1, 0.3, 1e-4, singular));

  const auto run = integrate(rho, 0.0, 1.0, 0.01, gen);
  CHECK(run.stats.steps == 100);
  CHECK(run.stats.max_trace_drift <= 1e-8);
  CHECK(run.stats.max_hermiticity_residual <= 1e-10);
  CHECK(run.stats.min_eigenvalue >= -1e-8);
  CHECK_NOTHROW(run.state.check_invariants());
}

TEST_CASE("integrate reports the step of a positivity failure") {
  const GridSpec g(1, 8);
  const auto obj = std::make_shared<FiniteSumObjective>(make_convex_quadratic({{0.9}, {-0.9}}));
  GeneratorOptions flipped;
  flipped.noise_sign = -1.0;
  const auto gen = make_generator(*obj, g, constant_schedule(0.0, 10.0, 1.0), 1.0, flipped);
  const auto rho = DensityState::pure(uniform_state(g));
  try {
    integrate(rho, 0.0, 1.0, 1e-3, gen);
    FAIL("expected an invariant violation");
  } catch (const InvariantViolation& e) {
    CHECK(std::string(e.what()).find("integration step") != std::string::npos);
  }
}

TEST_CASE("integrate with eta = 0 follows the unitary evolution") {
  const GridSpec g(1, 8);
  const auto obj = random_sum(3, 8);
  const auto gen = make_generator(*obj, g, log_scaling_schedule(2.0, 1.0), 0.0);
  const auto rho = blended(g, 6);
  const double dt = 0.01;
  const auto got = integrate(rho, 0.5, 1.5, dt, gen).state;
  const auto oracle = evolve_unitary_oracle(rho, 0.5, 1.5, dt / 10.0, gen);
  CHECK(trace_distance(got, oracle) <= 1e-6);
}

TEST_CASE("integrate is fourth order") {
  const GridSpec g(1, 4);
  const auto obj = std::make_shared<FiniteSumObjective>(make_convex_quadratic({{0.5}, {-0.5}}));
  const auto gen = make_generator(*obj, g, log_scaling_schedule(2.0, 1.0), 0.05);
  const auto rho = blended(g, 7);
  const double dt = 0.1;
  const auto reference = integrate(rho, 0.0, 1.0, dt / 20.0, gen).state.matrix();
  const double coarse = (integrate(rho, 0.0, 1.0, dt, gen).state.matrix() - reference).norm();
  const double fine = (integrate(rho, 0.0, 1.0, dt / 2.0, gen).state.matrix() - reference).norm();
  const double ratio = coarse / fine;
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("weak approximation on a constant objective") {
  RunConfig cfg;
  cfg.objective = std::make_shared<FiniteSumObjective>(
      "two-constants", 1, 2, [](std::size_t j, std::span<const double>) { return j == 0 ? 0.0 : 2.0; },
      [](std::size_t, std::span<const double>, std::span<double> g) { g[0] = 0.0; });
  cfg.schedule = log_scaling_schedule(2.0, 1.0);
  cfg.grid = GridSpec(1, 4);
  cfg.eta = 0.01;
  cfg.steps = 20;
  const auto s = weak_approx_series(cfg);
  CHECK(s.max_distance <= 1e-10);
  CHECK(s.channel_method == "propagation");
}

TEST_CASE("weak approximation order and the m = 1 comparison") {
  auto make = [](std::vector<std::vector<double>> centers) {
    RunConfig cfg;
    cfg.objective = std::make_shared<FiniteSumObjective>(make_convex_quadratic(centers));
    cfg.schedule = log_scaling_schedule(2.0, 1.0);
    cfg.grid = GridSpec(1, 4);
    cfg.eta = 0.05;
    cfg.steps = 8;
    return cfg;
  };
  const auto two = weak_approx_report(make({{0.5}, {-0.5}}));
  CHECK(two.coarse.channel_method == "enumeration");
  CHECK(two.fine.channel_method == "enumeration");
  CHECK(two.coarse.times == two.fine.times);
  CHECK(two.empirical_order >= 1.5);
  CHECK(two.empirical_order <= 2.5);

  // Same total f up to a constant, so only the noise term differs.
  const auto one = weak_approx_series(make({{0.0}}));
  CHECK(one.max_distance < two.coarse.max_distance);
  CHECK(one.max_distance > 0.0);
}
