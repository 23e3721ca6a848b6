#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "sqhd/grid.hpp"

namespace testing {

using sqhd::Complex;

inline std::vector<Complex> random_amplitudes(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<Complex> v(n);
  double norm = 0.0;
  for (auto& z : v) {
    z = {normal(gen), normal(gen)};
    norm += std::norm(z);
  }
  for (auto& z : v) z /= std::sqrt(norm);
  return v;
}

inline sqhd::WaveState random_state(const sqhd::GridSpec& grid, unsigned seed) {
  return sqhd::WaveState(grid, random_amplitudes(grid.size(), seed));
}

inline Eigen::VectorXcd as_vector(const sqhd::WaveState& s) {
  const auto a = s.amplitudes();
  return Eigen::Map<const Eigen::VectorXcd>(a.data(), static_cast<Eigen::Index>(a.size()));
}

inline Eigen::MatrixXcd random_hermitian(Eigen::Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {normal(gen), normal(gen)};
  return 0.5 * (m + m.adjoint());
}

/// exp(-i t A) for a Hermitian (or real symmetric) A.
inline Eigen::MatrixXcd unitary_exp(const Eigen::MatrixXcd& a, double t) {
  const Eigen::MatrixXcd gen = Complex(0.0, -t) * a;
  return gen.exp();
}

inline Eigen::MatrixXcd diagonal(const std::vector<double>& v) {
  Eigen::VectorXcd d(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) d(static_cast<Eigen::Index>(i)) = v[i];
  return d.asDiagonal();
}

}  // namespace testing
