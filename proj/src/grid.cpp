#include "sqhd/grid.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sqhd/errors.hpp"
#include "sqhd/io.hpp"

namespace sqhd {

namespace {

bool is_power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

GridSpec::GridSpec(int dim, int points_per_axis) : dim_(dim), points_(points_per_axis), size_(1) {
  if (dim < 1) throw std::invalid_argument("GridSpec: dimension must be >= 1");
  if (!is_power_of_two(points_per_axis))
    throw std::invalid_argument("GridSpec: points per axis must be a power of two >= 2, got " +
                                std::to_string(points_per_axis));
  for (int a = 0; a < dim; ++a) {
    if (size_ > (std::size_t{1} << 40) / static_cast<std::size_t>(points_))
      throw std::invalid_argument("GridSpec: grid too large");
    size_ *= static_cast<std::size_t>(points_);
  }
}

std::size_t GridSpec::stride(int axis) const {
  std::size_t s = 1;
  for (int a = dim_ - 1; a > axis; --a) s *= static_cast<std::size_t>(points_);
  return s;
}

std::vector<int> axis_indices(const GridSpec& grid, std::size_t flat_index) {
  if (flat_index >= grid.size()) throw std::out_of_range("grid index out of range");
  std::vector<int> idx(grid.dim());
  const auto n = static_cast<std::size_t>(grid.points_per_axis());
  for (int a = grid.dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat_index % n);
    flat_index /= n;
  }
  return idx;
}

std::vector<double> coord_of_index(const GridSpec& grid, std::size_t flat_index) {
  const auto idx = axis_indices(grid, flat_index);
  std::vector<double> point(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) point[a] = grid.axis_coordinate(idx[a]);
  return point;
}

std::size_t index_of_coord(const GridSpec& grid, std::span<const double> point) {
  if (static_cast<int>(point.size()) != grid.dim())
    throw std::invalid_argument("index_of_coord: dimension mismatch");
  const int n = grid.points_per_axis();
  std::size_t flat = 0;
  for (double x : point) {
    const double k = ((x + 1.0) * n - 1.0) / 2.0;
    const double rounded = std::round(k);
    if (std::abs(k - rounded) > 0.25 || rounded < 0 || rounded >= n)
      throw std::invalid_argument("index_of_coord: point is not on the grid");
    flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(rounded);
  }
  return flat;
}

WaveState::WaveState(GridSpec grid, std::vector<Complex> amplitudes)
    : grid_(grid), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != grid_.size())
    throw std::invalid_argument("WaveState: amplitude count does not match grid size");
}

double WaveState::norm() const {
  double sum = 0.0;
  for (const auto& a : amplitudes_) sum += std::norm(a);
  return std::sqrt(sum);
}

std::vector<double> WaveState::probabilities() const {
  std::vector<double> p(amplitudes_.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(amplitudes_[k]);
  return p;
}

WaveState uniform_state(const GridSpec& grid) {
  const double amp = 1.0 / std::sqrt(static_cast<double>(grid.size()));
  return WaveState(grid, std::vector<Complex>(grid.size(), Complex(amp, 0.0)));
}

WaveState basis_state(const GridSpec& grid, std::size_t flat_index) {
  if (flat_index >= grid.size()) throw std::out_of_range("basis_state: index out of range");
  std::vector<Complex> amps(grid.size());
  amps[flat_index] = 1.0;
  return WaveState(grid, std::move(amps));
}

std::vector<double> measure_position(const WaveState& state, Rng& rng) {
  if (std::abs(state.norm() - 1.0) > 1e-6)
    throw InvariantViolation("measure_position: state norm deviates from 1 by more than 1e-6");
  const double r = rng.uniform01();
  double cumulative = 0.0;
  const auto amps = state.amplitudes();
  std::size_t last_nonzero = 0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const double p = std::norm(amps[k]);
    if (p > 0.0) last_nonzero = k;
    cumulative += p;
    if (r < cumulative) return coord_of_index(state.grid(), k);
  }
  // r landed in the rounding gap above the cumulative sum.
  return coord_of_index(state.grid(), last_nonzero);
}

double expect_diagonal(const WaveState& state, std::span<const double> values) {
  if (values.size() != state.size()) throw std::invalid_argument("expect_diagonal: length mismatch");
  const auto amps = state.amplitudes();
  double sum = 0.0;
  for (std::size_t k = 0; k < amps.size(); ++k) sum += std::norm(amps[k]) * values[k];
  return sum;
}

DensityState::DensityState(GridSpec grid, Eigen::MatrixXcd matrix) : grid_(grid), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (matrix_.rows() != n || matrix_.cols() != n)
    throw std::invalid_argument("DensityState: matrix size does not match grid");
}

DensityState DensityState::pure(const WaveState& state) {
  const auto amps = state.amplitudes();
  Eigen::Map<const Eigen::VectorXcd> v(amps.data(), static_cast<Eigen::Index>(amps.size()));
  return DensityState(state.grid(), v * v.adjoint());
}

DensityState DensityState::maximally_mixed(const GridSpec& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  return DensityState(grid, Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(n));
}

DensityState::Residuals DensityState::residuals() const {
  Residuals r{};
  r.hermiticity = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  r.trace_error = std::abs(matrix_.trace() - Complex(1.0, 0.0));
  const Eigen::MatrixXcd herm = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = solver.eigenvalues().minCoeff();
  return r;
}

void DensityState::check_invariants() const {
  const auto r = residuals();
  if (r.hermiticity > 1e-10)
    throw InvariantViolation("density state not Hermitian: residual " + format_double(r.hermiticity));
  if (r.trace_error > 1e-8)
    throw InvariantViolation("density state trace error " + format_double(r.trace_error));
  if (r.min_eigenvalue < -1e-8)
    throw InvariantViolation("density state has negative eigenvalue " + format_double(r.min_eigenvalue));
}

void write_distribution_csv(std::ostream& out, const GridSpec& grid, std::span<const double> probabilities) {
  if (probabilities.size() != grid.size())
    throw std::invalid_argument("write_distribution_csv: length mismatch");
  for (int a = 0; a < grid.dim(); ++a) out << 'x' << a << ',';
  out << "probability\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (double c : coord_of_index(grid, k)) out << format_double(c) << ',';
    out << format_double(probabilities[k]) << '\n';
  }
}

}  // namespace sqhd
