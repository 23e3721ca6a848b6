#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sqhd/rng.hpp"

namespace sqhd {

using Complex = std::complex<double>;

/// Product grid over [-1, 1]^d with `points_per_axis` cell-centred points per
/// axis. Flattening is row-major with axis 0 slowest.
class GridSpec {
 public:
  GridSpec(int dim, int points_per_axis);

  int dim() const { return dim_; }
  int points_per_axis() const { return points_; }
  double spacing() const { return 2.0 / points_; }
  std::size_t size() const { return size_; }

  /// Coordinate of axis index k: -1 + (2k+1)/n.
  double axis_coordinate(int k) const { return -1.0 + (2.0 * k + 1.0) / points_; }

  /// Stride of `axis` in the flat index.
  std::size_t stride(int axis) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int dim_;
  int points_;
  std::size_t size_;
};

std::vector<int> axis_indices(const GridSpec& grid, std::size_t flat_index);
std::vector<double> coord_of_index(const GridSpec& grid, std::size_t flat_index);

/// Inverse of coord_of_index. Throws if `point` is not a grid coordinate
/// (tolerance: a quarter of the spacing).
std::size_t index_of_coord(const GridSpec& grid, std::span<const double> point);

/// Pure state of one trajectory: amplitudes over the grid points.
class WaveState {
 public:
  WaveState(GridSpec grid, std::vector<Complex> amplitudes);

  const GridSpec& grid() const { return grid_; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> amplitudes() { return amplitudes_; }
  std::size_t size() const { return amplitudes_.size(); }

  double norm() const;
  std::vector<double> probabilities() const;

 private:
  GridSpec grid_;
  std::vector<Complex> amplitudes_;
};

WaveState uniform_state(const GridSpec& grid);
WaveState basis_state(const GridSpec& grid, std::size_t flat_index);

/// Draws a grid point with probability |amplitude|^2.
std::vector<double> measure_position(const WaveState& state, Rng& rng);

/// sum_k |psi_k|^2 * values_k.
double expect_diagonal(const WaveState& state, std::span<const double> values);

/// Mixed state over the grid points.
class DensityState {
 public:
  DensityState(GridSpec grid, Eigen::MatrixXcd matrix);

  static DensityState pure(const WaveState& state);
  static DensityState maximally_mixed(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

  struct Residuals {
    double hermiticity;  // max |M - M^dagger|
    double trace_error;  // |tr M - 1|
    double min_eigenvalue;
  };
  Residuals residuals() const;

  /// Throws InvariantViolation unless Hermitian (1e-10), unit trace (1e-8)
  /// and PSD (min eigenvalue >= -1e-8).
  void check_invariants() const;

 private:
  GridSpec grid_;
  Eigen::MatrixXcd matrix_;
};

/// CSV with columns x0..x{d-1},probability in flat index order.
void write_distribution_csv(std::ostream& out, const GridSpec& grid, std::span<const double> probabilities);

}  // namespace sqhd
