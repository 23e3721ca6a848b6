#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sqhd/grid.hpp"

namespace sqhd {

/// Radix-2 unitary DFT of a fixed power-of-two length.
/// forward: kernel exp(-2 pi i jk / n) / sqrt(n); inverse is its adjoint.
class Fft {
 public:
  explicit Fft(int n);

  int size() const { return n_; }
  void forward(std::span<Complex> data) const { transform(data, false); }
  void inverse(std::span<Complex> data) const { transform(data, true); }

 private:
  void transform(std::span<Complex> data, bool inverse) const;

  int n_;
  std::vector<int> bit_reverse_;
  std::vector<Complex> twiddles_;  // exp(-2 pi i k / n), k < n/2
};

/// Eigenvalues of the periodic second-difference operator (1/s^2) D_{1,n}:
/// lambda_k = 4 sin^2(k pi / n) / s^2, in k order. The d-dimensional
/// eigenvalue of a multi-index is the sum over axes.
struct KineticSpectrum {
  GridSpec grid;
  std::vector<double> axis_eigenvalues;

  double total(std::size_t flat_index) const;
  std::vector<double> flattened() const;
};

KineticSpectrum laplacian_eigenvalues(const GridSpec& grid);

/// (1/s^2) D_{1,n}: 2 on the diagonal, -1 at the cyclic neighbours. Any n >= 2.
Eigen::MatrixXd second_difference(int n, double spacing);

/// Dense (1/s^2) sum_axes I x .. x D_{1,n} x .. x I. Capped at 4096 points.
Eigen::MatrixXd dense_laplacian(const GridSpec& grid);

/// Orientation of the kinetic generator. Standard applies exp(-i theta lambda/2)
/// with lambda >= 0; Flipped negates lambda (sensitivity runs only).
enum class KineticSign { Standard, Flipped };

inline double sign_factor(KineticSign sign) { return sign == KineticSign::Standard ? 1.0 : -1.0; }

/// Axis-by-axis DFT over a flat row-major buffer.
class GridFft {
 public:
  explicit GridFft(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  void forward(std::span<Complex> data) const { transform(data, false); }
  void inverse(std::span<Complex> data) const { transform(data, true); }

 private:
  void transform(std::span<Complex> data, bool inverse) const;

  GridSpec grid_;
  Fft fft_;
};

WaveState dft_forward(const WaveState& state);
WaveState dft_inverse(const WaveState& state);

/// Applies exp(-i theta (-Laplacian)/2) in place through the Fourier basis.
/// Holds plan and scratch, so one instance per trajectory.
class KineticPropagator {
 public:
  explicit KineticPropagator(const GridSpec& grid, KineticSign sign = KineticSign::Standard);

  const GridSpec& grid() const { return fft_.grid(); }
  const KineticSpectrum& spectrum() const { return spectrum_; }

  void apply(std::span<Complex> amplitudes, double theta);

 private:
  GridFft fft_;
  KineticSpectrum spectrum_;
  double sign_;
  std::vector<Complex> axis_phase_;
};

WaveState apply_kinetic_phase(const WaveState& state, double theta, KineticSign sign = KineticSign::Standard);

}  // namespace sqhd
