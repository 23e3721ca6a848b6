#include "sqhd/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sqhd {

Fft::Fft(int n) : n_(n), bit_reverse_(n), twiddles_(n / 2) {
  if (n < 1 || (n & (n - 1)) != 0) throw std::invalid_argument("Fft: length must be a power of two");
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int b = 0; b < bits; ++b)
      if (i & (1 << b)) r |= 1 << (bits - 1 - b);
    bit_reverse_[i] = r;
  }
  for (int k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * k / n;
    twiddles_[k] = Complex(std::cos(angle), std::sin(angle));
  }
}

void Fft::transform(std::span<Complex> data, bool inverse) const {
  if (static_cast<int>(data.size()) != n_) throw std::invalid_argument("Fft: length mismatch");
  for (int i = 0; i < n_; ++i)
    if (i < bit_reverse_[i]) std::swap(data[i], data[bit_reverse_[i]]);
  for (int len = 2; len <= n_; len <<= 1) {
    const int half = len / 2;
    const int step = n_ / len;
    for (int start = 0; start < n_; start += len) {
      for (int k = 0; k < half; ++k) {
        Complex w = twiddles_[k * step];
        if (inverse) w = std::conj(w);
        const Complex t = w * data[start + k + half];
        data[start + k + half] = data[start + k] - t;
        data[start + k] += t;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  for (auto& x : data) x *= scale;
}

double KineticSpectrum::total(std::size_t flat_index) const {
  double sum = 0.0;
  for (int k : axis_indices(grid, flat_index)) sum += axis_eigenvalues[k];
  return sum;
}

std::vector<double> KineticSpectrum::flattened() const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = total(i);
  return out;
}

KineticSpectrum laplacian_eigenvalues(const GridSpec& grid) {
  const int n = grid.points_per_axis();
  const double inv_s2 = 1.0 / (grid.spacing() * grid.spacing());
  KineticSpectrum spec{grid, std::vector<double>(n)};
  for (int k = 0; k < n; ++k) {
    const double s = std::sin(k * std::numbers::pi / n);
    spec.axis_eigenvalues[k] = inv_s2 * 4.0 * s * s;
  }
  spec.axis_eigenvalues[0] = 0.0;
  return spec;
}

Eigen::MatrixXd second_difference(int n, double spacing) {
  if (n < 2) throw std::invalid_argument("second_difference: n must be >= 2");
  if (!(spacing > 0.0)) throw std::invalid_argument("second_difference: spacing must be positive");
  const double inv_s2 = 1.0 / (spacing * spacing);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    out(i, i) += 2.0 * inv_s2;
    out(i, (i + 1) % n) -= inv_s2;
    out(i, (i - 1 + n) % n) -= inv_s2;
  }
  return out;
}

Eigen::MatrixXd dense_laplacian(const GridSpec& grid) {
  if (grid.size() > 4096) throw std::invalid_argument("dense_laplacian: grid exceeds 4096 points");
  const int n = grid.points_per_axis();
  const auto size = static_cast<Eigen::Index>(grid.size());
  const double inv_s2 = 1.0 / (grid.spacing() * grid.spacing());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index row = 0; row < size; ++row) {
    const auto idx = axis_indices(grid, static_cast<std::size_t>(row));
    for (int a = 0; a < grid.dim(); ++a) {
      const auto stride = static_cast<Eigen::Index>(grid.stride(a));
      const int i = idx[a];
      out(row, row) += 2.0 * inv_s2;
      // With n == 2 both neighbours are the same point and the entries add.
      out(row, row + (((i + 1) % n) - i) * stride) -= inv_s2;
      out(row, row + (((i - 1 + n) % n) - i) * stride) -= inv_s2;
    }
  }
  return out;
}

GridFft::GridFft(const GridSpec& grid) : grid_(grid), fft_(grid.points_per_axis()) {}

void GridFft::transform(std::span<Complex> data, bool inverse) const {
  if (data.size() != grid_.size()) throw std::invalid_argument("GridFft: length mismatch");
  const auto n = static_cast<std::size_t>(grid_.points_per_axis());
  std::vector<Complex> line(n);
  for (int a = 0; a < grid_.dim(); ++a) {
    const std::size_t stride = grid_.stride(a);
    if (stride == 1) {
      for (std::size_t start = 0; start < data.size(); start += n) {
        auto view = data.subspan(start, n);
        inverse ? fft_.inverse(view) : fft_.forward(view);
      }
      continue;
    }
    const std::size_t block = stride * n;
    for (std::size_t outer = 0; outer < data.size(); outer += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = outer + inner;
        for (std::size_t k = 0; k < n; ++k) line[k] = data[base + k * stride];
        inverse ? fft_.inverse(line) : fft_.forward(line);
        for (std::size_t k = 0; k < n; ++k) data[base + k * stride] = line[k];
      }
    }
  }
}

WaveState dft_forward(const WaveState& state) {
  WaveState out = state;
  GridFft(state.grid()).forward(out.amplitudes());
  return out;
}

WaveState dft_inverse(const WaveState& state) {
  WaveState out = state;
  GridFft(state.grid()).inverse(out.amplitudes());
  return out;
}

KineticPropagator::KineticPropagator(const GridSpec& grid, KineticSign sign)
    : fft_(grid),
      spectrum_(laplacian_eigenvalues(grid)),
      sign_(sign_factor(sign)),
      axis_phase_(static_cast<std::size_t>(grid.points_per_axis())) {}

void KineticPropagator::apply(std::span<Complex> amplitudes, double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("apply_kinetic_phase: non-finite theta");
  if (theta == 0.0) return;
  const GridSpec& grid = fft_.grid();
  const std::size_t n = axis_phase_.size();
  for (std::size_t k = 0; k < n; ++k)
    axis_phase_[k] = std::polar(1.0, -theta * sign_ * spectrum_.axis_eigenvalues[k] / 2.0);

  fft_.forward(amplitudes);
  if (grid.dim() == 1) {
    for (std::size_t k = 0; k < n; ++k) amplitudes[k] *= axis_phase_[k];
  } else {
    // exp of a sum over axes = product of per-axis phases.
    std::vector<std::size_t> idx(static_cast<std::size_t>(grid.dim()), 0);
    for (std::size_t flat = 0; flat < amplitudes.size(); ++flat) {
      Complex phase = axis_phase_[idx[0]];
      for (std::size_t a = 1; a < idx.size(); ++a) phase *= axis_phase_[idx[a]];
      amplitudes[flat] *= phase;
      for (std::size_t a = idx.size(); a-- > 0;) {
        if (++idx[a] < n) break;
        idx[a] = 0;
      }
    }
  }
  fft_.inverse(amplitudes);
}

WaveState apply_kinetic_phase(const WaveState& state, double theta, KineticSign sign) {
  WaveState out = state;
  KineticPropagator(state.grid(), sign).apply(out.amplitudes(), theta);
  return out;
}

}  // namespace sqhd
