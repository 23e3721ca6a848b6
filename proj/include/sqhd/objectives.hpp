#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sqhd/grid.hpp"

namespace sqhd {

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// f(x) = (1/m) sum_j f_j(x) on [-1, 1]^d with analytic component gradients.
class FiniteSumObjective {
 public:
  using ComponentFn = std::function<double(std::size_t, std::span<const double>)>;
  using GradientFn = std::function<void(std::size_t, std::span<const double>, std::span<double>)>;

  FiniteSumObjective(std::string name, int dim, std::size_t components, ComponentFn value, GradientFn gradient,
                     Metadata metadata = {});

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  std::size_t components() const { return components_; }
  const Metadata& metadata() const { return metadata_; }

  double component(std::size_t j, std::span<const double> x) const;
  void component_gradient(std::size_t j, std::span<const double> x, std::span<double> out) const;
  std::vector<double> component_gradient(std::size_t j, std::span<const double> x) const;

  double value(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;

 private:
  std::string name_;
  int dim_;
  std::size_t components_;
  ComponentFn value_;
  GradientFn gradient_;
  Metadata metadata_;
};

/// Rotated double well: F(x) = (1/d) sum_j w((U x / scale)_j),
/// w(u) = (u^4 - 16 u^2 + 5 u) / 10. Components are the per-coordinate terms.
FiniteSumObjective make_dw(double theta, double scale = 1.2, int dim = 2);

/// Michalewicz-type: f = (w(2x1+2) + w(2x2+2)) / 2, w(y) = -sin(y) sin(y^2/pi)^20.
FiniteSumObjective make_mich();

/// Cube-wave: f = (w(2x1) + w(2x2)) / 2, w(y) = cos(pi y)^2 + y^4/4.
FiniteSumObjective make_cubewave();

enum class SinoVariant { Sino, SinoAlt };

SinoVariant parse_sino_variant(const std::string& name);

/// Nonlinear least squares with h(x; y) = sin^2(y0 + y1 x1 + y2 x2) and zero
/// targets: f_j(x) = h(x; a_j)^2. Parameter vectors are stored (y1, y2, y0).
FiniteSumObjective make_sino(SinoVariant variant, std::uint64_t seed);

/// Parameter vectors (y1, y2, y0) used by make_sino for this seed.
std::vector<std::array<double, 3>> sino_parameters(SinoVariant variant, std::uint64_t seed);

/// f_j(x) = 0.5 ||x - c_j||^2.
FiniteSumObjective make_convex_quadratic(const std::vector<std::vector<double>>& centers);

/// Closed-form gradient noise of the quadratic family: (1/m) sum ||c_j - mean c||^2.
double quadratic_gradient_noise(const std::vector<std::vector<double>>& centers);

/// One-dimensional restriction x -> base(x, fixed...) along the first axis.
FiniteSumObjective make_slice(const FiniteSumObjective& base, std::vector<double> fixed_trailing);

/// (1/m) sum_j ||grad f_j(x) - grad f(x)||^2.
double gradient_noise(const FiniteSumObjective& objective, std::span<const double> x);

/// Component values tabulated over the grid: [j][flat index].
std::vector<std::vector<double>> tabulate_components(const FiniteSumObjective& objective, const GridSpec& grid);

/// Total f over the grid as the mean of the component tables.
std::vector<double> mean_of_tables(const std::vector<std::vector<double>>& tables);

/// Reference table of f with its extremes. The scan extremes are refined by
/// a box-constrained local descent from the best scan points, so fmin/fmax
/// bound every point of [-1, 1]^d reachable by that descent, not just the
/// scan points.
struct Landscape {
  GridSpec grid;
  std::vector<double> values;
  double fmin = 0.0;
  double fmax = 0.0;
  std::vector<double> argmin;
  std::vector<double> argmax;
  double scan_fmin = 0.0;
  double scan_fmax = 0.0;

  /// False for constant objectives (fmax == fmin).
  bool normalizable() const { return fmax > fmin; }
};

Landscape landscape(const FiniteSumObjective& objective, const GridSpec& grid, bool refine = true);

}  // namespace sqhd
