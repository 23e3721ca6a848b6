#include "sqhd/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sqhd/io.hpp"
#include "sqhd/rng.hpp"

namespace sqhd {

FiniteSumObjective::FiniteSumObjective(std::string name, int dim, std::size_t components, ComponentFn value,
                                       GradientFn gradient, Metadata metadata)
    : name_(std::move(name)),
      dim_(dim),
      components_(components),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      metadata_(std::move(metadata)) {
  if (dim_ < 1) throw std::invalid_argument("objective dimension must be >= 1");
  if (components_ < 1) throw std::invalid_argument("objective needs at least one component");
}

double FiniteSumObjective::component(std::size_t j, std::span<const double> x) const { return value_(j, x); }

void FiniteSumObjective::component_gradient(std::size_t j, std::span<const double> x, std::span<double> out) const {
  gradient_(j, x, out);
}

std::vector<double> FiniteSumObjective::component_gradient(std::size_t j, std::span<const double> x) const {
  std::vector<double> g(static_cast<std::size_t>(dim_));
  gradient_(j, x, g);
  return g;
}

double FiniteSumObjective::value(std::span<const double> x) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < components_; ++j) sum += value_(j, x);
  return sum / static_cast<double>(components_);
}

std::vector<double> FiniteSumObjective::gradient(std::span<const double> x) const {
  std::vector<double> total(static_cast<std::size_t>(dim_), 0.0), g(total.size());
  for (std::size_t j = 0; j < components_; ++j) {
    gradient_(j, x, g);
    for (std::size_t i = 0; i < g.size(); ++i) total[i] += g[i];
  }
  for (auto& v : total) v /= static_cast<double>(components_);
  return total;
}

FiniteSumObjective make_dw(double theta, double scale, int dim) {
  if (!(scale > 0.0)) throw std::invalid_argument("make_dw: scale must be positive");
  if (dim < 1) throw std::invalid_argument("make_dw: dimension must be >= 1");
  if (dim != 2 && theta != 0.0) throw std::invalid_argument("make_dw: rotation is only defined for d = 2");

  // Row-major d x d transform (U / scale).
  std::vector<double> m(static_cast<std::size_t>(dim * dim), 0.0);
  if (dim == 2) {
    const double c = std::cos(theta), s = std::sin(theta);
    m = {c / scale, s / scale, -s / scale, c / scale};
  } else {
    for (int i = 0; i < dim; ++i) m[static_cast<std::size_t>(i * dim + i)] = 1.0 / scale;
  }
  auto row = [m, dim](std::size_t j, std::span<const double> x) {
    double u = 0.0;
    for (int i = 0; i < dim; ++i) u += m[j * dim + i] * x[i];
    return u;
  };
  auto value = [row](std::size_t j, std::span<const double> x) {
    const double u = row(j, x);
    const double u2 = u * u;
    return (u2 * u2 - 16.0 * u2 + 5.0 * u) / 10.0;
  };
  auto gradient = [row, m, dim](std::size_t j, std::span<const double> x, std::span<double> out) {
    const double u = row(j, x);
    const double dw = (4.0 * u * u * u - 32.0 * u + 5.0) / 10.0;
    for (int i = 0; i < dim; ++i) out[i] = dw * m[j * dim + i];
  };
  return FiniteSumObjective("dw", dim, static_cast<std::size_t>(dim), value, gradient,
                            {{"theta", format_double(theta)}, {"scale", format_double(scale)},
                             {"decomposition", "per-coordinate terms"}});
}

namespace {

/// Separable 2-D objective (w(k x1 + c) + w(k x2 + c)) / 2 with per-coordinate components.
FiniteSumObjective separable(std::string name, double k, double c, double (*w)(double), double (*dw)(double)) {
  auto value = [k, c, w](std::size_t j, std::span<const double> x) { return w(k * x[j] + c); };
  auto gradient = [k, c, dw](std::size_t j, std::span<const double> x, std::span<double> out) {
    out[0] = out[1] = 0.0;
    out[j] = k * dw(k * x[j] + c);
  };
  return FiniteSumObjective(std::move(name), 2, 2, value, gradient, {{"decomposition", "per-coordinate terms"}});
}

double mich_w(double y) {
  return -std::sin(y) * std::pow(std::sin(y * y / std::numbers::pi), 20);
}

double mich_dw(double y) {
  const double s = std::sin(y * y / std::numbers::pi);
  const double c = std::cos(y * y / std::numbers::pi);
  return -std::cos(y) * std::pow(s, 20) - std::sin(y) * 20.0 * std::pow(s, 19) * c * 2.0 * y / std::numbers::pi;
}

double cube_w(double y) {
  const double c = std::cos(std::numbers::pi * y);
  return c * c + 0.25 * y * y * y * y;
}

double cube_dw(double y) { return -std::numbers::pi * std::sin(2.0 * std::numbers::pi * y) + y * y * y; }

}  // namespace

FiniteSumObjective make_mich() { return separable("mich", 2.0, 2.0, mich_w, mich_dw); }

FiniteSumObjective make_cubewave() { return separable("cubewave", 2.0, 0.0, cube_w, cube_dw); }

SinoVariant parse_sino_variant(const std::string& name) {
  if (name == "sino") return SinoVariant::Sino;
  if (name == "sino-alt") return SinoVariant::SinoAlt;
  throw std::invalid_argument("unknown sino variant '" + name + "'");
}

std::vector<std::array<double, 3>> sino_parameters(SinoVariant variant, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::array<double, 3>> params;
  if (variant == SinoVariant::Sino) {
    constexpr int half = 20;
    std::vector<double> slope(half), offset(half);
    for (auto& v : slope) v = static_cast<double>(rng.uniform_int(0, 100)) / (6.0 * std::numbers::pi);
    for (auto& v : offset) v = static_cast<double>(rng.uniform_int(0, 100)) / (4.0 * std::numbers::pi);
    for (int i = 0; i < half; ++i) params.push_back({slope[i], 0.0, offset[i]});
    for (int i = 0; i < half; ++i) params.push_back({0.0, slope[i], offset[i]});
  } else {
    for (int j = 0; j < 50; ++j) {
      std::array<double, 3> p{};
      for (auto& v : p) v = static_cast<double>(rng.uniform_int(-20, 20)) / std::numbers::pi;
      params.push_back(p);
    }
  }
  return params;
}

FiniteSumObjective make_sino(SinoVariant variant, std::uint64_t seed) {
  auto params = sino_parameters(variant, seed);
  const std::size_t m = params.size();
  auto value = [params](std::size_t j, std::span<const double> x) {
    const auto& p = params[j];
    const double s = std::sin(p[2] + p[0] * x[0] + p[1] * x[1]);
    const double h = s * s;
    return h * h;
  };
  auto gradient = [params](std::size_t j, std::span<const double> x, std::span<double> out) {
    const auto& p = params[j];
    const double z = p[2] + p[0] * x[0] + p[1] * x[1];
    const double s = std::sin(z);
    // d/dz sin^4 z = 2 sin^2 z * sin 2z
    const double dz = 2.0 * s * s * std::sin(2.0 * z);
    out[0] = dz * p[0];
    out[1] = dz * p[1];
  };
  const std::string name = variant == SinoVariant::Sino ? "sino" : "sino-alt";
  return FiniteSumObjective(name, 2, m, value, gradient,
                            {{"variant", name},
                             {"dataset_seed", std::to_string(seed)},
                             {"n_sample", std::to_string(m)},
                             {"target_convention", "third parameter slot is the offset y0; targets b_j = 0"}});
}

FiniteSumObjective make_convex_quadratic(const std::vector<std::vector<double>>& centers) {
  if (centers.empty()) throw std::invalid_argument("make_convex_quadratic: empty center list");
  const std::size_t dim = centers.front().size();
  if (dim == 0) throw std::invalid_argument("make_convex_quadratic: zero-dimensional center");
  bool inside = false;
  for (const auto& c : centers) {
    if (c.size() != dim) throw std::invalid_argument("make_convex_quadratic: centers differ in dimension");
    inside = inside || std::all_of(c.begin(), c.end(), [](double v) { return v >= -1.0 && v <= 1.0; });
  }
  if (!inside) throw std::invalid_argument("make_convex_quadratic: no center inside [-1, 1]^d");
  auto value = [centers](std::size_t j, std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += (x[i] - centers[j][i]) * (x[i] - centers[j][i]);
    return 0.5 * sum;
  };
  auto gradient = [centers](std::size_t j, std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - centers[j][i];
  };
  std::string list;
  for (const auto& c : centers) {
    if (!list.empty()) list += ';';
    for (std::size_t i = 0; i < c.size(); ++i) list += (i ? " " : "") + format_double(c[i]);
  }
  return FiniteSumObjective("quadratic", static_cast<int>(dim), centers.size(), value, gradient,
                            {{"centers", list}});
}

double quadratic_gradient_noise(const std::vector<std::vector<double>>& centers) {
  if (centers.empty()) throw std::invalid_argument("quadratic_gradient_noise: empty center list");
  const std::size_t dim = centers.front().size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& c : centers)
    for (std::size_t i = 0; i < dim; ++i) mean[i] += c[i] / static_cast<double>(centers.size());
  double sum = 0.0;
  for (const auto& c : centers)
    for (std::size_t i = 0; i < dim; ++i) sum += (c[i] - mean[i]) * (c[i] - mean[i]);
  return sum / static_cast<double>(centers.size());
}

FiniteSumObjective make_slice(const FiniteSumObjective& base, std::vector<double> fixed_trailing) {
  if (static_cast<int>(fixed_trailing.size()) != base.dim() - 1)
    throw std::invalid_argument("make_slice: need exactly d-1 fixed coordinates");
  const int dim = base.dim();
  auto embed = [fixed_trailing, dim](std::span<const double> x) {
    std::vector<double> full(static_cast<std::size_t>(dim));
    full[0] = x[0];
    std::copy(fixed_trailing.begin(), fixed_trailing.end(), full.begin() + 1);
    return full;
  };
  auto value = [base, embed](std::size_t j, std::span<const double> x) { return base.component(j, embed(x)); };
  auto gradient = [base, embed, dim](std::size_t j, std::span<const double> x, std::span<double> out) {
    std::vector<double> g(static_cast<std::size_t>(dim));
    base.component_gradient(j, embed(x), g);
    out[0] = g[0];
  };
  std::string where;
  for (std::size_t i = 0; i < fixed_trailing.size(); ++i)
    where += (i ? "," : "") + std::string("x") + std::to_string(i + 2) + "=" + format_double(fixed_trailing[i]);
  Metadata meta = base.metadata();
  meta.emplace_back("slice", where);
  return FiniteSumObjective(base.name() + "@" + where, 1, base.components(), value, gradient, meta);
}

double gradient_noise(const FiniteSumObjective& objective, std::span<const double> x) {
  const auto total = objective.gradient(x);
  std::vector<double> g(total.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < objective.components(); ++j) {
    objective.component_gradient(j, x, g);
    for (std::size_t i = 0; i < g.size(); ++i) sum += (g[i] - total[i]) * (g[i] - total[i]);
  }
  return sum / static_cast<double>(objective.components());
}

std::vector<std::vector<double>> tabulate_components(const FiniteSumObjective& objective, const GridSpec& grid) {
  if (objective.dim() != grid.dim()) throw std::invalid_argument("tabulate_components: dimension mismatch");
  std::vector<std::vector<double>> tables(objective.components(), std::vector<double>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto x = coord_of_index(grid, k);
    for (std::size_t j = 0; j < tables.size(); ++j) tables[j][k] = objective.component(j, x);
  }
  return tables;
}

std::vector<double> mean_of_tables(const std::vector<std::vector<double>>& tables) {
  if (tables.empty()) throw std::invalid_argument("mean_of_tables: no tables");
  std::vector<double> total(tables.front().size(), 0.0);
  for (const auto& t : tables)
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += t[k];
  const double m = static_cast<double>(tables.size());
  for (auto& v : total) v /= m;
  return total;
}

namespace {

/// Projected gradient descent on sign * f inside the box, with backtracking.
std::pair<std::vector<double>, double> polish(const FiniteSumObjective& objective, std::vector<double> x,
                                              double sign) {
  auto f = [&](const std::vector<double>& p) { return sign * objective.value(p); };
  double fx = f(x);
  double step = 1e-2;
  std::vector<double> trial(x.size());
  for (int iter = 0; iter < 2000 && step > 1e-16; ++iter) {
    auto g = objective.gradient(x);
    for (auto& v : g) v *= sign;
    bool accepted = false;
    while (step > 1e-16) {
      double decrease = 0.0, moved = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        trial[i] = std::clamp(x[i] - step * g[i], -1.0, 1.0);
        decrease += g[i] * (x[i] - trial[i]);
        moved = std::max(moved, std::abs(x[i] - trial[i]));
      }
      if (moved == 0.0) return {x, sign * fx};
      const double ft = f(trial);
      if (ft <= fx - 1e-4 * decrease) {
        accepted = true;
        const bool tiny = moved < 1e-13;
        x = trial;
        fx = ft;
        step *= 2.0;
        if (tiny) return {x, sign * fx};
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return {x, sign * fx};
}

}  // namespace

Landscape landscape(const FiniteSumObjective& objective, const GridSpec& grid, bool refine) {
  if (objective.dim() != grid.dim()) throw std::invalid_argument("landscape: dimension mismatch");
  Landscape out{grid, std::vector<double>(grid.size()), 0.0, 0.0, {}, {}, 0.0, 0.0};
  std::size_t imin = 0, imax = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.values[k] = objective.value(coord_of_index(grid, k));
    if (out.values[k] < out.values[imin]) imin = k;
    if (out.values[k] > out.values[imax]) imax = k;
  }
  out.scan_fmin = out.fmin = out.values[imin];
  out.scan_fmax = out.fmax = out.values[imax];
  out.argmin = coord_of_index(grid, imin);
  out.argmax = coord_of_index(grid, imax);
  if (refine && out.fmax > out.fmin) {
    auto [xmin, fmin] = polish(objective, out.argmin, 1.0);
    if (fmin < out.fmin) {
      out.fmin = fmin;
      out.argmin = xmin;
    }
    auto [xmax, fmax] = polish(objective, out.argmax, -1.0);
    if (fmax > out.fmax) {
      out.fmax = fmax;
      out.argmax = xmax;
    }
  }
  return out;
}

}  // namespace sqhd
