#include "sqhd/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "sqhd/errors.hpp"
#include "sqhd/io.hpp"

namespace sqhd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

RawConfig RawConfig::parse(const std::string& text, const std::string& source) {
  RawConfig out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", number, "expected 'key = value' in " + source);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", number, "empty key in " + source);
    if (out.entries.count(key)) throw ConfigError(key, number, "duplicate key in " + source);
    out.entries[key] = {value, number, source};
  }
  return out;
}

RawConfig RawConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path);
}

void RawConfig::merge(const RawConfig& other) {
  for (const auto& [key, entry] : other.entries) entries[key] = entry;
}

const RawConfig::Entry* RawConfig::find(const std::string& key) const {
  const auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

std::vector<std::string> objective_names() { return {"dw", "mich", "cubewave", "sino", "sino-alt", "quadratic"}; }

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Sqhd: return "sqhd";
    case Algorithm::Qhd: return "qhd";
    case Algorithm::SqhdAdaptive: return "sqhd-adaptive";
    case Algorithm::Sgdm: return "sgdm";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  for (auto a : {Algorithm::Sqhd, Algorithm::Qhd, Algorithm::SqhdAdaptive, Algorithm::Sgdm})
    if (algorithm_name(a) == name) return a;
  return std::nullopt;
}

std::shared_ptr<const FiniteSumObjective> build_objective(const ObjectiveSpec& spec) {
  std::shared_ptr<FiniteSumObjective> base;
  if (spec.name == "dw") {
    base = std::make_shared<FiniteSumObjective>(make_dw(spec.theta, spec.scale));
  } else if (spec.name == "mich") {
    base = std::make_shared<FiniteSumObjective>(make_mich());
  } else if (spec.name == "cubewave") {
    base = std::make_shared<FiniteSumObjective>(make_cubewave());
  } else if (spec.name == "sino" || spec.name == "sino-alt") {
    base = std::make_shared<FiniteSumObjective>(make_sino(parse_sino_variant(spec.name), spec.seed));
  } else if (spec.name == "quadratic") {
    base = std::make_shared<FiniteSumObjective>(make_convex_quadratic(spec.centers));
  } else {
    throw std::invalid_argument("unknown objective '" + spec.name + "'");
  }
  if (spec.slice.empty()) return base;
  return std::make_shared<FiniteSumObjective>(make_slice(*base, spec.slice));
}

namespace {

/// Typed access that remembers which keys were consumed.
class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  const RawConfig::Entry* entry(const std::string& key) {
    used_.insert(key);
    return raw_.find(key);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const auto* e = entry(key);
    return e ? e->value : fallback;
  }

  double real(const std::string& key, double fallback) {
    const auto* e = entry(key);
    return e ? to_real(key, *e) : fallback;
  }

  long integer(const std::string& key, long fallback, long min_value) {
    const auto* e = entry(key);
    if (!e) return fallback;
    long value = 0;
    const auto& s = e->value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError(key, e->line, "expected an integer, got '" + s + "'");
    if (value < min_value) throw ConfigError(key, e->line, "must be >= " + std::to_string(min_value));
    return value;
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
    const auto* e = entry(key);
    if (!e) return fallback;
    std::uint64_t value = 0;
    const auto& s = e->value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError(key, e->line, "expected a non-negative integer, got '" + s + "'");
    return value;
  }

  std::vector<double> reals(const std::string& key, const std::string& value, int line, char sep) {
    std::vector<double> out;
    for (const auto& item : split(value, sep)) out.push_back(to_real(key, {item, line, ""}));
    return out;
  }

  int line_of(const std::string& key) const {
    const auto* e = raw_.find(key);
    return e ? e->line : 0;
  }

  void reject_unused() const {
    for (const auto& [key, e] : raw_.entries)
      if (!used_.count(key)) throw ConfigError(key, e.line, "unknown key");
  }

  const RawConfig& raw() const { return raw_; }

 private:
  static double to_real(const std::string& key, const RawConfig::Entry& e) {
    double value = 0.0;
    const auto& s = e.value;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
      throw ConfigError(key, e.line, "expected a number, got '" + s + "'");
    return value;
  }

  const RawConfig& raw_;
  std::set<std::string> used_;
};

RawConfig resolve_base(const RawConfig& raw, int depth = 0) {
  const auto* base = raw.find("base");
  if (!base) return raw;
  if (depth > 4) throw ConfigError("base", base->line, "base presets nest too deeply");
  RawConfig merged = resolve_base(preset_config(base->value), depth + 1);
  merged.entries.erase("base");
  RawConfig own = raw;
  own.entries.erase("base");
  merged.merge(own);
  return merged;
}

KineticSign parse_sign(const std::string& key, const RawConfig::Entry* e) {
  if (!e || e->value == "standard") return KineticSign::Standard;
  if (e->value == "flipped") return KineticSign::Flipped;
  throw ConfigError(key, e->line, "expected 'standard' or 'flipped'");
}

}  // namespace

ExperimentConfig build_experiment(const RawConfig& input, const CliOverrides& overrides) {
  const RawConfig raw = resolve_base(input);
  Reader r(raw);
  ExperimentConfig cfg;

  cfg.name = r.text("experiment", "experiment");
  if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos)
    throw ConfigError("experiment", r.line_of("experiment"), "name must be non-empty without path separators");

  const auto mode = r.text("mode", "compare");
  if (mode == "compare") {
    cfg.mode = Mode::Compare;
  } else if (mode == "weak-approx") {
    cfg.mode = Mode::WeakApprox;
  } else {
    throw ConfigError("mode", r.line_of("mode"), "expected 'compare' or 'weak-approx'");
  }
  const auto variant = r.text("weak_approx.variant", "standard");
  if (variant != "standard" && variant != "adaptive")
    throw ConfigError("weak_approx.variant", r.line_of("weak_approx.variant"), "expected 'standard' or 'adaptive'");
  cfg.adaptive_weak_approx = variant == "adaptive";

  // Objective.
  auto& spec = cfg.objective_spec;
  spec.name = r.text("objective", "");
  const auto names = objective_names();
  if (std::find(names.begin(), names.end(), spec.name) == names.end())
    throw ConfigError("objective", r.line_of("objective"), "unknown or missing objective '" + spec.name + "'");
  spec.seed = r.unsigned64("objective.seed", 0);
  // dw draws its rotation from the objective seed unless one is given.
  spec.theta = r.real("objective.theta", spec.name == "dw" ? Rng(spec.seed).uniform(0.0, 2.0 * std::numbers::pi) : 0.0);
  spec.scale = r.real("objective.scale", 1.2);
  if (const auto* e = r.entry("objective.centers")) {
    for (const auto& c : split(e->value, ';')) spec.centers.push_back(r.reals("objective.centers", c, e->line, ','));
  } else if (spec.name == "quadratic") {
    throw ConfigError("objective.centers", 0, "quadratic objective needs centers, e.g. '-0.5; 0.5'");
  }
  if (const auto* e = r.entry("objective.slice")) spec.slice = r.reals("objective.slice", e->value, e->line, ',');
  try {
    cfg.objective = build_objective(spec);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("objective", r.line_of("objective"), ex.what());
  }

  // Shared settings.
  cfg.master_seed = overrides.seed ? *overrides.seed : r.unsigned64("seed", 0);
  if (overrides.threads && *overrides.threads < 1) throw ConfigError("threads", 0, "must be >= 1");
  cfg.threads = overrides.threads ? *overrides.threads : static_cast<int>(r.integer("threads", 1, 1));
  cfg.reference_resolution = static_cast<int>(r.integer("reference_resolution", 1024, 2));
  cfg.delta = r.real("delta", default_delta(cfg.objective->name()));
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) throw ConfigError("delta", r.line_of("delta"), "must be in (0, 1]");
  cfg.kinetic_sign = parse_sign("kinetic_sign", r.entry("kinetic_sign"));
  cfg.noise_sign = r.real("noise_sign", 1.0);
  if (cfg.noise_sign != 1.0 && cfg.noise_sign != -1.0)
    throw ConfigError("noise_sign", r.line_of("noise_sign"), "must be +1 or -1");
  cfg.coefficient_clamp = r.real("coefficient_clamp", 0.0);
  if (cfg.coefficient_clamp < 0.0)
    throw ConfigError("coefficient_clamp", r.line_of("coefficient_clamp"), "must be >= 0 (0 disables)");
  const double si_c = r.real("strong_ideal.c", 2.0);
  const double si_t_eps = r.real("strong_ideal.t_eps", 0.01);
  if (!(si_c > 1.0)) throw ConfigError("strong_ideal.c", r.line_of("strong_ideal.c"), "must exceed 1 so that u < 1");
  if (!(si_t_eps > 0.0)) throw ConfigError("strong_ideal.t_eps", r.line_of("strong_ideal.t_eps"), "must be > 0");

  const double total_time = r.real("T", 80.0);
  if (!(total_time > 0.0)) throw ConfigError("T", r.line_of("T"), "must be > 0");
  const long default_n = r.integer("N", 8000, 1);
  const long default_nr = r.integer("n_r", 32, 2);
  const long default_stride = r.integer("stride", 0, 0);
  const long checkpoints = r.integer("checkpoints", 80, 1);
  const long default_samples = r.integer("samples", 10, 1);
  const long default_sgdm_runs = r.integer("sgdm_runs", 1000, 1);

  auto schedule_for = [&](const std::string& key, const std::string& fallback) {
    const auto name = r.text(key, fallback);
    try {
      return make_schedule(name, si_c, si_t_eps);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(key, r.line_of(key), ex.what());
    }
  };

  auto base_run = [&](long n, long nr, long stride, const Schedule& schedule, const std::string& field) {
    RunConfig run;
    run.objective = cfg.objective;
    run.schedule = schedule;
    try {
      run.grid = GridSpec(cfg.objective->dim(), static_cast<int>(nr));
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(field, r.line_of(field), ex.what());
    }
    run.eta = total_time / static_cast<double>(n);
    run.steps = n;
    run.checkpoint_stride = stride > 0 ? stride : std::max(1L, n / checkpoints);
    run.delta = cfg.delta;
    run.kinetic_sign = cfg.kinetic_sign;
    run.coefficient_clamp = cfg.coefficient_clamp;
    run.threads = cfg.threads;
    return run;
  };

  if (cfg.mode == Mode::WeakApprox) {
    cfg.weak_run = base_run(default_n, default_nr, default_stride, schedule_for("schedule", "sgdm-style"), "n_r");
    cfg.weak_run.seed = cfg.master_seed;
    if (cfg.weak_run.grid.size() > 256) throw ConfigError("n_r", r.line_of("n_r"), "weak-approx needs at most 256 grid points");
  }

  // Runs.
  std::vector<std::string> labels;
  if (const auto* e = r.entry("runs")) {
    for (const auto& label : split(e->value, ','))
      if (!label.empty()) labels.push_back(label);
  }
  if (cfg.mode == Mode::Compare && labels.empty())
    throw ConfigError("runs", r.line_of("runs"), "run list is empty");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& label = labels[i];
    if (!seen.insert(label).second) throw ConfigError("runs", r.line_of("runs"), "duplicate run label '" + label + "'");
    if (label.find_first_of("/\\") != std::string::npos)
      throw ConfigError("runs", r.line_of("runs"), "run label '" + label + "' contains a path separator");
    const std::string prefix = "run." + label + ".";
    RunSpec spec_run;
    spec_run.label = label;
    const auto alg_name = r.text(prefix + "algorithm", label);
    const auto alg = parse_algorithm(alg_name);
    if (!alg) {
      const auto key = r.raw().find(prefix + "algorithm") ? prefix + "algorithm" : std::string("runs");
      throw ConfigError(key, r.line_of(key), "unknown algorithm '" + alg_name + "' (sqhd, qhd, sqhd-adaptive, sgdm)");
    }
    spec_run.algorithm = *alg;
    const auto alg_key = algorithm_name(*alg);
    const std::string default_schedule = *alg == Algorithm::Qhd ? "nagd" : "sgdm-style";
    const auto schedule = schedule_for(r.raw().find(prefix + "schedule") ? prefix + "schedule" : "schedule." + alg_key,
                                       r.text("schedule." + alg_key, default_schedule));
    const long n = r.integer(prefix + "N", default_n, 1);
    const long nr = r.integer(prefix + "n_r", default_nr, 2);
    const long stride = r.integer(prefix + "stride", default_stride, 0);
    spec_run.run = base_run(n, nr, stride, schedule, r.raw().find(prefix + "n_r") ? prefix + "n_r" : "n_r");
    spec_run.run.samples = static_cast<int>(r.integer(prefix + "samples", default_samples, 1));
    spec_run.sgdm_runs = static_cast<int>(r.integer(prefix + "sgdm_runs", default_sgdm_runs, 1));
    spec_run.run.seed = derive_seed(cfg.master_seed, i);
    cfg.runs.push_back(std::move(spec_run));
  }
  for (const auto* key : {"schedule.sqhd", "schedule.qhd", "schedule.sqhd-adaptive", "schedule.sgdm", "schedule"})
    r.entry(key);
  r.reject_unused();

  for (const auto& [key, e] : raw.entries) cfg.resolved[key] = e.value;
  cfg.resolved["seed"] = std::to_string(cfg.master_seed);
  cfg.resolved["threads"] = std::to_string(cfg.threads);
  cfg.resolved["delta"] = format_double(cfg.delta);
  cfg.resolved["kinetic_sign"] = cfg.kinetic_sign == KineticSign::Standard ? "standard" : "flipped";
  cfg.resolved["noise_sign"] = format_double(cfg.noise_sign);
  cfg.resolved["coefficient_clamp"] = format_double(cfg.coefficient_clamp);
  if (spec.name == "dw") cfg.resolved["objective.theta"] = format_double(spec.theta);
  cfg.resolved["reference_resolution"] = std::to_string(cfg.reference_resolution);
  return cfg;
}

}  // namespace sqhd
