#include "sqhd/experiment.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "sqhd/errors.hpp"
#include "sqhd/io.hpp"
#include "sqhd/parallel.hpp"
#include "sqhd/sgdm.hpp"

namespace sqhd {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

ReferenceExtremes reference_extremes(const FiniteSumObjective& objective, int resolution) {
  const auto land = landscape(objective, GridSpec(objective.dim(), resolution));
  return {resolution, land.scan_fmin, land.scan_fmax, land.fmin, land.fmax, land.argmin, land.argmax};
}

RunOutcome execute_run(const RunSpec& spec, const ReferenceExtremes& reference) {
  RunOutcome out;
  out.spec = spec;
  RunConfig cfg = spec.run;
  cfg.fmin = reference.fmin;
  cfg.fmax = reference.fmax;
  out.spec.run = cfg;
  out.degenerate_range = !(cfg.fmax > cfg.fmin);
  const auto start = std::chrono::steady_clock::now();
  try {
    if (spec.algorithm == Algorithm::Sgdm) {
      EnsembleConfig ec;
      ec.eta = cfg.eta;
      ec.steps = cfg.steps;
      ec.runs = spec.sgdm_runs;
      ec.seed = cfg.seed;
      ec.delta = cfg.delta;
      ec.fmin = cfg.fmin;
      ec.fmax = cfg.fmax;
      ec.stride = cfg.checkpoint_stride;
      ec.threads = cfg.threads;
      auto curves = sgdm_ensemble(*cfg.objective, ec);
      out.iterations = std::move(curves.iterations);
      out.points = std::move(curves.points);
      out.has_stderr = spec.sgdm_runs > 1;
      out.stderr_loss = std::move(curves.stderr_loss);
      out.stderr_success = std::move(curves.stderr_success);
      out.final_points = std::move(curves.final_points);
    } else {
      Trajectory t;
      if (spec.algorithm == Algorithm::Qhd) {
        cfg.samples = 1;
        out.spec.run.samples = 1;
        t = run_qhd(cfg);
      } else if (spec.algorithm == Algorithm::Sqhd) {
        t = run_sqhd(cfg);
      } else {
        t = run_adaptive_sqhd(cfg);
      }
      out.iterations = std::move(t.iterations);
      out.points = std::move(t.points);
      out.has_stderr = cfg.samples > 1;
      out.stderr_loss = std::move(t.stderr_loss);
      out.stderr_success = std::move(t.stderr_success);
      out.final_distribution = std::move(t.final_distribution);
      out.final_points = std::move(t.measured_points);
      out.max_norm_deviation = t.max_norm_deviation;
    }
  } catch (const InvariantViolation& e) {
    throw InvariantViolation("run '" + spec.label + "': " + e.what());
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  result.config = config;
  result.started_utc = utc_now();
  result.reference = reference_extremes(*config.objective, config.reference_resolution);
  if (config.mode == Mode::WeakApprox) {
    WeakApproxOptions options;
    options.mode = config.adaptive_weak_approx ? WeakApproxMode::Adaptive : WeakApproxMode::Standard;
    options.noise_sign = config.noise_sign;
    RunConfig run = config.weak_run;
    run.fmin = result.reference.fmin;
    run.fmax = result.reference.fmax;
    try {
      result.weak = weak_approx_report(run, options);
    } catch (const InvariantViolation& e) {
      throw InvariantViolation("run 'weak-approx': " + std::string(e.what()));
    }
  } else {
    const std::size_t count = config.runs.size();
    const int inner = std::max(1, config.threads / static_cast<int>(std::max<std::size_t>(1, count)));
    result.runs.resize(count);
    parallel_for(count, config.threads, [&](std::size_t i) {
      RunSpec spec = config.runs[i];
      spec.run.threads = inner;
      result.runs[i] = execute_run(spec, result.reference);
    });
  }
  result.finished_utc = utc_now();
  return result;
}

std::string trajectory_csv(const RunOutcome& run) {
  std::ostringstream out;
  out << "iteration,time,expected_loss,success_prob";
  if (run.has_stderr) out << ",stderr_loss,stderr_succ";
  out << '\n';
  for (std::size_t c = 0; c < run.points.size(); ++c) {
    const auto& p = run.points[c];
    out << run.iterations[c] << ',' << format_double(p.time) << ',' << format_double(p.expected_loss) << ','
        << format_double(p.success_prob);
    if (run.has_stderr) out << ',' << format_double(run.stderr_loss[c]) << ',' << format_double(run.stderr_success[c]);
    out << '\n';
  }
  return out.str();
}

std::string final_points_csv(const std::vector<std::vector<double>>& points) {
  std::ostringstream out;
  const std::size_t d = points.empty() ? 0 : points.front().size();
  for (std::size_t a = 0; a < d; ++a) out << (a ? "," : "") << 'x' << a;
  out << '\n';
  for (const auto& p : points) {
    for (std::size_t a = 0; a < p.size(); ++a) out << (a ? "," : "") << format_double(p[a]);
    out << '\n';
  }
  return out.str();
}

nlohmann::json weak_report_json(const WeakApproxReport& report) {
  auto series = [](const WeakApproxSeries& s) {
    nlohmann::json per = nlohmann::json::array();
    for (std::size_t i = 0; i < s.times.size(); ++i) per.push_back({{"time", s.times[i]}, {"trace_distance", s.distances[i]}});
    return nlohmann::json{{"eta", s.eta},
                          {"max_trace_distance", s.max_distance},
                          {"channel_method", s.channel_method},
                          {"integrator_steps", s.integrator_steps},
                          {"start_time", s.start_time},
                          {"per_checkpoint", per}};
  };
  return {{"eta", report.coarse.eta},
          {"eta_half", report.fine.eta},
          {"max_trace_distance", report.coarse.max_distance},
          {"max_trace_distance_half", report.fine.max_distance},
          {"empirical_order", report.empirical_order},
          {"per_checkpoint", {{"eta", series(report.coarse)}, {"eta_half", series(report.fine)}}}};
}

nlohmann::json summary_json(const ExperimentResult& result) {
  const auto& cfg = result.config;
  const auto& obj = *cfg.objective;
  nlohmann::json j;
  j["schema_version"] = 1;
  j["experiment"] = cfg.name;
  j["mode"] = cfg.mode == Mode::Compare ? "compare" : "weak-approx";
  j["started_utc"] = result.started_utc;
  j["finished_utc"] = result.finished_utc;
  j["master_seed"] = cfg.master_seed;
  j["config"] = cfg.resolved;
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [k, v] : obj.metadata()) meta[k] = v;
  j["objective"] = {{"name", obj.name()}, {"dim", obj.dim()}, {"components", obj.components()}, {"metadata", meta}};
  const auto& ref = result.reference;
  j["reference"] = {{"resolution_per_axis", ref.resolution},
                    {"method", "exhaustive scan refined by box-constrained projected-gradient descent"},
                    {"scan_fmin", ref.scan_fmin},
                    {"scan_fmax", ref.scan_fmax},
                    {"fmin", ref.fmin},
                    {"fmax", ref.fmax},
                    {"argmin", ref.argmin},
                    {"argmax", ref.argmax},
                    {"normalizable", ref.fmax > ref.fmin}};
  std::string target = "n/a";
  for (const auto& [k, v] : obj.metadata())
    if (k == "target_convention") target = v;
  j["flags"] = {{"kinetic_sign", cfg.kinetic_sign == KineticSign::Standard ? "standard" : "flipped"},
                {"noise_sign", cfg.noise_sign},
                {"coefficient_clamp", cfg.coefficient_clamp},
                {"sino_target_convention", target},
                {"sgdm_box_clamp", true},
                {"constant_objective_success", "1 when fmax <= fmin"},
                {"boundary", "periodic"},
                {"delta", cfg.delta}};
  if (result.weak) {
    j["weak_approx"] = weak_report_json(*result.weak);
    j["weak_approx"]["variant"] = cfg.adaptive_weak_approx ? "adaptive" : "standard";
    j["weak_approx"]["n_r"] = cfg.weak_run.grid.points_per_axis();
    j["weak_approx"]["N"] = cfg.weak_run.steps;
    j["weak_approx"]["T"] = cfg.weak_run.total_time();
    j["weak_approx"]["schedule"] = cfg.weak_run.schedule.name;
  }
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : result.runs) {
    const auto& rc = r.spec.run;
    nlohmann::json run{{"label", r.spec.label},
                       {"algorithm", algorithm_name(r.spec.algorithm)},
                       {"schedule", rc.schedule.name},
                       {"n_r", rc.grid.points_per_axis()},
                       {"N", rc.steps},
                       {"eta", rc.eta},
                       {"T", rc.total_time()},
                       {"checkpoint_stride", rc.checkpoint_stride},
                       {"seed", rc.seed},
                       {"wall_seconds", r.wall_seconds},
                       {"trajectory_file", r.spec.label + ".csv"}};
    nlohmann::json streams = nlohmann::json::array();
    if (r.spec.algorithm == Algorithm::Sgdm) {
      run["runs"] = r.spec.sgdm_runs;
      run["stream_seed_rule"] = "derive_seed(seed, run_index)";
      run["final_points_file"] = r.spec.label + "_final_points.csv";
    } else {
      run["samples"] = rc.samples;
      if (r.spec.algorithm != Algorithm::Qhd) {
        for (int s = 0; s < rc.samples; ++s) streams.push_back(derive_seed(rc.seed, static_cast<std::uint64_t>(s)));
        run["stream_seeds"] = streams;
      }
      run["distribution_file"] = r.spec.label + "_distribution.csv";
      run["max_norm_deviation"] = r.max_norm_deviation;
      run["measured_points"] = r.final_points;
    }
    if (!r.points.empty()) {
      const auto& last = r.points.back();
      run["final"] = {{"time", last.time}, {"expected_loss", last.expected_loss}, {"success_prob", last.success_prob}};
      if (r.has_stderr) {
        run["final"]["stderr_loss"] = r.stderr_loss.back();
        run["final"]["stderr_succ"] = r.stderr_success.back();
      }
    }
    run["degenerate_range"] = r.degenerate_range;
    runs.push_back(run);
  }
  j["runs"] = runs;
  return j;
}

std::vector<std::filesystem::path> write_artifacts(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& r : result.runs) {
    const auto traj = out_dir / (r.spec.label + ".csv");
    write_file(traj, trajectory_csv(r));
    written.push_back(traj);
    if (r.spec.algorithm == Algorithm::Sgdm) {
      const auto path = out_dir / (r.spec.label + "_final_points.csv");
      write_file(path, final_points_csv(r.final_points));
      written.push_back(path);
    } else {
      const auto path = out_dir / (r.spec.label + "_distribution.csv");
      std::ostringstream body;
      write_distribution_csv(body, r.spec.run.grid, r.final_distribution);
      write_file(path, body.str());
      written.push_back(path);
    }
  }
  if (result.weak) {
    const auto path = out_dir / "weak_approx.json";
    write_file(path, weak_report_json(*result.weak).dump(2) + "\n");
    written.push_back(path);
  }
  const auto summary = out_dir / "summary.json";
  write_file(summary, summary_json(result).dump(2) + "\n");
  written.push_back(summary);
  return written;
}

}  // namespace sqhd
