#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sqhd/config.hpp"
#include "sqhd/errors.hpp"
#include "sqhd/experiment.hpp"
#include "sqhd/validation.hpp"

namespace {

int list_registry() {
  std::cout << "objectives:";
  for (const auto& n : sqhd::objective_names()) std::cout << ' ' << n;
  std::cout << "\nschedules:";
  for (const auto& n : sqhd::schedule_names()) std::cout << ' ' << n;
  std::cout << "\npresets:";
  for (const auto& n : sqhd::preset_names()) std::cout << ' ' << n;
  std::cout << "\nvalidation suites:";
  for (const auto& n : sqhd::validation_suites()) std::cout << ' ' << n;
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic quantum Hamiltonian descent simulator"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  auto* run = app.add_subcommand("run", "Run an experiment from a config file or preset");
  auto* config_opt = run->add_option("--config", config_path, "Config file (key = value lines)");
  run->add_option("--preset", preset, "Embedded preset name")->excludes(config_opt);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Master seed (overrides the config)");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  std::string suite;
  std::string report_path;
  auto* validate = app.add_subcommand("validate", "Run a validation suite");
  validate->add_option("suite", suite, "invariants | oracle | order")->required()->check(
      CLI::IsMember(sqhd::validation_suites()));
  validate->add_option("--out", report_path, "Also write the JSON report to this file");
  validate->add_option("--seed", seed, "Seed for sampled checks");
  validate->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  app.add_subcommand("list", "List objectives, schedules and presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("list")) return list_registry();

    if (app.got_subcommand("validate")) {
      const auto report = sqhd::run_validation(suite, seed.value_or(0), threads.value_or(1));
      const auto json = report.to_json().dump(2);
      std::cout << json << '\n';
      if (!report_path.empty()) std::ofstream(report_path) << json << '\n';
      if (!report.passed()) {
        std::cerr << "validation failed:";
        for (const auto& id : report.failing()) std::cerr << ' ' << id;
        std::cerr << '\n';
        return 1;
      }
      return 0;
    }

    if (config_path.empty() && preset.empty()) throw sqhd::ConfigError("", 0, "run needs --config or --preset");
    const auto raw = config_path.empty() ? sqhd::preset_config(preset) : sqhd::RawConfig::load(config_path);
    const auto cfg = sqhd::build_experiment(raw, {seed, threads});
    const auto result = sqhd::run_experiment(cfg);
    for (const auto& path : sqhd::write_artifacts(result, out_dir)) std::cout << path.string() << '\n';
    return 0;
  } catch (const sqhd::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const sqhd::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
