#include <string>
#include <utility>
#include <vector>

#include "sqhd/config.hpp"
#include "sqhd/errors.hpp"

namespace sqhd {

namespace {

std::string comparison(const std::string& objective) {
  return "experiment = fig2-" + objective +
         "\n"
         "objective = " + objective +
         "\n"
         "n_r = 128\n"
         "T = 80\n"
         "N = 32000\n"
         "checkpoints = 80\n"
         "samples = 10\n"
         "sgdm_runs = 1000\n"
         "schedule.sqhd = sgdm-style\n"
         "schedule.qhd = nagd\n"
         "runs = sqhd, qhd, sgdm\n";
}

std::vector<std::pair<std::string, std::string>> build() {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("validate-thm2",
                   "experiment = validate-thm2\n"
                   "mode = weak-approx\n"
                   "objective = sino\n"
                   "objective.slice = 0\n"
                   "n_r = 16\n"
                   "T = 10\n"
                   "N = 1000\n"
                   "stride = 50\n"
                   "schedule = sgdm-style\n");
  for (const char* name : {"dw", "mich", "sino", "sino-alt", "cubewave"}) out.emplace_back(std::string("fig2-") + name, comparison(name));
  out.emplace_back("lr-sweep",
                   "experiment = lr-sweep\n"
                   "objective = sino-alt\n"
                   "n_r = 32\n"
                   "T = 80\n"
                   "checkpoints = 80\n"
                   "samples = 10\n"
                   "sgdm_runs = 1000\n"
                   "runs = sqhd-8000, qhd-8000, sgdm-8000, sqhd-16000, qhd-16000, sgdm-16000, sqhd-32000, qhd-32000, sgdm-32000\n"
                   "run.sqhd-8000.algorithm = sqhd\n"
                   "run.sqhd-8000.N = 8000\n"
                   "run.qhd-8000.algorithm = qhd\n"
                   "run.qhd-8000.N = 8000\n"
                   "run.sgdm-8000.algorithm = sgdm\n"
                   "run.sgdm-8000.N = 8000\n"
                   "run.sqhd-16000.algorithm = sqhd\n"
                   "run.sqhd-16000.N = 16000\n"
                   "run.qhd-16000.algorithm = qhd\n"
                   "run.qhd-16000.N = 16000\n"
                   "run.sgdm-16000.algorithm = sgdm\n"
                   "run.sgdm-16000.N = 16000\n"
                   "run.sqhd-32000.algorithm = sqhd\n"
                   "run.sqhd-32000.N = 32000\n"
                   "run.qhd-32000.algorithm = qhd\n"
                   "run.qhd-32000.N = 32000\n"
                   "run.sgdm-32000.algorithm = sgdm\n"
                   "run.sgdm-32000.N = 32000\n");
  out.emplace_back("resolution-sweep",
                   "experiment = resolution-sweep\n"
                   "objective = dw\n"
                   "T = 80\n"
                   "N = 8000\n"
                   "checkpoints = 80\n"
                   "samples = 10\n"
                   "sgdm_runs = 1000\n"
                   "runs = sqhd-32, qhd-32, sqhd-128, qhd-128, sgdm\n"
                   "run.sqhd-32.algorithm = sqhd\n"
                   "run.sqhd-32.n_r = 32\n"
                   "run.qhd-32.algorithm = qhd\n"
                   "run.qhd-32.n_r = 32\n"
                   "run.sqhd-128.algorithm = sqhd\n"
                   "run.sqhd-128.n_r = 128\n"
                   "run.qhd-128.algorithm = qhd\n"
                   "run.qhd-128.n_r = 128\n");
  return out;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& preset_texts() {
  static const auto presets = build();
  return presets;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : preset_texts()) out.push_back(name);
  return out;
}

RawConfig preset_config(const std::string& name) {
  for (const auto& [key, text] : preset_texts())
    if (key == name) return RawConfig::parse(text, "preset " + name);
  throw ConfigError("base", 0, "unknown preset '" + name + "'");
}

}  // namespace sqhd
