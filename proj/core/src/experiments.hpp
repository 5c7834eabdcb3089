#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "stablesde/harness.hpp"

namespace stablesde::detail {

struct ExperimentOutput {
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::string> files;  // relative to the output directory
};

ExperimentOutput run_experiment(const ExperimentConfig& config, const std::filesystem::path& dir);

}  // namespace stablesde::detail
