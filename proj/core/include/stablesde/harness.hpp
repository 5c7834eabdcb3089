#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stablesde {

/// Names accepted for ExperimentConfig::experiment.
const std::vector<std::string>& experiment_names();

/// Resolved experiment configuration. On disk it is a JSON object with the
/// sections noise, drift, grid, time, monte_carlo, output and budget; infinite
/// indices are written as "inf".
struct ExperimentConfig {
  std::string experiment = "gate";

  double alpha = 1.5;
  int dim = 1;

  double p = 0.0;  // set by default_config
  double q = 0.0;
  double r = 0.0;
  double gamma = 0.9;
  int levels = 8;
  double amplitude = 1.0;
  /// Mollification level m of the PDE drift; 0 keeps the raw drift.
  int mollification = 0;

  int grid_points = 1024;
  double half_width = 3.141592653589793;

  double horizon = 0.25;
  int steps = 256;
  double euler_step = 1.0 / 1024.0;

  int paths = 10000;
  std::uint64_t seed = 1;

  std::string output_dir = "out";
  double memory_mb = 2048.0;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Defaults for one experiment (desk-scale budgets).
ExperimentConfig default_config(const std::string& experiment);

/// Defaults of the experiment, then the file, then `key=value` overrides with
/// dotted section keys (e.g. drift.gamma=0.8). An empty experiment name is
/// taken from the file. Unknown keys and wrong types throw ConfigError.
ExperimentConfig resolve_config(const std::string& experiment, const std::optional<std::filesystem::path>& file,
                                const std::vector<std::string>& overrides);

/// Same, from JSON text instead of a file.
ExperimentConfig config_from_json(const std::string& text, const std::string& experiment = "",
                                  const std::vector<std::string>& overrides = {});
std::string config_to_json(const ExperimentConfig& config);

enum class Relation {
  within,    // |measured - predicted| <= tolerance
  at_least,  // measured >= predicted - tolerance
  at_most,   // measured <= predicted + tolerance
  above,     // measured > predicted
};

struct CheckResult {
  std::string name;
  std::string anchor;  // formula the predicted value comes from
  double predicted = 0.0;
  double measured = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::within;
  bool pass = false;
  bool skipped = false;
  std::string reason;
};

CheckResult make_check(std::string name, std::string anchor, Relation relation, double predicted, double measured,
                       double tolerance = 0.0);
CheckResult skipped_check(std::string name, std::string anchor, std::string reason);

struct OutputFile {
  std::string name;
  std::string sha256;
};

struct RunReport {
  std::string experiment;
  std::string version;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  /// Scalar diagnostics that are reported but not judged.
  std::vector<std::pair<std::string, double>> values;
  std::vector<OutputFile> outputs;
  double wall_seconds = 0.0;

  bool passed() const;
  /// 0 when every non-skipped check passes, 1 otherwise.
  int exit_code() const;
  std::string to_json() const;
};

/// Library version written into manifests.
std::string version();

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Rough peak memory of an experiment in bytes.
double estimate_memory_bytes(const ExperimentConfig& config);

/// Runs the experiment and writes report.json, manifest.json and the data
/// CSVs into config.output_dir. Throws ConfigError on invalid input and
/// ResourceError, before any compute, when the memory estimate exceeds the budget.
RunReport run(const ExperimentConfig& config);

/// Re-runs a manifest into out_dir (default: <manifest dir>/reproduce) and adds
/// one digest check per data file. Throws ConfigError for a missing or
/// malformed manifest or a version mismatch.
RunReport reproduce(const std::filesystem::path& manifest, const std::optional<std::filesystem::path>& out_dir = {});

}  // namespace stablesde
