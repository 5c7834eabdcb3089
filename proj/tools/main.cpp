#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stablesde/errors.hpp"
#include "stablesde/harness.hpp"

namespace {

struct RunFlags {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  long long seed = -1;
};

void print(const stablesde::RunReport& report) {
  for (const auto& c : report.checks) {
    std::cout << (c.skipped ? "SKIP" : c.pass ? "PASS" : "FAIL") << "  " << c.name;
    if (c.skipped)
      std::cout << "  (" << c.reason << ")";
    else
      std::cout << "  measured=" << c.measured << " predicted=" << c.predicted << " tol=" << c.tolerance;
    std::cout << '\n';
  }
  std::cout << report.experiment << ": " << (report.passed() ? "pass" : "fail") << " in " << report.wall_seconds
            << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable-driven SDEs with distributional drift: numerical experiments"};
  app.require_subcommand(1);

  RunFlags flags;
  std::string chosen;
  for (const auto& name : stablesde::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", flags.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "master seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--override", flags.overrides, "section.key=value, repeatable");
    sub->callback([&chosen, name] { chosen = name; });
  }
  std::string manifest, reproduce_out;
  auto* rep = app.add_subcommand("reproduce", "re-run a manifest and compare data digests");
  rep->add_option("manifest", manifest, "manifest.json of a previous run")->required();
  rep->add_option("--out", reproduce_out, "output directory");
  rep->callback([&chosen] { chosen = "reproduce"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    stablesde::RunReport report;
    if (chosen == "reproduce") {
      std::optional<std::filesystem::path> out;
      if (!reproduce_out.empty()) out = reproduce_out;
      report = stablesde::reproduce(manifest, out);
    } else {
      auto overrides = flags.overrides;
      if (flags.seed >= 0) overrides.push_back("monte_carlo.seed=" + std::to_string(flags.seed));
      if (!flags.out.empty()) overrides.push_back("output.dir=\"" + flags.out + "\"");
      std::optional<std::filesystem::path> file;
      if (!flags.config.empty()) file = flags.config;
      auto config = stablesde::resolve_config(chosen, file, overrides);
      report = stablesde::run(config);
    }
    print(report);
    return report.exit_code();
  } catch (const stablesde::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const stablesde::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return 2;
  } catch (const stablesde::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
