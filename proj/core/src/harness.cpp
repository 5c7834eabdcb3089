#include "stablesde/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "experiments.hpp"
#include "stablesde/errors.hpp"

namespace stablesde {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json index_value(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

double read_index(const json& j, const std::string& key) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return kInf;
    throw ConfigError(key + ": expected a number or \"inf\", got \"" + s + "\"");
  }
  if (!j.is_number()) throw ConfigError(key + ": expected a number");
  return j.get<double>();
}

double read_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key + ": expected a number");
  return j.get<double>();
}

int read_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError(key + ": expected an integer");
  return j.get<int>();
}

json to_json_object(const ExperimentConfig& c) {
  return json{
      {"experiment", c.experiment},
      {"noise", {{"alpha", c.alpha}, {"dim", c.dim}}},
      {"drift",
       {{"p", index_value(c.p)},
        {"q", index_value(c.q)},
        {"r", index_value(c.r)},
        {"gamma", c.gamma},
        {"levels", c.levels},
        {"amplitude", c.amplitude},
        {"mollification", c.mollification}}},
      {"grid", {{"points", c.grid_points}, {"half_width", c.half_width}}},
      {"time", {{"horizon", c.horizon}, {"steps", c.steps}, {"euler_step", c.euler_step}}},
      {"monte_carlo", {{"paths", c.paths}, {"seed", c.seed}}},
      {"output", {{"dir", c.output_dir}}},
      {"budget", {{"memory_mb", c.memory_mb}}},
  };
}

ExperimentConfig from_json_object(const json& j) {
  ExperimentConfig c;
  c.experiment = j.at("experiment").get<std::string>();
  const auto& n = j.at("noise");
  c.alpha = read_number(n.at("alpha"), "noise.alpha");
  c.dim = read_int(n.at("dim"), "noise.dim");
  const auto& d = j.at("drift");
  c.p = read_index(d.at("p"), "drift.p");
  c.q = read_index(d.at("q"), "drift.q");
  c.r = read_index(d.at("r"), "drift.r");
  c.gamma = read_number(d.at("gamma"), "drift.gamma");
  c.levels = read_int(d.at("levels"), "drift.levels");
  c.amplitude = read_number(d.at("amplitude"), "drift.amplitude");
  c.mollification = read_int(d.at("mollification"), "drift.mollification");
  const auto& g = j.at("grid");
  c.grid_points = read_int(g.at("points"), "grid.points");
  c.half_width = read_number(g.at("half_width"), "grid.half_width");
  const auto& t = j.at("time");
  c.horizon = read_number(t.at("horizon"), "time.horizon");
  c.steps = read_int(t.at("steps"), "time.steps");
  c.euler_step = read_number(t.at("euler_step"), "time.euler_step");
  const auto& mc = j.at("monte_carlo");
  c.paths = read_int(mc.at("paths"), "monte_carlo.paths");
  if (!mc.at("seed").is_number_unsigned()) throw ConfigError("monte_carlo.seed: expected a non-negative integer");
  c.seed = mc.at("seed").get<std::uint64_t>();
  if (!j.at("output").at("dir").is_string()) throw ConfigError("output.dir: expected a string");
  c.output_dir = j.at("output").at("dir").get<std::string>();
  c.memory_mb = read_number(j.at("budget").at("memory_mb"), "budget.memory_mb");
  return c;
}

// Every key of `user` must exist in `schema`; sections must stay objects.
void merge_checked(json& target, const json& user, const std::string& prefix) {
  if (!user.is_object()) throw ConfigError((prefix.empty() ? "configuration" : prefix) + ": expected an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!target.contains(it.key())) throw ConfigError("unknown configuration key: " + key);
    auto& slot = target[it.key()];
    if (slot.is_object()) {
      merge_checked(slot, it.value(), key);
    } else {
      if (it.value().is_object() || it.value().is_array() || it.value().is_null())
        throw ConfigError(key + ": expected a scalar");
      slot = it.value();
    }
  }
}

void apply_override(json& target, const std::string& item) {
  auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + item);
  std::string path = item.substr(0, eq);
  std::string text = item.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json user = value;
  std::size_t end = path.size();
  while (true) {
    auto dot = path.rfind('.', end - 1);
    std::string key = path.substr(dot == std::string::npos ? 0 : dot + 1, end - (dot == std::string::npos ? 0 : dot + 1));
    if (key.empty()) throw ConfigError("malformed override key: " + path);
    user = json{{key, user}};
    if (dot == std::string::npos) break;
    end = dot;
  }
  merge_checked(target, user, "");
}

ExperimentConfig resolve(const std::string& experiment, const json* file, const std::vector<std::string>& overrides) {
  std::string name = experiment;
  if (name.empty() && file && file->is_object() && file->contains("experiment")) {
    if (!(*file)["experiment"].is_string()) throw ConfigError("experiment: expected a string");
    name = (*file)["experiment"].get<std::string>();
  }
  if (name.empty()) name = "gate";
  for (const auto& o : overrides)
    if (o.rfind("experiment=", 0) == 0) name = o.substr(11);
  json target = to_json_object(default_config(name));
  if (file) {
    json user = *file;
    if (user.is_object()) user.erase("experiment");
    merge_checked(target, user, "");
  }
  for (const auto& o : overrides) apply_override(target, o);
  target["experiment"] = name;
  ExperimentConfig c = from_json_object(target);
  c.validate();
  return c;
}

std::string relation_name(Relation r) {
  switch (r) {
    case Relation::within: return "within";
    case Relation::at_least: return "at_least";
    case Relation::at_most: return "at_most";
    case Relation::above: return "above";
  }
  return "within";
}

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string hex(const unsigned char* data, unsigned len) {
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(data[i]);
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text << '\n';
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"gate",     "kernel-verify",  "besov-verify", "product-bound",
                                                 "schauder", "dynamics",       "young",        "identify-drift",
                                                 "uniqueness", "krylov"};
  return names;
}

void ExperimentConfig::validate() const {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end())
    throw ConfigError("unknown experiment: " + experiment);
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ConfigError("noise.alpha must lie in (1, 2]");
  if (dim != 1 && dim != 2) throw ConfigError("noise.dim must be 1 or 2");
  for (auto [v, name] : {std::pair{p, "drift.p"}, std::pair{q, "drift.q"}, std::pair{r, "drift.r"}})
    if (!(v >= 1.0)) throw ConfigError(std::string(name) + " must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("drift.gamma must lie in (0, 1)");
  if (levels < 1 || levels > 20) throw ConfigError("drift.levels must lie in [1, 20]");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ConfigError("drift.amplitude must be finite and >= 0");
  if (mollification < 0 || mollification > 30) throw ConfigError("drift.mollification must lie in [0, 30]");
  if (grid_points < 16 || (grid_points & (grid_points - 1)) != 0)
    throw ConfigError("grid.points must be a power of two >= 16");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ConfigError("grid.half_width must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("time.horizon must be positive");
  if (steps < 2) throw ConfigError("time.steps must be >= 2");
  if (!(euler_step > 0.0 && euler_step <= horizon)) throw ConfigError("time.euler_step must lie in (0, horizon]");
  double ratio = horizon / euler_step;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) throw ConfigError("time.horizon / time.euler_step must be an integer");
  if (paths < 1) throw ConfigError("monte_carlo.paths must be >= 1");
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
  if (!(memory_mb > 0.0)) throw ConfigError("budget.memory_mb must be positive");
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.p = c.q = c.r = kInf;
  const double pi = 3.141592653589793;
  if (experiment == "kernel-verify") {
    c.grid_points = 4096;
    c.half_width = 64.0;
  } else if (experiment == "product-bound") {
    c.grid_points = 4096;
    c.half_width = pi;
    c.q = 1.0;  // the norm is then taken with summability q' = inf
  } else if (experiment == "schauder") {
    c.grid_points = 4096;
    c.half_width = pi;
    c.horizon = 0.05;
    c.steps = 256;
    c.euler_step = c.horizon / 256.0;
    c.levels = 11;
    c.amplitude = 0.2;
    c.mollification = 11;
  } else if (experiment == "dynamics" || experiment == "young" || experiment == "identify-drift" ||
             experiment == "krylov") {
    c.levels = 4;
    c.horizon = 0.25;
    c.euler_step = 1.0 / 1024.0;
  } else if (experiment == "uniqueness") {
    c.levels = 4;
    c.horizon = 0.1;
    c.euler_step = 0.1 / 1024.0;
  }
  return c;
}

ExperimentConfig resolve_config(const std::string& experiment, const std::optional<std::filesystem::path>& file,
                                const std::vector<std::string>& overrides) {
  if (!file) return resolve(experiment, nullptr, overrides);
  std::ifstream is(*file);
  if (!is) throw ConfigError("cannot read configuration " + file->string());
  json j = json::parse(is, nullptr, false);
  if (j.is_discarded()) throw ConfigError("configuration is not valid JSON: " + file->string());
  return resolve(experiment, &j, overrides);
}

ExperimentConfig config_from_json(const std::string& text, const std::string& experiment,
                                  const std::vector<std::string>& overrides) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("configuration is not valid JSON");
  return resolve(experiment, &j, overrides);
}

std::string config_to_json(const ExperimentConfig& config) { return to_json_object(config).dump(2); }

CheckResult make_check(std::string name, std::string anchor, Relation relation, double predicted, double measured,
                       double tolerance) {
  CheckResult c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.relation = relation;
  c.predicted = predicted;
  c.measured = measured;
  c.tolerance = tolerance;
  switch (relation) {
    case Relation::within: c.pass = std::abs(measured - predicted) <= tolerance; break;
    case Relation::at_least: c.pass = measured >= predicted - tolerance; break;
    case Relation::at_most: c.pass = measured <= predicted + tolerance; break;
    case Relation::above: c.pass = measured > predicted; break;
  }
  if (std::isnan(measured)) c.pass = false;
  return c;
}

CheckResult skipped_check(std::string name, std::string anchor, std::string reason) {
  CheckResult c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.skipped = true;
  c.reason = std::move(reason);
  c.predicted = c.measured = std::numeric_limits<double>::quiet_NaN();
  return c;
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.skipped || c.pass; });
}

int RunReport::exit_code() const { return passed() ? 0 : 1; }

std::string RunReport::to_json() const {
  json rows = json::array();
  for (const auto& c : checks) {
    json row = {{"name", c.name},
                {"anchor", c.anchor},
                {"predicted", finite_or_string(c.predicted)},
                {"measured", finite_or_string(c.measured)},
                {"tolerance", finite_or_string(c.tolerance)},
                {"relation", relation_name(c.relation)},
                {"pass", c.pass},
                {"skipped", c.skipped}};
    if (c.skipped) row["reason"] = c.reason;
    rows.push_back(row);
  }
  json vals = json::object();
  for (const auto& [k, v] : values) vals[k] = finite_or_string(v);
  json outs = json::array();
  for (const auto& o : outputs) outs.push_back({{"name", o.name}, {"sha256", o.sha256}});
  json j = {{"experiment", experiment}, {"version", version},   {"seed", seed},
            {"checks", rows},           {"values", vals},         {"outputs", outs},
            {"wall_seconds", wall_seconds}, {"pass", passed()}};
  return j.dump(2);
}

std::string version() {
#ifdef STABLESDE_VERSION
  return STABLESDE_VERSION;
#else
  return "unknown";
#endif
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (is) {
    is.read(buf, sizeof buf);
    if (is.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(is.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  return hex(md, len);
}

double estimate_memory_bytes(const ExperimentConfig& c) {
  const double cells = std::pow(static_cast<double>(c.grid_points), c.dim);
  const double word = 8.0;
  const std::string& e = c.experiment;
  if (e == "gate") return 1e6;
  if (e == "kernel-verify" || e == "besov-verify" || e == "product-bound") return 40.0 * cells * 2 * word;
  if (e == "schauder") {
    // w, Du per axis and the previous iterate at every node, per component
    return (c.steps + 1.0) * cells * word * (1.0 + c.dim) * 3.0 + 40.0 * cells * 2 * word;
  }
  const double nodes = std::round(c.horizon / c.euler_step) + 1.0;
  if (e == "uniqueness") return c.paths * c.dim * word * 6.0 + nodes * word * 4.0;
  return c.paths * nodes * c.dim * 2.0 * word;
}

RunReport run(const ExperimentConfig& config) {
  config.validate();
  const double need = estimate_memory_bytes(config);
  if (need > config.memory_mb * 1024.0 * 1024.0) {
    std::ostringstream os;
    os << config.experiment << " needs about " << std::fixed << std::setprecision(0) << need / (1024.0 * 1024.0)
       << " MB, budget is " << config.memory_mb << " MB";
    throw ResourceError(os.str());
  }

  std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

  auto start = std::chrono::steady_clock::now();
  auto out = detail::run_experiment(config, dir);
  RunReport report;
  report.experiment = config.experiment;
  report.version = version();
  report.seed = config.seed;
  report.checks = std::move(out.checks);
  report.values = std::move(out.values);
  for (const auto& f : out.files) report.outputs.push_back({f, sha256_file(dir / f)});
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json outputs = json::array();
  for (const auto& o : report.outputs) outputs.push_back({{"name", o.name}, {"sha256", o.sha256}});
  json manifest = {{"version", report.version},
                   {"experiment", config.experiment},
                   {"seed", config.seed},
                   {"config", to_json_object(config)},
                   {"outputs", outputs}};
  write_text(dir / "manifest.json", manifest.dump(2));
  write_text(dir / "report.json", report.to_json());
  return report;
}

RunReport reproduce(const std::filesystem::path& manifest, const std::optional<std::filesystem::path>& out_dir) {
  std::ifstream is(manifest);
  if (!is) throw ConfigError("manifest not found: " + manifest.string());
  json m = json::parse(is, nullptr, false);
  if (m.is_discarded() || !m.is_object()) throw ConfigError("manifest is not valid JSON: " + manifest.string());
  if (!m.contains("version") || !m.contains("config") || !m.contains("outputs"))
    throw ConfigError("manifest lacks version, config or outputs: " + manifest.string());
  if (m["version"] != version())
    throw ConfigError("manifest version " + m["version"].dump() + " does not match library version " + version());

  json cfg = m["config"];
  std::string name = cfg.value("experiment", "");
  std::filesystem::path dir = out_dir ? *out_dir : manifest.parent_path() / "reproduce";
  ExperimentConfig config = config_from_json(cfg.dump(), name, {"output.dir=" + json(dir.string()).dump()});

  RunReport report = run(config);
  for (const auto& o : m["outputs"]) {
    std::string file = o.at("name").get<std::string>();
    std::string want = o.at("sha256").get<std::string>();
    auto it = std::find_if(report.outputs.begin(), report.outputs.end(),
                           [&](const OutputFile& f) { return f.name == file; });
    bool same = it != report.outputs.end() && it->sha256 == want;
    report.checks.push_back(make_check("digest " + file, "bit-identical rerun of the manifest", Relation::within, 1.0,
                                       same ? 1.0 : 0.0));
  }
  write_text(dir / "report.json", report.to_json());
  return report;
}

}  // namespace stablesde
