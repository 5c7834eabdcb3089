#include "stablesde/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "stablesde/errors.hpp"
#include "stablesde/random.hpp"

namespace stablesde {
namespace {

using nlohmann::json;

// JSON has no infinity; store it as the string "inf".
json index_to_json(double x) { return std::isinf(x) ? json("inf") : json(x); }

double index_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError("drift manifest: bad index " + j.dump());
  }
  return j.get<double>();
}

double magnitude(const Vec& k, int dim) { return dim == 1 ? std::abs(k[0]) : std::hypot(k[0], k[1]); }

}  // namespace

void DriftSpec::validate() const {
  if (dim != 1 && dim != 2) throw InvalidArgument("drift dimension must be 1 or 2");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in (0, 1)");
  if (!(p >= 1.0 && q >= 1.0 && r >= 1.0)) throw InvalidArgument("p, q, r must be >= 1");
  if (levels < 4 || levels > 30) throw InvalidArgument("lacunary depth must lie in [4, 30]");
  if (!(time_exponent >= 0.0) || !(std::isinf(r) ? time_exponent == 0.0 : time_exponent * r < 1.0)) {
    throw InvalidArgument("time exponent a must satisfy a r < 1");
  }
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  if (!std::isfinite(amplitude)) throw InvalidArgument("amplitude must be finite");
}

DriftField::DriftField(int dim, std::vector<DriftAtom> atoms, double time_exponent, double horizon)
    : dim_(dim), atoms_(std::move(atoms)), time_exponent_(time_exponent), horizon_(horizon) {
  if (dim != 1 && dim != 2) throw InvalidArgument("drift dimension must be 1 or 2");
  if (!(horizon > 0.0) || !(time_exponent >= 0.0 && time_exponent < 1.0)) throw InvalidArgument("bad time profile");
  for (const auto& a : atoms_) {
    if (a.component < 0 || a.component >= dim) throw InvalidArgument("drift atom component out of range");
  }
  spec.dim = dim;
  spec.time_exponent = time_exponent;
  spec.horizon = horizon;
}

DriftField DriftField::constant(int dim, const Vec& c) {
  std::vector<DriftAtom> atoms;
  for (int i = 0; i < dim; ++i) {
    if (c[i] != 0.0) atoms.push_back({0, i, {0.0, 0.0}, c[i], c[i], 0.0});
  }
  return DriftField(dim, std::move(atoms));
}

DriftField DriftField::single_mode(int dim, int component, const Vec& k, double a, double phase) {
  return DriftField(dim, {{0, component, k, a, a, phase}});
}

DriftField DriftField::zero(int dim) { return DriftField(dim, {}); }

bool DriftField::is_zero() const {
  return std::all_of(atoms_.begin(), atoms_.end(), [](const DriftAtom& a) { return a.amplitude == 0.0; });
}

double DriftField::time_profile(double t) const {
  if (time_exponent_ == 0.0) return 1.0;
  return std::pow(std::max(t, time_floor()) / horizon_, -time_exponent_);
}

Vec DriftField::spatial(const Vec& x) const {
  Vec out{0.0, 0.0};
  for (const auto& a : atoms_) out[a.component] += a.amplitude * std::cos(dot(a.wavevector, x) + a.phase);
  return out;
}

GridFunction DriftField::sample(const Grid& grid, int component) const {
  if (grid.dim() != dim_) throw InvalidArgument("drift and grid dimensions differ");
  GridFunction out(grid);
  for (const auto& a : atoms_) {
    if (a.component != component || a.amplitude == 0.0) continue;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] += a.amplitude * std::cos(dot(a.wavevector, grid.point(i)) + a.phase);
    }
  }
  return out;
}

DriftField DriftField::scaled(double c) const {
  DriftField out = *this;
  for (auto& a : out.atoms_) {
    a.amplitude *= c;
    a.raw_amplitude *= c;
  }
  out.spec.amplitude *= c;
  return out;
}

std::string DriftField::to_manifest() const {
  json j;
  j["dim"] = dim_;
  j["indices"] = {{"gamma", spec.gamma},
                  {"p", index_to_json(spec.p)},
                  {"q", index_to_json(spec.q)},
                  {"r", index_to_json(spec.r)}};
  j["levels"] = spec.levels;
  j["amplitude"] = spec.amplitude;
  j["regularity_excess"] = spec.regularity_excess;
  j["time_exponent"] = time_exponent_;
  j["horizon"] = horizon_;
  j["seed"] = seed;
  j["mollification"] = {{"level", level_}, {"alpha", moll_alpha_}, {"delta", delta_}};
  json atoms = json::array();
  for (const auto& a : atoms_) {
    atoms.push_back({{"level", a.level},
                     {"component", a.component},
                     {"wavevector", {a.wavevector[0], a.wavevector[1]}},
                     {"raw_amplitude", a.raw_amplitude},
                     {"phase", a.phase}});
  }
  j["atoms"] = std::move(atoms);
  return j.dump(2);
}

DriftField DriftField::from_manifest(const std::string& text) {
  try {
    const json j = json::parse(text);
    std::vector<DriftAtom> atoms;
    for (const auto& a : j.at("atoms")) {
      DriftAtom atom;
      atom.level = a.at("level").get<int>();
      atom.component = a.at("component").get<int>();
      atom.wavevector = {a.at("wavevector").at(0).get<double>(), a.at("wavevector").at(1).get<double>()};
      atom.raw_amplitude = a.at("raw_amplitude").get<double>();
      atom.amplitude = atom.raw_amplitude;
      atom.phase = a.at("phase").get<double>();
      atoms.push_back(atom);
    }
    DriftField f(j.at("dim").get<int>(), std::move(atoms), j.at("time_exponent").get<double>(),
                 j.at("horizon").get<double>());
    const auto& idx = j.at("indices");
    f.spec.gamma = idx.at("gamma").get<double>();
    f.spec.p = index_from_json(idx.at("p"));
    f.spec.q = index_from_json(idx.at("q"));
    f.spec.r = index_from_json(idx.at("r"));
    f.spec.levels = j.at("levels").get<int>();
    f.spec.amplitude = j.at("amplitude").get<double>();
    f.spec.regularity_excess = j.at("regularity_excess").get<double>();
    f.seed = j.at("seed").get<std::uint64_t>();
    const auto& moll = j.at("mollification");
    const int level = moll.at("level").get<int>();
    if (level > 0) return mollify(f, level, moll.at("alpha").get<double>());
    return f;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("drift manifest: ") + e.what());
  }
}

DriftField build_drift(const DriftSpec& spec, std::uint64_t seed) {
  spec.validate();
  RandomStream rng(seed, 0x64726966ULL);
  const double s = 1.0 - spec.gamma - spec.regularity_excess;
  std::vector<DriftAtom> atoms;
  for (int c = 0; c < spec.dim; ++c) {
    for (int j = 0; j < spec.levels; ++j) {
      DriftAtom a;
      a.level = j;
      a.component = c;
      a.wavevector[(j + c) % spec.dim] = std::ldexp(1.0, j);
      a.raw_amplitude = spec.amplitude * std::pow(2.0, j * s);
      a.amplitude = a.raw_amplitude;
      a.phase = 2.0 * std::numbers::pi * rng.uniform();
      atoms.push_back(a);
    }
  }
  DriftField f(spec.dim, std::move(atoms), spec.time_exponent, spec.horizon);
  f.spec = spec;
  f.seed = seed;
  return f;
}

DriftField mollify(const DriftField& field, int m, double alpha) {
  if (m < 1) throw InvalidArgument("mollification level must be >= 1");
  if (!(alpha > 1.0 && alpha <= 2.0)) throw InvalidArgument("alpha must lie in (1, 2]");
  DriftField out = field;
  out.delta_ = std::pow(2.0, -alpha * m);
  out.level_ = m;
  out.moll_alpha_ = alpha;
  for (auto& a : out.atoms_) {
    a.amplitude = a.raw_amplitude * std::exp(-out.delta_ * std::pow(magnitude(a.wavevector, field.dim()), alpha));
  }
  return out;
}

GateReport drift_gate(const DriftSpec& spec, double alpha) {
  RegularityParams params;
  params.alpha = alpha;
  params.dim = spec.dim;
  params.p = spec.p;
  params.q = spec.q;
  params.r = spec.r;
  params.gamma = spec.gamma;
  return check_gate(params);
}

std::vector<double> singular_time_grid(double horizon, double floor, int points) {
  if (!(horizon > 0.0 && floor > 0.0 && floor < horizon) || points < 2) {
    throw InvalidArgument("singular_time_grid: need 0 < floor < horizon and points >= 2");
  }
  std::vector<double> t{0.0};
  const double ratio = std::pow(horizon / floor, 1.0 / (points - 1));
  for (int i = 0; i < points; ++i) t.push_back(i + 1 == points ? horizon : floor * std::pow(ratio, i));
  return t;
}

double spatial_drift_norm(const DriftField& field, const Grid& grid, const DriftNormIndices& idx,
                          const BesovOptions& options) {
  const BesovIndex b{-1.0 + idx.gamma, idx.p, idx.q, idx.alpha, 0};
  double out = 0.0;
  for (int c = 0; c < field.dim(); ++c) out = std::max(out, besov_norm(field.sample(grid, c), b, options).total());
  return out;
}

double time_profile_norm(const DriftField& field, double r, std::span<const double> time_grid) {
  if (time_grid.size() < 2) throw InvalidArgument("time grid needs at least two nodes");
  if (std::isinf(r)) {
    double sup = 0.0;
    for (double t : time_grid) sup = std::max(sup, field.time_profile(t));
    return sup;
  }
  double s = 0.0;
  for (std::size_t i = 1; i < time_grid.size(); ++i) {
    const double dt = time_grid[i] - time_grid[i - 1];
    s += 0.5 * dt * (std::pow(field.time_profile(time_grid[i - 1]), r) + std::pow(field.time_profile(time_grid[i]), r));
  }
  return std::pow(s, 1.0 / r);
}

double drift_norm(const DriftField& field, const Grid& grid, const DriftNormIndices& idx,
                  std::span<const double> time_grid, const BesovOptions& options) {
  if (field.is_zero()) return 0.0;
  // F(t, .) = sigma(t) F(0, .) and the spatial norm is homogeneous.
  const double spatial = spatial_drift_norm(field, grid, idx, options);
  if (std::isinf(idx.r)) {
    double sup = 0.0;
    for (double t : time_grid) sup = std::max(sup, field.time_profile(t) * spatial);
    return sup;
  }
  double s = 0.0;
  for (std::size_t i = 1; i < time_grid.size(); ++i) {
    const double dt = time_grid[i] - time_grid[i - 1];
    const double a = field.time_profile(time_grid[i - 1]) * spatial;
    const double b = field.time_profile(time_grid[i]) * spatial;
    s += 0.5 * dt * (std::pow(a, idx.r) + std::pow(b, idx.r));
  }
  return std::pow(s, 1.0 / idx.r);
}

double time_cap_effect(const DriftField& field, double r) {
  const double a = field.time_exponent();
  if (a == 0.0 || std::isinf(r)) return 0.0;
  const double ar = a * r;
  const double T = field.horizon();
  const double tf = field.time_floor();
  const double head_capped = tf * std::pow(tf / T, -ar);
  const double head_raw = head_capped / (1.0 - ar);
  const double total_raw = T / (1.0 - ar);
  return (head_raw - head_capped) / total_raw;
}

double drift_difference_norm(const DriftField& a, const DriftField& b, const Grid& grid, const DriftNormIndices& idx,
                             std::span<const double> time_grid, const BesovOptions& options) {
  if (a.dim() != b.dim() || a.time_exponent() != b.time_exponent() || a.horizon() != b.horizon()) {
    throw InvalidArgument("drift_difference_norm: fields differ in shape or time profile");
  }
  const BesovIndex bi{-1.0 + idx.gamma, idx.p, idx.q, idx.alpha, 0};
  double spatial = 0.0;
  for (int c = 0; c < a.dim(); ++c) {
    spatial = std::max(spatial, besov_norm(a.sample(grid, c) - b.sample(grid, c), bi, options).total());
  }
  return spatial * time_profile_norm(a, idx.r, time_grid);
}

}  // namespace stablesde
