#include "stablesde/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <boost/math/quadrature/gauss.hpp>

#include "stablesde/besov.hpp"
#include "stablesde/errors.hpp"
#include "stablesde/kernel.hpp"
#include "stablesde/random.hpp"

namespace stablesde {
namespace {

// (1 - e^{-h psi}) / psi with the psi -> 0 limit h.
double closed_time_weight(double h, double psi) {
  const double z = h * psi;
  if (z < 1e-8) return h * (1.0 - z / 2.0);
  return -std::expm1(-z) / psi;
}

double norm_of(const Vec& v, int dim) { return dim == 1 ? std::abs(v[0]) : std::hypot(v[0], v[1]); }

double integrand_value(Integrand psi, const Vec& x) { return psi == Integrand::one ? 1.0 : std::sin(x[0]); }

// Mean of |v|^l over paths, then ^(1/l).
double lp_over_paths(const std::vector<Vec>& v, int dim, double l) {
  double s = 0.0;
  for (const auto& x : v) s += std::pow(norm_of(x, dim), l);
  return std::pow(s / static_cast<double>(v.size()), 1.0 / l);
}

}  // namespace

DriftIncrementRule::DriftIncrementRule(DriftField drift, SpectralMeasure measure)
    : drift_(std::move(drift)), measure_(std::move(measure)) {
  if (drift_.dim() != measure_.dim()) throw InvalidArgument("drift and noise dimensions differ");
  for (const auto& a : drift_.atoms()) psi_.push_back(measure_.exponent(a.wavevector));
}

StepWeights DriftIncrementRule::weights(double v, double h) const {
  if (!(h > 0.0) || !(v >= 0.0)) throw InvalidArgument("drift increment needs v >= 0 and h > 0");
  StepWeights w{v, h, std::vector<double>(psi_.size())};
  if (drift_.is_time_constant()) {
    for (std::size_t i = 0; i < psi_.size(); ++i) w.tau[i] = closed_time_weight(h, psi_[i]);
    return w;
  }
  using Gauss = boost::math::quadrature::gauss<double, 16>;
  for (std::size_t i = 0; i < psi_.size(); ++i) {
    const double psi = psi_[i];
    w.tau[i] = Gauss::integrate([&](double r) { return drift_.time_profile(r) * std::exp(-(r - v) * psi); }, v, v + h);
  }
  return w;
}

Vec DriftIncrementRule::apply(const StepWeights& w, const Vec& x) const {
  Vec out{0.0, 0.0};
  const auto& atoms = drift_.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (a.amplitude == 0.0) continue;
    out[a.component] += a.amplitude * w.tau[i] * std::cos(dot(a.wavevector, x) + a.phase);
  }
  return out;
}

Vec PathEnsemble::A(int path, int node) const {
  const std::size_t o = (static_cast<std::size_t>(path) * nodes + node) * dim;
  return dim == 1 ? Vec{drift_part[o], 0.0} : Vec{drift_part[o], drift_part[o + 1]};
}

Vec PathEnsemble::W(int path, int node) const {
  const std::size_t o = (static_cast<std::size_t>(path) * nodes + node) * dim;
  return dim == 1 ? Vec{noise[o], 0.0} : Vec{noise[o], noise[o + 1]};
}

Vec PathEnsemble::X(int path, int node) const { return x0 + A(path, node) + W(path, node); }

namespace {

int step_count(double horizon, double step) {
  const double n = horizon / step;
  const long r = std::lround(n);
  if (r < 1 || std::abs(n - static_cast<double>(r)) > 1e-9 * n) throw InvalidArgument("T / h must be an integer");
  return static_cast<int>(r);
}

std::vector<StepWeights> all_weights(const DriftIncrementRule& rule, int steps, double h) {
  std::vector<StepWeights> w;
  if (rule.drift().is_time_constant()) {
    w.push_back(rule.weights(0.0, h));
    return w;
  }
  for (int i = 0; i < steps; ++i) w.push_back(rule.weights(i * h, h));
  return w;
}

const StepWeights& weights_at(const std::vector<StepWeights>& w, int i) { return w.size() == 1 ? w[0] : w[i]; }

}  // namespace

PathEnsemble euler_paths(const DriftIncrementRule& rule, const EulerOptions& options) {
  const SpectralMeasure& measure = rule.measure();
  const int d = measure.dim();
  if (!options.override_gate && !rule.drift().is_zero()) {
    if (!drift_gate(rule.drift().spec, measure.alpha()).dyn_ok) {
      throw InvalidArgument("drift indices fail the dynamics gate (set override_gate to proceed)");
    }
  }
  if (options.paths < 1 || options.stride < 1) throw InvalidArgument("need paths >= 1 and stride >= 1");
  const int steps = step_count(options.horizon, options.step);
  if (steps % options.stride != 0) throw InvalidArgument("stride must divide the step count");

  PathEnsemble e;
  e.dim = d;
  e.x0 = options.x0;
  e.horizon = options.horizon;
  e.step = options.step;
  e.stride = options.stride;
  e.paths = options.paths;
  e.nodes = steps / options.stride + 1;
  e.seed = options.seed;
  e.drift_part.assign(static_cast<std::size_t>(e.paths) * e.nodes * d, 0.0);
  e.noise.assign(e.drift_part.size(), 0.0);

  const auto weights = all_weights(rule, steps, options.step);
  const bool zero = rule.drift().is_zero();
  for (int p = 0; p < e.paths; ++p) {
    RandomStream rng(options.seed, static_cast<std::uint64_t>(p));
    Vec a{0.0, 0.0}, w{0.0, 0.0};
    for (int i = 0; i < steps; ++i) {
      if (!zero) a = a + rule.apply(weights_at(weights, i), options.x0 + a + w);
      w = w + sample_increment(measure, options.step, rng);
      if ((i + 1) % options.stride == 0) {
        const std::size_t o = (static_cast<std::size_t>(p) * e.nodes + (i + 1) / options.stride) * d;
        for (int c = 0; c < d; ++c) {
          e.drift_part[o + c] = a[c];
          e.noise[o + c] = w[c];
        }
      }
    }
  }
  return e;
}

SlopeReport drift_bound_report(const DriftIncrementRule& rule, double v, std::span<const double> h_list,
                               std::span<const Vec> sample_points, const RegularityParams& params, double tolerance) {
  if (h_list.size() < 2 || sample_points.empty()) throw InvalidArgument("need two step sizes and sample points");
  SlopeReport rep;
  rep.predicted = 0.5 + params.chi();
  const int d = rule.measure().dim();
  for (double h : h_list) {
    const StepWeights w = rule.weights(v, h);
    double sup = 0.0;
    for (const auto& x : sample_points) sup = std::max(sup, norm_of(rule.apply(w, x), d));
    rep.lags.push_back(h);
    rep.values.push_back(sup);
  }
  rep.exact_zero = std::all_of(rep.values.begin(), rep.values.end(), [](double x) { return x == 0.0; });
  if (rep.exact_zero) return rep;
  const LinearFit fit = fit_log_log(rep.lags, rep.values);
  rep.slope = fit.slope;
  rep.r_squared = fit.r_squared;
  rep.pass = rep.slope >= rep.predicted - tolerance;
  return rep;
}

SlopeReport moment_scaling(const PathEnsemble& e, double q, int first_level, int last_level,
                           const RegularityParams& params, double tolerance) {
  if (!(q >= 1.0 && q < params.alpha)) throw InvalidArgument("moment order must lie in [1, alpha)");
  if (last_level <= first_level || first_level < 0 || (1 << last_level) >= e.nodes) {
    throw InvalidArgument("bad dyadic lag range for moment scaling");
  }
  SlopeReport rep;
  rep.predicted = 1.0 / params.alpha + (params.theta() - 1.0) / params.alpha;
  std::vector<double> rel_se;
  for (int j = first_level; j <= last_level; ++j) {
    const int s = 1 << j;
    std::vector<double> samples;
    for (int p = 0; p < e.paths; ++p) {
      for (int v = 0; v + s < e.nodes; v += s) {
        const Vec diff = e.A(p, v + s) - e.A(p, v);
        samples.push_back(std::pow(norm_of(diff, e.dim), q));
      }
    }
    const double m = mean(samples);
    rep.lags.push_back(s * e.node_spacing());
    rep.values.push_back(std::pow(m, 1.0 / q));
    const double se = sample_stddev(samples) / std::sqrt(static_cast<double>(samples.size()));
    rel_se.push_back(m > 0.0 ? se / (q * m) : 0.0);
  }
  rep.exact_zero = std::all_of(rep.values.begin(), rep.values.end(), [](double x) { return x == 0.0; });
  if (rep.exact_zero) return rep;
  const LinearFit fit = fit_log_log(rep.lags, rep.values);
  rep.slope = fit.slope;
  rep.r_squared = fit.r_squared;
  double rss = 0.0;
  for (std::size_t i = 0; i < rep.lags.size(); ++i) {
    const double r = std::log(rep.values[i]) - (fit.intercept + fit.slope * std::log(rep.lags[i]));
    rss += r * r;
  }
  const double rms = std::sqrt(rss / static_cast<double>(rep.lags.size()));
  rep.insufficient_paths = *std::max_element(rel_se.begin(), rel_se.end()) > 0.5 * rms;
  rep.pass = rep.slope >= rep.predicted - tolerance;
  return rep;
}

namespace {

// Riemann sum over the partition with `s` nodes per cell, for one path.
Vec riemann_sum(const PathEnsemble& e, const DriftIncrementRule& rule, const StepWeights* w, IncrementKind kind,
                Integrand psi, int path, int s) {
  Vec sum{0.0, 0.0};
  for (int i = 0; i + s < e.nodes; i += s) {
    const Vec x = e.X(path, i);
    Vec inc;
    switch (kind) {
      case IncrementKind::state: inc = e.X(path, i + s) - x; break;
      case IncrementKind::noise: inc = e.W(path, i + s) - e.W(path, i); break;
      case IncrementKind::drift:
        inc = w ? rule.apply(*w, x) : rule.increment(e.node_time(i), x, s * e.node_spacing());
        break;
    }
    sum = sum + integrand_value(psi, x) * inc;
  }
  return sum;
}

}  // namespace

double riemann_gap(const PathEnsemble& e, const DriftIncrementRule& rule, IncrementKind kind, Integrand psi,
                   int level, double l) {
  if (level < 1 || (1 << level) >= e.nodes) throw InvalidArgument("bad mesh level");
  const int coarse = 1 << level, fine = coarse / 2;
  std::optional<StepWeights> wc, wf;
  if (kind == IncrementKind::drift && rule.drift().is_time_constant()) {
    wc = rule.weights(0.0, coarse * e.node_spacing());
    wf = rule.weights(0.0, fine * e.node_spacing());
  }
  std::vector<Vec> gaps;
  gaps.reserve(e.paths);
  for (int p = 0; p < e.paths; ++p) {
    const Vec a = riemann_sum(e, rule, wc ? &*wc : nullptr, kind, psi, p, coarse);
    const Vec b = riemann_sum(e, rule, wf ? &*wf : nullptr, kind, psi, p, fine);
    gaps.push_back(a - b);
  }
  return lp_over_paths(gaps, e.dim, l);
}

RiemannReport young_riemann(const PathEnsemble& e, const DriftIncrementRule& rule, IncrementKind kind, Integrand psi,
                            int first_level, int last_level, double l) {
  RiemannReport rep;
  for (int j = first_level; j <= last_level; ++j) {
    rep.meshes.push_back((1 << j) * e.node_spacing());
    rep.gaps.push_back(riemann_gap(e, rule, kind, psi, j, l));
  }
  const bool positive = std::all_of(rep.gaps.begin(), rep.gaps.end(), [](double g) { return g > 0.0; });
  if (positive && rep.gaps.size() >= 2) {
    const LinearFit fit = fit_log_log(rep.meshes, rep.gaps);
    rep.rate = fit.slope;
    rep.r_squared = fit.r_squared;
  }
  return rep;
}

IdentificationReport drift_identification(const PathEnsemble& e, const DriftIncrementRule& rule,
                                          std::span<const int> levels, double l, Integrand psi) {
  if (levels.empty()) throw InvalidArgument("drift_identification needs mollification levels");
  const double h = e.node_spacing();
  const DriftField& raw = rule.drift();
  const bool constant_in_time = raw.is_time_constant();
  std::vector<StepWeights> w;
  for (int i = 0; i + 1 < e.nodes; ++i) {
    if (constant_in_time && !w.empty()) break;
    w.push_back(rule.weights(e.node_time(i), h));
  }
  IdentificationReport rep;
  for (int m : levels) {
    const DriftField fm = mollify(raw, m, rule.measure().alpha());
    std::vector<Vec> gaps;
    gaps.reserve(e.paths);
    for (int p = 0; p < e.paths; ++p) {
      Vec sum{0.0, 0.0};
      for (int i = 0; i + 1 < e.nodes; ++i) {
        const Vec x = e.X(p, i);
        const Vec smoothed = rule.apply(constant_in_time ? w[0] : w[i], x);
        const Vec plain = h * fm.value(e.node_time(i), x);
        sum = sum + integrand_value(psi, x) * (smoothed - plain);
      }
      gaps.push_back(sum);
    }
    rep.levels.push_back(m);
    rep.gaps.push_back(lp_over_paths(gaps, e.dim, l));
  }
  rep.strictly_decreasing = true;
  for (std::size_t i = 1; i < rep.gaps.size(); ++i) rep.strictly_decreasing &= rep.gaps[i] < rep.gaps[i - 1];
  rep.final_ratio = rep.gaps.front() > 0.0 ? rep.gaps.back() / rep.gaps.front() : 0.0;
  rep.pass = rep.strictly_decreasing && rep.final_ratio <= 0.1;
  return rep;
}

PathwiseGap pathwise_gap(const DriftField& drift, const SpectralMeasure& measure, int m1, int m2,
                         const EulerOptions& options) {
  const double alpha = measure.alpha();
  const DriftIncrementRule ra(m1 > 0 ? mollify(drift, m1, alpha) : drift, measure);
  const DriftIncrementRule rb(m2 > 0 ? mollify(drift, m2, alpha) : drift, measure);
  if (!options.override_gate && !drift.is_zero() && !drift_gate(drift.spec, alpha).dyn_ok) {
    throw InvalidArgument("drift indices fail the dynamics gate (set override_gate to proceed)");
  }
  const int steps = step_count(options.horizon, options.step);
  const auto wa = all_weights(ra, steps, options.step);
  const auto wb = all_weights(rb, steps, options.step);
  const int d = measure.dim();

  PathwiseGap out;
  out.mean_gap.assign(steps + 1, 0.0);
  for (int p = 0; p < options.paths; ++p) {
    RandomStream rng(options.seed, static_cast<std::uint64_t>(p));
    Vec xa = options.x0, xb = options.x0;
    for (int i = 0; i < steps; ++i) {
      const Vec dw = sample_increment(measure, options.step, rng);
      xa = xa + ra.apply(weights_at(wa, i), xa) + dw;
      xb = xb + rb.apply(weights_at(wb, i), xb) + dw;
      out.mean_gap[i + 1] += norm_of(xa - xb, d);
    }
    out.final_a.push_back(xa[0]);
    out.final_b.push_back(xb[0]);
  }
  for (double& g : out.mean_gap) g /= options.paths;
  out.sup_mean_gap = *std::max_element(out.mean_gap.begin(), out.mean_gap.end());
  return out;
}

double law_distance(const DriftField& drift, const SpectralMeasure& measure, int m, const EulerOptions& options) {
  const PathwiseGap g = pathwise_gap(drift, measure, m, 2 * m, options);
  return wasserstein1(g.final_a, g.final_b);
}

KrylovReport krylov_check(const PathEnsemble& e, std::span<const double> frequencies, const RegularityParams& params,
                          double bound, const BesovOptions& options) {
  if (frequencies.size() < 2) throw InvalidArgument("krylov_check needs at least two frequencies");
  const double theta = params.theta();
  const double spatial = std::isinf(params.p) ? 0.0 : params.dim / params.p;
  if (!std::isinf(params.r) && !(params.r > params.alpha / (theta - spatial))) {
    throw InvalidArgument("krylov_check requires r > alpha / (theta - d/p)");
  }
  const double kmax = *std::max_element(frequencies.begin(), frequencies.end());
  int n = 64;
  while (n / 2 <= 2 * kmax) n *= 2;
  const Grid grid(e.dim, std::numbers::pi, e.dim == 1 ? n : std::min(n, 256));
  const BesovIndex idx{theta - params.alpha, params.p, params.q, params.alpha, 0};
  const double time_norm = std::isinf(params.r) ? 1.0 : std::pow(e.horizon, 1.0 / params.r);

  KrylovReport rep;
  const double dt = e.node_spacing();
  for (double k : frequencies) {
    double total = 0.0;
    for (int p = 0; p < e.paths; ++p) {
      double s = 0.0;
      for (int i = 0; i < e.nodes; ++i) {
        const double wgt = (i == 0 || i + 1 == e.nodes) ? 0.5 : 1.0;
        s += wgt * std::cos(k * e.X(p, i)[0]);
      }
      total += s * dt;
    }
    const double expectation = std::abs(total / e.paths);
    const GridFunction f = GridFunction::sample(grid, [&](const Vec& x) { return std::cos(k * x[0]); });
    const double norm = time_norm * besov_norm(f, idx, options).total();
    rep.frequencies.push_back(k);
    rep.expectations.push_back(expectation);
    rep.norms.push_back(norm);
    rep.ratios.push_back(expectation / norm);
  }
  const double mx = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  const double md = median(rep.ratios);
  rep.max_over_median = md > 0.0 ? mx / md : std::numeric_limits<double>::infinity();
  rep.pass = rep.max_over_median <= bound;
  return rep;
}

double free_cosine_occupation(const SpectralMeasure& measure, double k, double x0, double horizon) {
  Vec kv{k, 0.0};
  const double psi = measure.exponent(kv);
  return std::cos(k * x0) * closed_time_weight(horizon, psi);
}

}  // namespace stablesde
