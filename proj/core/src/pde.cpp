#include "stablesde/pde.hpp"

#include <algorithm>
#include <cmath>

#include "stablesde/errors.hpp"
#include "stablesde/fourier.hpp"
#include "stablesde/stats.hpp"

namespace stablesde {
namespace {

using cd = std::complex<double>;

bool nyquist_along(const Grid& g, std::size_t k, int axis) {
  const auto half = static_cast<std::size_t>(g.points() / 2);
  if (g.dim() == 1) return k == half;
  return axis == 0 ? k / g.points() == half : k % g.points() == half;
}

// Per-mode tables shared by the sweeps.
struct SweepTables {
  std::vector<double> decay, w0, w1;
  std::vector<std::vector<cd>> derivative;  // i lambda_axis, zero on that axis' Nyquist slot
};

SweepTables make_tables(const SpectralMeasure& measure, const Grid& grid, double dt) {
  SweepTables t;
  const std::size_t n = grid.size();
  t.decay.resize(n);
  t.w0.resize(n);
  t.w1.resize(n);
  t.derivative.assign(grid.dim(), std::vector<cd>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const Vec l = grid.wavevector(k);
    const double psi = measure.exponent(l);
    t.decay[k] = std::exp(-dt * psi);
    std::tie(t.w0[k], t.w1[k]) = exponential_trapezoid_weights(dt, psi);
    for (int a = 0; a < grid.dim(); ++a) t.derivative[a][k] = nyquist_along(grid, k, a) ? cd(0.0) : cd(0.0, l[a]);
  }
  return t;
}

// Backward recursion W_i = e^{-dt psi} W_{i+1} + w0 Phi_i + w1 Phi_{i+1}.
std::vector<Spectrum> backward_sweep(const SweepTables& t, const std::vector<Spectrum>& phi, const Spectrum& terminal) {
  const std::size_t nodes = phi.size();
  std::vector<Spectrum> w(nodes);
  w[nodes - 1] = terminal;
  for (std::size_t i = nodes - 1; i-- > 0;) {
    w[i].resize(terminal.size());
    for (std::size_t k = 0; k < terminal.size(); ++k) {
      w[i][k] = t.decay[k] * w[i + 1][k] + t.w0[k] * phi[i][k] + t.w1[k] * phi[i + 1][k];
    }
  }
  return w;
}

GridFunction derivative_of(const Grid& grid, const Spectrum& c, const std::vector<cd>& mult) {
  Spectrum d(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) d[k] = c[k] * mult[k];
  return inverse(grid, std::move(d));
}

void check_periodic(const DriftField& f, const Grid& g) {
  const double unit = 3.141592653589793238462643383279502884 / g.half_width();
  for (const auto& a : f.atoms()) {
    for (int i = 0; i < g.dim(); ++i) {
      const double m = a.wavevector[i] / unit;
      if (std::abs(m - std::round(m)) > 1e-9) throw InvalidArgument("drift frequency is not periodic on the grid");
      if (std::abs(m) >= g.points() / 2) throw UnderResolvedGrid("drift frequency beyond the grid's Nyquist limit");
    }
  }
}

// Shared state of the Picard map: the data that do not depend on the iterate.
struct PicardSetup {
  const PdeProblem& problem;
  SweepTables tables;
  std::vector<GridFunction> drift;  // spatial drift per component
  std::vector<double> sigma;        // drift time profile per node
  std::vector<GridFunction> base;   // f + F . e per node
  Spectrum terminal;

  explicit PicardSetup(const PdeProblem& p) : problem(p), tables(make_tables(p.measure, p.grid, p.step())) {
    const Grid& g = p.grid;
    const int d = g.dim();
    for (int c = 0; c < d; ++c) drift.push_back(p.drift.sample(g, c));
    for (int i = 0; i <= p.steps; ++i) {
      const double t = p.time(i);
      const double s = p.drift.time_profile(t);
      sigma.push_back(s);
      GridFunction b(g);
      if (p.source) {
        const double prof = p.source_follows_drift ? s : 1.0;
        for (std::size_t x = 0; x < b.values.size(); ++x) b.values[x] = prof * p.source->values[x];
      }
      for (int c = 0; c < d; ++c) {
        if (p.terminal_slope[c] == 0.0) continue;
        for (std::size_t x = 0; x < b.values.size(); ++x) b.values[x] += s * drift[c].values[x] * p.terminal_slope[c];
      }
      base.push_back(std::move(b));
    }
    terminal = p.terminal ? forward(*p.terminal) : Spectrum(g.size(), cd(0.0));
  }

  // One application of the Picard map to the periodic gradient dw[node][axis].
  std::vector<Spectrum> sweep(const std::vector<std::vector<GridFunction>>* dw) const {
    const int d = problem.grid.dim();
    std::vector<Spectrum> phi(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      GridFunction x = base[i];
      if (dw) {
        for (int c = 0; c < d; ++c) {
          const auto& gx = (*dw)[i][c];
          for (std::size_t j = 0; j < x.values.size(); ++j) x.values[j] += sigma[i] * drift[c].values[j] * gx.values[j];
        }
      }
      phi[i] = forward(x);
    }
    return backward_sweep(tables, phi, terminal);
  }
};

void validate(const PdeProblem& p, const SolverOptions& o) {
  if (p.measure.dim() != p.grid.dim() || p.drift.dim() != p.grid.dim()) {
    throw InvalidArgument("measure, drift and grid dimensions differ");
  }
  if (p.steps < 1 || !(p.horizon > p.start) || !(p.start >= 0.0)) throw InvalidArgument("bad time grid");
  if (!(o.tol > 0.0) || o.max_iter < 1) throw InvalidArgument("bad solver options");
  if (p.source && !(p.source->grid == p.grid)) throw InvalidArgument("source lives on another grid");
  if (p.terminal && !(p.terminal->grid == p.grid)) throw InvalidArgument("terminal lives on another grid");
  if (!p.override_gate && !drift_gate(p.drift.spec, p.measure.alpha()).weak_ok) {
    throw InvalidArgument("drift indices fail the well-posedness gate (set override_gate to proceed)");
  }
  if (!p.allow_raw_drift && p.drift.delta() == 0.0) {
    for (const auto& a : p.drift.atoms()) {
      if (a.amplitude != 0.0 && (a.wavevector[0] != 0.0 || a.wavevector[1] != 0.0)) {
        throw InvalidArgument("solve_mild needs a mollified drift (or allow_raw_drift)");
      }
    }
  }
  check_periodic(p.drift, p.grid);
}

}  // namespace

PdeProblem PdeProblem::zvonkin(SpectralMeasure m, DriftField f, Grid g, double horizon, int steps, int component) {
  PdeProblem p(std::move(m), std::move(f), g);
  p.horizon = horizon;
  p.steps = steps;
  p.source = -1.0 * p.drift.sample(g, component);
  p.source_follows_drift = true;
  return p;
}

PdeProblem PdeProblem::identity_terminal(SpectralMeasure m, DriftField f, Grid g, double start, double horizon,
                                         int steps, int component) {
  PdeProblem p(std::move(m), std::move(f), g);
  p.start = start;
  p.horizon = horizon;
  p.steps = steps;
  p.terminal_slope[component] = 1.0;
  return p;
}

double MildSolution::u(int node, std::size_t flat) const {
  return w[node].values[flat] + dot(linear, grid.point(flat));
}

double MildSolution::gradient_sup() const {
  double s = 0.0;
  for (const auto& node : du) {
    for (const auto& g : node) s = std::max(s, g.max_abs());
  }
  return s;
}

GridFunction semigroup_apply(const SpectralMeasure& measure, double t, const GridFunction& f) {
  if (!(t >= 0.0)) throw InvalidArgument("semigroup time must be non-negative");
  if (t == 0.0) return f;
  return apply_multiplier(f, [&](const Vec& l) { return std::exp(-t * measure.exponent(l)); });
}

std::pair<double, double> exponential_trapezoid_weights(double dt, double psi) {
  const double z = dt * psi;
  double a, b;  // (1 - e^{-z}) / z and (1 - e^{-z}(1 + z)) / z^2
  if (z < 1e-4) {
    a = 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
    b = 0.5 - z / 3.0 + z * z / 8.0 - z * z * z / 30.0;
  } else {
    const double e = std::exp(-z);
    a = -std::expm1(-z) / z;
    b = (1.0 - e * (1.0 + z)) / (z * z);
  }
  return {dt * (a - b), dt * b};
}

std::vector<GridFunction> green_apply(const SpectralMeasure& measure, std::span<const GridFunction> phi,
                                      double horizon_length) {
  if (phi.size() < 2 || !(horizon_length > 0.0)) throw InvalidArgument("green_apply needs >= 2 nodes and T > t");
  const Grid& g = phi.front().grid;
  const SweepTables t = make_tables(measure, g, horizon_length / static_cast<double>(phi.size() - 1));
  std::vector<Spectrum> ph;
  for (const auto& f : phi) ph.push_back(forward(f));
  const auto w = backward_sweep(t, ph, Spectrum(g.size(), cd(0.0)));
  std::vector<GridFunction> out;
  for (const auto& c : w) out.push_back(inverse(g, c));
  return out;
}

MildSolution solve_mild(const PdeProblem& problem, const SolverOptions& options) {
  validate(problem, options);
  const Grid& g = problem.grid;
  const int d = g.dim();
  const PicardSetup setup(problem);
  const bool linear_problem = problem.drift.is_zero();

  MildSolution sol{g, {}, problem.terminal_slope, {}, {}, 0, 0.0, 0.0, {}};
  for (int i = 0; i <= problem.steps; ++i) sol.times.push_back(problem.time(i));
  std::vector<GridFunction> w(problem.steps + 1, GridFunction(g));
  std::vector<std::vector<GridFunction>> dw(problem.steps + 1, std::vector<GridFunction>(d, GridFunction(g)));

  for (int it = 1; it <= options.max_iter; ++it) {
    const auto spectra = setup.sweep(it == 1 ? nullptr : &dw);
    double inc = 0.0;
    for (std::size_t i = 0; i < spectra.size(); ++i) {
      GridFunction wi = inverse(g, spectra[i]);
      inc = std::max(inc, max_abs_diff(wi, w[i]));
      w[i] = std::move(wi);
      for (int a = 0; a < d; ++a) {
        GridFunction da = derivative_of(g, spectra[i], setup.tables.derivative[a]);
        inc = std::max(inc, max_abs_diff(da, dw[i][a]));
        dw[i][a] = std::move(da);
      }
    }
    sol.increments.push_back(inc);
    sol.iterations = it;
    if (it >= 2 && sol.increments[it - 2] > 0.0) {
      sol.contraction_factor = std::max(sol.contraction_factor, inc / sol.increments[it - 2]);
    }
    if (!std::isfinite(inc) || (it >= 4 && inc > 1e6 * std::max(sol.increments.front(), 1e-300))) {
      throw NonContraction("Picard iteration diverges", sol.contraction_factor, it);
    }
    // A drift-free problem is linear: the first sweep is already the solution.
    if (inc <= options.tol || (linear_problem && it == 1)) {
      sol.residual = linear_problem ? 0.0 : inc;
      break;
    }
    if (it == options.max_iter) {
      throw NonContraction("Picard iteration did not reach tolerance", sol.contraction_factor, it);
    }
  }

  sol.w = std::move(w);
  sol.du.resize(dw.size());
  for (std::size_t i = 0; i < dw.size(); ++i) {
    for (int a = 0; a < d; ++a) {
      GridFunction full = dw[i][a];
      for (double& v : full.values) v += problem.terminal_slope[a];
      sol.du[i].push_back(std::move(full));
    }
  }
  return sol;
}

double duhamel_residual(const PdeProblem& problem, const MildSolution& sol) {
  const PicardSetup setup(problem);
  const int d = problem.grid.dim();
  std::vector<std::vector<GridFunction>> dw = sol.du;
  for (auto& node : dw) {
    for (int a = 0; a < d; ++a) {
      for (double& v : node[a].values) v -= problem.terminal_slope[a];
    }
  }
  const auto spectra = setup.sweep(&dw);
  double r = 0.0;
  for (std::size_t i = 0; i < spectra.size(); ++i) r = std::max(r, max_abs_diff(inverse(problem.grid, spectra[i]), sol.w[i]));
  return r;
}

ZvonkinReport zvonkin_transform(std::span<const MildSolution> components) {
  if (components.empty()) throw InvalidArgument("zvonkin_transform needs the component solutions");
  const int d = static_cast<int>(components.size());
  const MildSolution& first = components.front();
  if (first.grid.dim() != d) throw InvalidArgument("one solution per spatial axis is required");
  ZvonkinReport rep;
  rep.min_jacobian = std::numeric_limits<double>::infinity();
  for (const auto& c : components) rep.gradient_sup = std::max(rep.gradient_sup, c.gradient_sup());
  for (int i = 0; i < first.nodes(); ++i) {
    double node_min = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < first.grid.size(); ++x) {
      double det;
      if (d == 1) {
        det = 1.0 + components[0].du[i][0].values[x];
      } else {
        const double a = 1.0 + components[0].du[i][0].values[x];
        const double b = components[0].du[i][1].values[x];
        const double c = components[1].du[i][0].values[x];
        const double e = 1.0 + components[1].du[i][1].values[x];
        det = a * e - b * c;
      }
      node_min = std::min(node_min, det);
    }
    rep.min_jacobian_per_node.push_back(node_min);
    rep.min_jacobian = std::min(rep.min_jacobian, node_min);
  }
  rep.invertible = rep.min_jacobian > 0.5;
  return rep;
}

Vec zvonkin_map(std::span<const MildSolution> components, int node, std::size_t flat) {
  Vec x = components.front().grid.point(flat);
  for (std::size_t c = 0; c < components.size(); ++c) x[c] += components[c].u(node, flat);
  return x;
}

HolderEstimate time_holder_exponent(std::span<const GridFunction> nodes, double dt, int first_level, int last_level) {
  if (last_level - first_level + 1 < 4) throw InvalidArgument("time Holder fit needs at least four lags");
  if (first_level < 0 || (std::size_t{1} << last_level) >= nodes.size()) {
    throw InvalidArgument("time lag range exceeds the node count");
  }
  std::vector<double> lags, moduli;
  for (int j = first_level; j <= last_level; ++j) {
    const std::size_t s = std::size_t{1} << j;
    double sup = 0.0;
    for (std::size_t i = 0; i + s < nodes.size(); ++i) sup = std::max(sup, max_abs_diff(nodes[i + s], nodes[i]));
    lags.push_back(static_cast<double>(s) * dt);
    moduli.push_back(sup);
  }
  return fit_modulus(lags, moduli);
}

SchauderReport schauder_report(const MildSolution& sol, const RegularityParams& params,
                               const SchauderOptions& options) {
  const double theta = params.theta();
  const double dt = sol.times.size() > 1 ? sol.times[1] - sol.times[0] : 0.0;
  SchauderReport rep;
  auto finish = [&](ExponentCheck& c, const HolderEstimate& h, double predicted) {
    c.measured = h.slope;
    c.r_squared = h.r_squared;
    c.predicted = predicted;
    c.pass = h.reliable && h.r_squared >= options.min_r_squared && h.slope >= predicted - options.tolerance;
  };

  HolderEstimate space{};
  space.slope = std::numeric_limits<double>::infinity();
  for (const auto& g : sol.du.at(options.space_node)) {
    const HolderEstimate h = holder_exponent(g, options.space_first_level, options.space_last_level);
    if (h.slope < space.slope) space = h;
  }
  finish(rep.space_du, space, theta - 1.0 - params.epsilon);
  finish(rep.time_u, time_holder_exponent(sol.w, dt, options.time_first_level, options.time_last_level),
         theta / params.alpha);
  std::vector<GridFunction> du0;
  for (const auto& node : sol.du) du0.push_back(node[0]);
  finish(rep.time_du, time_holder_exponent(du0, dt, options.time_first_level, options.time_last_level),
         (theta - 1.0) / params.alpha);
  return rep;
}

GreenGradientScan green_gradient_scan(const SpectralMeasure& measure, double gamma, double horizon, const Grid& grid,
                                      int first_level, int last_level) {
  if (grid.dim() != 1 || measure.dim() != 1) throw InvalidArgument("green_gradient_scan is one-dimensional");
  if (last_level - first_level < 2) throw InvalidArgument("green_gradient_scan needs at least three levels");
  const double unit = 3.141592653589793238462643383279502884 / grid.half_width();
  GreenGradientScan scan;
  scan.predicted_exponent = 2.0 - gamma - measure.alpha();
  for (int j = first_level; j <= last_level; ++j) {
    const double k = std::ldexp(1.0, j) * unit;
    if (std::ldexp(1.0, j) >= grid.points() / 2) throw UnderResolvedGrid("level beyond the grid's Nyquist limit");
    const double a = std::pow(2.0, j * (1.0 - gamma));
    const GridFunction phi = GridFunction::sample(grid, [&](const Vec& x) { return a * std::cos(k * x[0]); });
    const std::vector<GridFunction> nodes{phi, phi};
    const auto g = green_apply(measure, nodes, horizon);
    scan.frequencies.push_back(k);
    scan.gradient_sup.push_back(spectral_derivative(g.front(), 0).max_abs());
  }
  scan.fitted_exponent = fit_log_log(scan.frequencies, scan.gradient_sup).slope;
  scan.exists = scan.fitted_exponent < 0.0;
  return scan;
}

}  // namespace stablesde
