#pragma once

#include <optional>
#include <span>
#include <vector>

#include "stablesde/besov.hpp"
#include "stablesde/drift.hpp"
#include "stablesde/gate.hpp"
#include "stablesde/grid.hpp"
#include "stablesde/spectral.hpp"

namespace stablesde {

/// d_t u + L^alpha u + F . Du = -f on [t0, T), u(T) = g, in mild form.
/// The source is f(t, x) = profile(t) * source(x) where profile is the drift's
/// time profile when source_follows_drift is set and 1 otherwise. The terminal
/// value is g(x) = terminal(x) + terminal_slope . x.
struct PdeProblem {
  SpectralMeasure measure;
  DriftField drift;
  Grid grid;
  double start = 0.0;
  double horizon = 0.05;
  int steps = 128;

  std::optional<GridFunction> source;
  bool source_follows_drift = false;
  std::optional<GridFunction> terminal;
  Vec terminal_slope{0.0, 0.0};

  /// Solve even when the gate fails (to study failure modes).
  bool override_gate = false;
  /// Accept an unmollified drift with non-zero frequencies.
  bool allow_raw_drift = false;

  PdeProblem(SpectralMeasure m, DriftField f, Grid g) : measure(std::move(m)), drift(std::move(f)), grid(g) {}

  /// g = 0 and f = -F_component: the Zvonkin corrector for one component.
  static PdeProblem zvonkin(SpectralMeasure m, DriftField f, Grid g, double horizon, int steps, int component);
  /// f = 0 and g(x) = x_component on [start, horizon].
  static PdeProblem identity_terminal(SpectralMeasure m, DriftField f, Grid g, double start, double horizon,
                                      int steps, int component);

  double step() const { return (horizon - start) / steps; }
  double time(int i) const { return start + i * step(); }
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
};

/// Mild solution on the uniform time grid. u = terminal_slope . x + w with w
/// periodic; Du = terminal_slope + Dw is stored per axis.
struct MildSolution {
  Grid grid;
  std::vector<double> times;
  Vec linear{0.0, 0.0};
  std::vector<GridFunction> w;
  std::vector<std::vector<GridFunction>> du;
  int iterations = 0;
  double residual = 0.0;
  double contraction_factor = 0.0;
  std::vector<double> increments;

  int nodes() const { return static_cast<int>(times.size()); }
  /// u(t_i, x) at a grid point, including the linear part.
  double u(int node, std::size_t flat) const;
  /// ||Du||_inf over all nodes and axes.
  double gradient_sup() const;
};

/// P^alpha_t f by the Fourier multiplier exp(-t psi).
GridFunction semigroup_apply(const SpectralMeasure& measure, double t, const GridFunction& f);

/// Weights (w0, w1) of int_0^dt exp(-s psi) phi(s) ds for phi linear between
/// phi(0) and phi(dt); exact for piecewise-linear integrands.
std::pair<double, double> exponential_trapezoid_weights(double dt, double psi);

/// G Phi(t_i) = int_{t_i}^T P_{s - t_i} Phi(s) ds for every node of a uniform
/// grid on [t_0, T], Phi given at the nodes; piecewise-linear in time.
std::vector<GridFunction> green_apply(const SpectralMeasure& measure, std::span<const GridFunction> phi,
                                      double horizon_length);

/// Picard iteration for the mild equation. Throws NonContraction when the
/// increments stop shrinking or max_iter is reached, InvalidArgument when the
/// gate fails without override or the drift is unmollified.
MildSolution solve_mild(const PdeProblem& problem, const SolverOptions& options = {});

/// max over nodes of |u - Duhamel(u)|: one extra sweep from the returned solution.
double duhamel_residual(const PdeProblem& problem, const MildSolution& sol);

struct ZvonkinReport {
  double min_jacobian = 1.0;
  double gradient_sup = 0.0;
  bool invertible = true;
  std::vector<double> min_jacobian_per_node;
};

/// Diagnostics of Phi(t, x) = x + u(t, x) for the component solutions
/// (one per axis): min det(I + Du) and the non-invertibility flag (min <= 0.5).
ZvonkinReport zvonkin_transform(std::span<const MildSolution> components);

/// Phi(t_node, x) at a grid point.
Vec zvonkin_map(std::span<const MildSolution> components, int node, std::size_t flat);

struct SchauderOptions {
  int space_first_level = 0;
  int space_last_level = 6;
  int time_first_level = 0;
  int time_last_level = 5;
  double tolerance = 0.1;
  double min_r_squared = 0.9;
  /// Node at which the spatial modulus of Du is measured.
  int space_node = 0;
};

struct ExponentCheck {
  double measured = 0.0;
  double predicted = 0.0;
  double r_squared = 0.0;
  bool pass = false;
};

struct SchauderReport {
  ExponentCheck space_du;
  ExponentCheck time_u;
  ExponentCheck time_du;
  bool pass() const { return space_du.pass && time_u.pass && time_du.pass; }
};

/// Holder fits for Du in space and u, Du in time against theta - 1 - eps,
/// theta / alpha and (theta - 1) / alpha.
SchauderReport schauder_report(const MildSolution& sol, const RegularityParams& params,
                               const SchauderOptions& options = {});

/// Time modulus sup_{t, x} |h(t + delta, x) - h(t, x)| over node lags 2^j.
HolderEstimate time_holder_exponent(std::span<const GridFunction> nodes, double dt, int first_level, int last_level);

struct GreenGradientScan {
  std::vector<double> frequencies;
  std::vector<double> gradient_sup;
  double fitted_exponent = 0.0;
  double predicted_exponent = 0.0;
  /// Pointwise gradient exists: fitted exponent < 0.
  bool exists = false;
};

/// ||D G Phi_j||_inf for single lacunary levels Phi_j = 2^{j(1 - gamma)} cos(2^j x)
/// on [0, T]. The growth exponent in 2^j is 2 - gamma - alpha, negative iff the
/// pointwise gradient exists.
GreenGradientScan green_gradient_scan(const SpectralMeasure& measure, double gamma, double horizon, const Grid& grid,
                                      int first_level, int last_level);

}  // namespace stablesde
