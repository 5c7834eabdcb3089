#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stablesde/drift.hpp"
#include "stablesde/gate.hpp"
#include "stablesde/spectral.hpp"
#include "stablesde/stats.hpp"

namespace stablesde {

/// Time weights of the drift atoms over one step [v, v + h]:
/// tau = int_v^{v+h} sigma(r) exp(-(r - v) psi(k)) dr.
struct StepWeights {
  double v = 0.0;
  double h = 0.0;
  std::vector<double> tau;
};

/// Kernel-smoothed drift increment
/// F(v, x, h) = int_v^{v+h} dr int F(r, y) p_alpha(r - v, y - x) dy,
/// exact in space through the characteristic function of each atom.
class DriftIncrementRule {
 public:
  DriftIncrementRule(DriftField drift, SpectralMeasure measure);

  const DriftField& drift() const { return drift_; }
  const SpectralMeasure& measure() const { return measure_; }

  /// Closed form (1 - e^{-h psi}) / psi for time-constant drifts, 16-point
  /// Gauss-Legendre in time otherwise.
  StepWeights weights(double v, double h) const;
  Vec apply(const StepWeights& w, const Vec& x) const;
  Vec increment(double v, const Vec& x, double h) const { return apply(weights(v, h), x); }

 private:
  DriftField drift_;
  SpectralMeasure measure_;
  std::vector<double> psi_;
};

/// Monte Carlo paths X = x0 + A + W with A the cumulative drift part and W the
/// cumulative noise, stored every `stride` Euler steps.
struct PathEnsemble {
  int dim = 1;
  Vec x0{0.0, 0.0};
  double horizon = 0.0;
  double step = 0.0;  // Euler step
  int stride = 1;
  int paths = 0;
  int nodes = 0;      // stored nodes per path
  std::uint64_t seed = 0;
  std::vector<double> drift_part;
  std::vector<double> noise;

  double node_spacing() const { return step * stride; }
  double node_time(int i) const { return i * node_spacing(); }
  Vec A(int path, int node) const;
  Vec W(int path, int node) const;
  Vec X(int path, int node) const;
};

struct EulerOptions {
  Vec x0{0.0, 0.0};
  double horizon = 0.25;
  double step = 1.0 / 1024.0;
  int paths = 10000;
  std::uint64_t seed = 1;
  int stride = 1;
  /// Simulate even when the dynamics gate fails.
  bool override_gate = false;
};

/// X_{i+1} = X_i + F(t_i, X_i, h) + dW_i with exact stable increments; path p
/// draws from RandomStream(seed, p).
PathEnsemble euler_paths(const DriftIncrementRule& rule, const EulerOptions& options);

struct SlopeReport {
  std::vector<double> lags;
  std::vector<double> values;
  double slope = 0.0;
  double r_squared = 0.0;
  double predicted = 0.0;
  bool pass = false;
  /// All values vanish identically; the slope is undefined.
  bool exact_zero = false;
  /// Monte Carlo standard error exceeds half the fit residual.
  bool insufficient_paths = false;
};

/// log sup_x |F(v, x, h)| against log h over h_list at sample points; the
/// prediction is 1/2 + chi.
SlopeReport drift_bound_report(const DriftIncrementRule& rule, double v, std::span<const double> h_list,
                               std::span<const Vec> sample_points, const RegularityParams& params,
                               double tolerance = 0.05);

/// E[|A_{v+h} - A_v|^q]^{1/q} pooled over v on dyadic lags 2^j node spacings,
/// against 1/alpha + (theta - 1)/alpha.
SlopeReport moment_scaling(const PathEnsemble& ensemble, double q, int first_level, int last_level,
                           const RegularityParams& params, double tolerance = 0.1);

enum class IncrementKind { state, noise, drift };
enum class Integrand { one, sine_of_state };

/// ||S(Delta) - S(Delta')||_{L^l} between Riemann sums sum psi_{t_i} A(t_i, t_{i+1})
/// on the partition with mesh 2^level node spacings and its halving.
double riemann_gap(const PathEnsemble& ensemble, const DriftIncrementRule& rule, IncrementKind kind,
                   Integrand psi, int level, double l);

struct RiemannReport {
  std::vector<double> meshes;
  std::vector<double> gaps;
  double rate = 0.0;
  double r_squared = 0.0;
};

/// Gaps for mesh levels first_level..last_level and the fitted decay rate.
RiemannReport young_riemann(const PathEnsemble& ensemble, const DriftIncrementRule& rule, IncrementKind kind,
                            Integrand psi, int first_level, int last_level, double l);

struct IdentificationReport {
  std::vector<int> levels;
  std::vector<double> gaps;
  bool strictly_decreasing = false;
  double final_ratio = 0.0;
  bool pass = false;
};

/// ||sum psi(X) F(t, X, h) - sum psi(X) F_m(t, X) h||_{L^l} for each m, on the
/// ensemble's Euler grid (psi = sin of the first coordinate).
IdentificationReport drift_identification(const PathEnsemble& ensemble, const DriftIncrementRule& rule,
                                          std::span<const int> levels, double l, Integrand psi = Integrand::sine_of_state);

struct PathwiseGap {
  double sup_mean_gap = 0.0;
  std::vector<double> mean_gap;  // per Euler node
  std::vector<double> final_a;   // X_T samples of the first run (first coordinate)
  std::vector<double> final_b;
};

/// Two Euler runs with drifts F_{m1}, F_{m2} driven by identical noise;
/// sup_t E|X^{m1}_t - X^{m2}_t|. Levels <= 0 use the raw drift.
PathwiseGap pathwise_gap(const DriftField& drift, const SpectralMeasure& measure, int m1, int m2,
                         const EulerOptions& options);

/// W1 distance between the X_T marginals (first coordinate) for F_m and F_{2m}.
double law_distance(const DriftField& drift, const SpectralMeasure& measure, int m, const EulerOptions& options);

struct KrylovReport {
  std::vector<double> frequencies;
  std::vector<double> expectations;  // |E int_0^T f_k(X_s) ds|
  std::vector<double> norms;         // ||f_k||_{L^r B^{theta - alpha}_{p,q}}
  std::vector<double> ratios;
  double max_over_median = 0.0;
  bool pass = false;
};

/// Ratios |E int f_k(s, X_s) ds| / ||f_k|| for f_k = cos(k x_1); pass iff
/// max / median <= bound.
KrylovReport krylov_check(const PathEnsemble& ensemble, std::span<const double> frequencies,
                          const RegularityParams& params, double bound = 5.0, const BesovOptions& options = {});

/// Re int_0^T e^{i k x0} e^{-s psi(k)} ds, the drift-free value of E int cos(k X_s) ds.
double free_cosine_occupation(const SpectralMeasure& measure, double k, double x0, double horizon);

}  // namespace stablesde
