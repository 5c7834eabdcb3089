#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stablesde/besov.hpp"
#include "stablesde/gate.hpp"
#include "stablesde/grid.hpp"

namespace stablesde {

/// Target class L^r([0,T], B^{-1+gamma}_{p,q}) of a synthetic drift.
struct DriftSpec {
  int dim = 1;
  double gamma = 0.9;
  double p = std::numeric_limits<double>::infinity();
  double q = std::numeric_limits<double>::infinity();
  double r = std::numeric_limits<double>::infinity();
  /// Number of lacunary levels j = 0..levels-1 with |k_j| = 2^j.
  int levels = 8;
  /// Overall scale of the series.
  double amplitude = 1.0;
  /// Exponent a of the time profile (t/T)^{-a}; requires a r < 1.
  double time_exponent = 0.0;
  double horizon = 1.0;
  /// Built regularity is gamma + excess; the declared one is gamma.
  double regularity_excess = 0.05;

  void validate() const;
};

/// One term amplitude * cos(k . x + phase) of drift component `component`.
struct DriftAtom {
  int level = 0;
  int component = 0;
  Vec wavevector{0.0, 0.0};
  double raw_amplitude = 0.0;
  double amplitude = 0.0;  // after mollification
  double phase = 0.0;
};

/// Spectral drift F(t, x) = sigma(t) sum_atoms a cos(k . x + phase) e_component.
class DriftField {
 public:
  DriftField(int dim, std::vector<DriftAtom> atoms, double time_exponent = 0.0, double horizon = 1.0);

  /// Spatially constant drift c (zero-frequency atoms).
  static DriftField constant(int dim, const Vec& c);
  /// a cos(k . x + phase) along one component, time-constant.
  static DriftField single_mode(int dim, int component, const Vec& k, double a, double phase = 0.0);
  static DriftField zero(int dim);

  int dim() const { return dim_; }
  const std::vector<DriftAtom>& atoms() const { return atoms_; }
  double time_exponent() const { return time_exponent_; }
  double horizon() const { return horizon_; }
  double time_floor() const { return horizon_ * 1e-4; }
  /// Mollification scale delta (0 for the raw drift) and its level m.
  double delta() const { return delta_; }
  int mollification_level() const { return level_; }
  double mollification_alpha() const { return moll_alpha_; }
  bool is_time_constant() const { return time_exponent_ == 0.0; }
  bool is_zero() const;

  /// sigma(t) = (max(t, t_floor) / T)^{-a}.
  double time_profile(double t) const;
  /// Spatial part at x (time profile excluded).
  Vec spatial(const Vec& x) const;
  Vec value(double t, const Vec& x) const { return time_profile(t) * spatial(x); }
  /// Spatial part of one component sampled on a grid.
  GridFunction sample(const Grid& grid, int component) const;

  DriftField scaled(double c) const;

  /// Manifest holding indices, levels, phases and seed; enough for a bit-exact rebuild.
  std::string to_manifest() const;
  static DriftField from_manifest(const std::string& text);

  /// Construction metadata echoed into the manifest.
  DriftSpec spec;
  std::uint64_t seed = 0;

 private:
  friend DriftField mollify(const DriftField& field, int m, double alpha);

  int dim_;
  std::vector<DriftAtom> atoms_;
  double time_exponent_;
  double horizon_;
  double delta_ = 0.0;
  int level_ = 0;
  double moll_alpha_ = 0.0;
};

/// Lacunary series with levels j = 0..J-1, |k_j| = 2^j along axis (j + component) mod d,
/// amplitude scale * 2^{j(1 - gamma - excess)} and uniform random phases.
DriftField build_drift(const DriftSpec& spec, std::uint64_t seed);

/// Convolution with the isotropic kernel at time delta_m = 2^{-alpha m}:
/// a_j -> a_j exp(-delta_m |k_j|^alpha). The time profile is unchanged.
DriftField mollify(const DriftField& field, int m, double alpha);

/// Gate verdict for the drift's declared indices under noise index alpha.
GateReport drift_gate(const DriftSpec& spec, double alpha);

/// {0, t_floor, geometric points up to T}: resolves the t^{-a} singularity.
std::vector<double> singular_time_grid(double horizon, double floor, int points);

struct DriftNormIndices {
  double r = std::numeric_limits<double>::infinity();
  double p = std::numeric_limits<double>::infinity();
  double q = std::numeric_limits<double>::infinity();
  /// Spatial regularity -1 + gamma.
  double gamma = 0.9;
  double alpha = 2.0;
};

/// max over components of ||F_c||_{B^{-1+gamma}_{p,q}} for the spatial part.
double spatial_drift_norm(const DriftField& field, const Grid& grid, const DriftNormIndices& idx,
                          const BesovOptions& options = {});

/// L^r([0,T]) quadrature over time_grid of the spatial norm of F(t, .).
double drift_norm(const DriftField& field, const Grid& grid, const DriftNormIndices& idx,
                  std::span<const double> time_grid, const BesovOptions& options = {});

/// Relative change of int_0^T sigma^r caused by capping at t_floor.
double time_cap_effect(const DriftField& field, double r);

/// L^r([0,T]) norm of sigma on time_grid; both fields must share it.
double time_profile_norm(const DriftField& field, double r, std::span<const double> time_grid);

/// ||F - G||_{L^r B^{-1+gamma}_{p,q}} for two fields with the same time profile.
double drift_difference_norm(const DriftField& a, const DriftField& b, const Grid& grid, const DriftNormIndices& idx,
                             std::span<const double> time_grid, const BesovOptions& options = {});

}  // namespace stablesde
