#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stablesde/fourier.hpp"
#include "stablesde/grid.hpp"
#include "stablesde/random.hpp"
#include "stablesde/spectral.hpp"

namespace stablesde {

/// Fourier-multiplier operator applied to the kernel: identity, a spatial
/// partial derivative, or the fractional magnitude |lambda|^alpha.
struct DerivativeTag {
  enum class Kind { identity, axis, fractional };
  Kind kind = Kind::identity;
  int axis = 0;

  static DerivativeTag identity() { return {Kind::identity, 0}; }
  static DerivativeTag along(int axis) { return {Kind::axis, axis}; }
  static DerivativeTag fractional() { return {Kind::fractional, 0}; }

  /// Differential order: 0, 1 or alpha.
  double order(double alpha) const;
  std::string name() const;
};

struct KernelDiagnostics {
  double mass = 0.0;
  double mass_defect = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  /// max(0, -min) / max; the FFT ripple relative to the peak.
  double negativity = 0.0;
  /// Largest exp(-t psi) on the Nyquist boundary of the frequency box.
  double nyquist_decay = 0.0;
};

/// Heat kernel p_alpha(t, .) of the stable process on a periodic grid,
/// centred at the origin (grid index N/2).
class StableKernel {
 public:
  StableKernel(SpectralMeasure measure, double t, GridFunction density, KernelDiagnostics diag)
      : measure_(std::move(measure)), t_(t), density_(std::move(density)), diag_(diag) {}

  const SpectralMeasure& measure() const { return measure_; }
  double time() const { return t_; }
  const Grid& grid() const { return density_.grid; }
  const GridFunction& density() const { return density_; }
  const KernelDiagnostics& diagnostics() const { return diag_; }

 private:
  SpectralMeasure measure_;
  double t_;
  GridFunction density_;
  KernelDiagnostics diag_;
};

/// Fourier coefficients (forward() normalization) of p_alpha(t, .) on the grid.
Spectrum kernel_spectrum(const SpectralMeasure& measure, double t, const Grid& grid);

/// p_alpha(t, .) by inverse FFT of exp(-t psi). Throws UnderResolvedGrid when
/// exp(-t psi) on the Nyquist boundary exceeds nyquist_tolerance.
StableKernel density_grid(const SpectralMeasure& measure, double t, const Grid& grid,
                          double nyquist_tolerance = 1e-8);

/// D^eta p_alpha(t, .) computed from the exact spectrum.
GridFunction multiplier_derivative(const StableKernel& kernel, DerivativeTag eta);

/// Half-width such that the mass of the noise outside [-L, L]^d at time
/// t_max is at most tail_budget (heavy-tail asymptotics for alpha < 2).
double default_half_width(const SpectralMeasure& measure, double t_max, double tail_budget = 1e-4);

struct KernelBoundsOptions {
  /// Exponent m of the polynomial envelope (1 + |y|/t^{1/alpha})^{-m};
  /// <= 0 selects d + 1 + alpha.
  double envelope_exponent = 0.0;
  /// The comparison density is the isotropic density at time dilation * t.
  double reference_dilation = 2.0;
  /// Grid points where the comparison density is below floor * its peak are
  /// round-off dominated and skipped.
  double floor = 1e-10;
  double ratio_limit = 10.0;
  double slope_tolerance = 0.05;
};

struct KernelBoundsRow {
  double t;
  double space_ratio;     // sup |D^l p| t^{l/alpha} / q
  double time_ratio;      // sup |d_t^l p| t^l / q
  double envelope_ratio;  // sup |D^l p| t^{l/alpha} / polynomial envelope
  double envelope_moment; // int envelope |y|^gamma dy
};

struct KernelBoundsReport {
  int order = 1;
  double moment = 0.0;
  double envelope_exponent = 0.0;
  std::vector<KernelBoundsRow> rows;
  double ratio_bound = 0.0;  // max over t of space_ratio
  double time_ratio_bound = 0.0;
  double moment_slope = 0.0;
  double predicted_slope = 0.0;
  bool ratio_ok = false;
  bool slope_ok = false;
  bool pass() const { return ratio_ok && slope_ok; }
};

/// Empirical check of the derivative bounds |D^l p| <= C t^{-l/alpha} q and of
/// the moment scaling int q |y|^gamma ~ t^{gamma/alpha}.
KernelBoundsReport verify_kernel_bounds(const SpectralMeasure& measure, std::span<const double> times, int order,
                                        double moment, const Grid& grid, const KernelBoundsOptions& options = {});

/// One exact draw of the stable increment W_t.
Vec sample_increment(const SpectralMeasure& measure, double t, RandomStream& rng);

/// CSV dump: coordinate columns followed by the value column.
void write_grid_csv(std::ostream& os, const GridFunction& f, const std::string& value_name = "value");

}  // namespace stablesde
