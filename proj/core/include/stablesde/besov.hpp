#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stablesde/grid.hpp"
#include "stablesde/kernel.hpp"
#include "stablesde/random.hpp"
#include "stablesde/spectral.hpp"
#include "stablesde/stats.hpp"

namespace stablesde {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Index (theta, l, m) of B^theta_{l,m} under the thermic characterization
/// built on the isotropic alpha-stable semigroup. thermic_order <= 0 selects
/// n = 1 when theta < alpha and n = 2 otherwise.
struct BesovIndex {
  double regularity = 0.0;
  double integrability = kInfinity;
  double summability = kInfinity;
  double alpha = 2.0;
  int thermic_order = 0;

  int order() const;
  /// Throws InvalidArgument unless l, m in [1, inf], alpha in (1, 2] and n > theta / alpha.
  void validate() const;
};

struct BesovOptions {
  double v_min = 1e-6;
  /// Ratio between consecutive points of the geometric v-grid.
  double v_ratio = 0.8408964152537145;  // 2^{-1/4}
  /// Lower v_min to 0.05 / |lambda_max|^alpha when the requested one does
  /// not resolve the highest active frequency; otherwise throw.
  bool auto_v_min = true;
  /// Fourier modes below this fraction of the largest modulus are inactive.
  double active_threshold = 1e-13;
  /// Refine the m = infinity supremum by a parabola through the discrete peak.
  bool refine_sup = true;
};

struct BesovNormBreakdown {
  double lowpass = 0.0;
  double thermic = 0.0;
  int order = 1;
  double v_min = 0.0;
  std::vector<double> v_grid;
  /// v^{n - theta/alpha} ||d_v^n P_v f||_{L^l} on v_grid.
  std::vector<double> profile;

  double total() const { return lowpass + thermic; }
};

/// Thermic-characterization Besov norm, lowpass part plus thermic part.
BesovNormBreakdown besov_norm(const GridFunction& f, const BesovIndex& idx, const BesovOptions& options = {});

/// Grid quadrature of int f g.
double duality_pairing(const GridFunction& f, const GridFunction& g);

/// Conjugate exponent, with 1 <-> infinity.
double conjugate(double l);

struct DualityCheck {
  double pairing = 0.0;
  double bound = 0.0;
  bool holds() const { return std::abs(pairing) <= bound * (1.0 + 1e-12); }
};

/// |<f, g>| against ||f||_{B^theta_{l,m}} ||g||_{B^{-theta}_{l',m'}}.
DualityCheck check_duality(const GridFunction& f, const GridFunction& g, const BesovIndex& idx,
                           const BesovOptions& options = {});

/// sum over wave vectors with integer components |k_i| <= band of
/// a_k cos(k . x) + b_k sin(k . x), a, b i.i.d. standard normal; k counts
/// multiples of pi/L.
GridFunction random_band_limited(const Grid& grid, int band, RandomStream& rng);

struct HolderEstimate {
  double slope = 0.0;
  double r_squared = 0.0;
  std::vector<double> lags;
  std::vector<double> moduli;
  /// False when r^2 < 0.9 (modulus not a clean power law) or the modulus vanishes.
  bool reliable = false;
};

/// Power-law fit of a modulus of continuity.
HolderEstimate fit_modulus(std::span<const double> lags, std::span<const double> moduli);

/// Slope of log sup_x |f(x + delta) - f(x)| against log delta for the dyadic
/// lags delta = 2^j h, j = first_level..last_level (at least six lags).
/// In d = 2 the supremum also runs over both axes.
HolderEstimate holder_exponent(const GridFunction& f, int first_level, int last_level);

struct RegularityEstimate {
  double regularity = 0.0;
  double r_squared = 0.0;
};

/// Regularity estimate alpha * slope of log(v ||d_v P_v f||_inf) against log v
/// over the geometric grid on [v_lo, v_hi].
RegularityEstimate estimate_regularity(const GridFunction& f, double alpha, double v_lo, double v_hi);

struct ProductBoundRow {
  double gap;
  double lowpass;
  double thermic;
  double total;
};

struct ProductBoundReport {
  DerivativeTag eta;
  double predicted_exponent = 0.0;
  double fitted_exponent = 0.0;
  double r_squared = 0.0;
  std::vector<ProductBoundRow> rows;
  bool pass = false;
};

struct ProductBoundRequest {
  double gamma = 0.9;
  /// Integrability p of the drift space; the norm is taken in B^{1-gamma}_{p',q'}.
  double p = kInfinity;
  double q = kInfinity;
  std::vector<double> gaps;
  double tolerance = 0.1;
};

/// Decay in the gap s - t of ||Psi D^eta p_alpha(s - t, .)||_{B^{1-gamma}_{p',q'}}
/// against -[(1 - gamma)/alpha + d/(p alpha) + order(eta)/alpha].
ProductBoundReport verify_product_bound(const GridFunction& psi, const SpectralMeasure& measure, DerivativeTag eta,
                                        const ProductBoundRequest& request, const BesovOptions& options = {});

struct NormTableRow {
  double regularity;
  double integrability;
  double summability;
  double lowpass;
  double thermic;
};

/// CSV with columns theta,l,m,lowpass,thermic,total.
void write_norm_table(std::ostream& os, std::span<const NormTableRow> rows);

}  // namespace stablesde
