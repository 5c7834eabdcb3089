#include "stablesde/besov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "stablesde/errors.hpp"
#include "stablesde/fourier.hpp"

namespace stablesde {
namespace {

double magnitude(const Vec& l, int dim) { return dim == 1 ? std::abs(l[0]) : std::hypot(l[0], l[1]); }

double bump(double r) { return r < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0; }

// Geometric grid from v_min up to v_max (inclusive), ascending.
std::vector<double> geometric_grid(double v_min, double v_max, double ratio) {
  std::vector<double> v;
  for (double x = v_max; x > v_min * (1.0 + 1e-12); x *= ratio) v.push_back(x);
  v.push_back(v_min);
  std::reverse(v.begin(), v.end());
  return v;
}

// ||d_v^n P_v f||_{L^l} for the isotropic semigroup, from the spectrum of f.
double thermic_slice(const Grid& g, const Spectrum& c, const std::vector<double>& lam_alpha, double v, int n,
                     double l) {
  Spectrum s(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double a = lam_alpha[k];
    s[k] = c[k] * (std::pow(-a, n) * std::exp(-v * a));
  }
  return inverse(g, std::move(s)).lp_norm(l);
}

double parabola_peak(double s0, double y0, double s1, double y1, double s2, double y2) {
  // Lagrange form of the parabola through the three points.
  const double d0 = (s0 - s1) * (s0 - s2), d1 = (s1 - s0) * (s1 - s2), d2 = (s2 - s0) * (s2 - s1);
  const double a = y0 / d0 + y1 / d1 + y2 / d2;
  const double b = -(y0 * (s1 + s2) / d0 + y1 * (s0 + s2) / d1 + y2 * (s0 + s1) / d2);
  const double c = y0 * s1 * s2 / d0 + y1 * s0 * s2 / d1 + y2 * s0 * s1 / d2;
  if (!(a < 0.0)) return y1;
  const double s = std::clamp(-b / (2.0 * a), s0, s2);
  return a * s * s + b * s + c;
}

}  // namespace

int BesovIndex::order() const {
  if (thermic_order > 0) return thermic_order;
  return regularity < alpha ? 1 : 2;
}

void BesovIndex::validate() const {
  if (!(integrability >= 1.0) || !(summability >= 1.0)) throw InvalidArgument("Besov exponents must lie in [1, inf]");
  if (!(alpha > 1.0 && alpha <= 2.0)) throw InvalidArgument("alpha must lie in (1, 2]");
  if (!std::isfinite(regularity)) throw InvalidArgument("regularity must be finite");
  if (!(order() > regularity / alpha)) throw InvalidArgument("thermic order must exceed theta / alpha");
}

double conjugate(double l) {
  if (l == 1.0) return kInfinity;
  if (std::isinf(l)) return 1.0;
  return l / (l - 1.0);
}

BesovNormBreakdown besov_norm(const GridFunction& f, const BesovIndex& idx, const BesovOptions& options) {
  idx.validate();
  if (!f.all_finite()) throw InvalidArgument("besov_norm: non-finite samples");
  const Grid& g = f.grid;
  const int d = g.dim();
  const int n = idx.order();
  const double alpha = idx.alpha;
  const double c = n - idx.regularity / alpha;

  const Spectrum coeff = forward(f);
  std::vector<double> lam_alpha(coeff.size());
  double peak = 0.0;
  for (const auto& z : coeff) peak = std::max(peak, std::abs(z));
  double top = 0.0;
  for (std::size_t k = 0; k < coeff.size(); ++k) {
    lam_alpha[k] = std::pow(magnitude(g.wavevector(k), d), alpha);
    if (std::abs(coeff[k]) > options.active_threshold * peak) top = std::max(top, lam_alpha[k]);
  }

  BesovNormBreakdown out;
  out.order = n;
  out.v_min = options.v_min;
  if (top > 0.0 && std::exp(-out.v_min * top) <= 0.5) {
    if (!options.auto_v_min) {
      throw UnderResolvedGrid("v_min does not resolve the highest active frequency");
    }
    out.v_min = 0.05 / top;
  }

  Spectrum low(coeff.size());
  for (std::size_t k = 0; k < coeff.size(); ++k) low[k] = coeff[k] * bump(magnitude(g.wavevector(k), d));
  out.lowpass = inverse(g, std::move(low)).lp_norm(idx.integrability);

  out.v_grid = geometric_grid(out.v_min, 1.0, options.v_ratio);
  out.profile.reserve(out.v_grid.size());
  for (double v : out.v_grid) {
    out.profile.push_back(std::pow(v, c) * thermic_slice(g, coeff, lam_alpha, v, n, idx.integrability));
  }

  const auto& p = out.profile;
  if (std::isinf(idx.summability)) {
    const auto it = std::max_element(p.begin(), p.end());
    double best = *it;
    const auto i = static_cast<std::size_t>(it - p.begin());
    if (options.refine_sup && i > 0 && i + 1 < p.size() && p[i - 1] > 0.0 && p[i + 1] > 0.0) {
      const auto& v = out.v_grid;
      best = std::max(best, std::exp(parabola_peak(std::log(v[i - 1]), std::log(p[i - 1]), std::log(v[i]),
                                                   std::log(p[i]), std::log(v[i + 1]), std::log(p[i + 1]))));
    }
    out.thermic = best;
  } else {
    const double m = idx.summability;
    double integral = std::pow(p.front(), m) / (c * m);  // v < v_min: profile ~ v^c
    for (std::size_t i = 1; i < p.size(); ++i) {
      const double ds = std::log(out.v_grid[i] / out.v_grid[i - 1]);
      integral += 0.5 * ds * (std::pow(p[i - 1], m) + std::pow(p[i], m));
    }
    out.thermic = std::pow(integral, 1.0 / m);
  }
  return out;
}

double duality_pairing(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid == g.grid)) throw InvalidArgument("duality_pairing: grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * g.values[i];
  return s * f.grid.cell_volume();
}

DualityCheck check_duality(const GridFunction& f, const GridFunction& g, const BesovIndex& idx,
                           const BesovOptions& options) {
  BesovIndex dual{-idx.regularity, conjugate(idx.integrability), conjugate(idx.summability), idx.alpha, 0};
  DualityCheck out;
  out.pairing = duality_pairing(f, g);
  out.bound = besov_norm(f, idx, options).total() * besov_norm(g, dual, options).total();
  return out;
}

GridFunction random_band_limited(const Grid& grid, int band, RandomStream& rng) {
  if (band < 0) throw InvalidArgument("band must be non-negative");
  const double unit = std::numbers::pi / grid.half_width();
  struct Mode {
    Vec k;
    double a, b;
  };
  std::vector<Mode> modes;
  // half-space representatives: cos and sin of -k repeat those of k
  for (int i = 0; i <= band; ++i) {
    const int jlo = grid.dim() == 1 ? 0 : (i == 0 ? 0 : -band);
    const int jhi = grid.dim() == 1 ? 0 : band;
    for (int j = jlo; j <= jhi; ++j) {
      const double a = rng.normal();
      const double b = rng.normal();
      modes.push_back({Vec{i * unit, j * unit}, a, b});
    }
  }
  return GridFunction::sample(grid, [&](const Vec& x) {
    double s = 0.0;
    for (const auto& m : modes) {
      const double ph = dot(m.k, x);
      s += m.a * std::cos(ph) + m.b * std::sin(ph);
    }
    return s;
  });
}

HolderEstimate fit_modulus(std::span<const double> lags, std::span<const double> moduli) {
  HolderEstimate out;
  out.lags.assign(lags.begin(), lags.end());
  out.moduli.assign(moduli.begin(), moduli.end());
  if (lags.size() != moduli.size() || lags.size() < 2) throw InvalidArgument("fit_modulus needs matching samples");
  for (double m : moduli) {
    if (!(m > 0.0)) return out;
  }
  const LinearFit fit = fit_log_log(lags, moduli);
  out.slope = fit.slope;
  out.r_squared = fit.r_squared;
  out.reliable = fit.r_squared >= 0.9;
  return out;
}

HolderEstimate holder_exponent(const GridFunction& f, int first_level, int last_level) {
  if (last_level - first_level + 1 < 6) throw InvalidArgument("holder_exponent needs at least six dyadic lags");
  const Grid& g = f.grid;
  const int n = g.points();
  if (first_level < 0 || (1 << last_level) >= n) throw InvalidArgument("lag range exceeds the grid");
  std::vector<double> lags, moduli;
  for (int j = first_level; j <= last_level; ++j) {
    const int s = 1 << j;
    double sup = 0.0;
    if (g.dim() == 1) {
      for (int i = 0; i < n; ++i) sup = std::max(sup, std::abs(f.values[g.index(i + s)] - f.values[g.index(i)]));
    } else {
      for (int i0 = 0; i0 < n; ++i0) {
        for (int i1 = 0; i1 < n; ++i1) {
          const double here = f.values[g.index(i0, i1)];
          sup = std::max(sup, std::abs(f.values[g.index(i0 + s, i1)] - here));
          sup = std::max(sup, std::abs(f.values[g.index(i0, i1 + s)] - here));
        }
      }
    }
    lags.push_back(s * g.spacing());
    moduli.push_back(sup);
  }
  return fit_modulus(lags, moduli);
}

RegularityEstimate estimate_regularity(const GridFunction& f, double alpha, double v_lo, double v_hi) {
  if (!(v_lo > 0.0 && v_hi > v_lo)) throw InvalidArgument("estimate_regularity: bad v range");
  const Grid& g = f.grid;
  const Spectrum coeff = forward(f);
  std::vector<double> lam_alpha(coeff.size());
  for (std::size_t k = 0; k < coeff.size(); ++k) lam_alpha[k] = std::pow(magnitude(g.wavevector(k), g.dim()), alpha);
  const auto v = geometric_grid(v_lo, v_hi, 0.8408964152537145);
  std::vector<double> y;
  for (double x : v) y.push_back(x * thermic_slice(g, coeff, lam_alpha, x, 1, kInfinity));
  const LinearFit fit = fit_log_log(v, y);
  return {alpha * fit.slope, fit.r_squared};
}

ProductBoundReport verify_product_bound(const GridFunction& psi, const SpectralMeasure& measure, DerivativeTag eta,
                                        const ProductBoundRequest& request, const BesovOptions& options) {
  if (request.gaps.size() < 2) throw InvalidArgument("verify_product_bound needs at least two gaps");
  const double alpha = measure.alpha();
  const int d = measure.dim();
  ProductBoundReport rep;
  rep.eta = eta;
  const double spatial = std::isinf(request.p) ? 0.0 : d / (request.p * alpha);
  rep.predicted_exponent = -((1.0 - request.gamma) / alpha + spatial + eta.order(alpha) / alpha);

  const BesovIndex idx{1.0 - request.gamma, conjugate(request.p), conjugate(request.q), alpha, 0};
  std::vector<double> gaps, totals;
  for (double gap : request.gaps) {
    const StableKernel k = density_grid(measure, gap, psi.grid);
    const GridFunction prod = hadamard(psi, multiplier_derivative(k, eta));
    const BesovNormBreakdown b = besov_norm(prod, idx, options);
    rep.rows.push_back({gap, b.lowpass, b.thermic, b.total()});
    gaps.push_back(gap);
    totals.push_back(b.total());
  }
  const LinearFit fit = fit_log_log(gaps, totals);
  rep.fitted_exponent = fit.slope;
  rep.r_squared = fit.r_squared;
  rep.pass = rep.fitted_exponent >= rep.predicted_exponent - request.tolerance;
  return rep;
}

void write_norm_table(std::ostream& os, std::span<const NormTableRow> rows) {
  os << "theta,l,m,lowpass,thermic,total\n";
  os.precision(17);
  for (const auto& r : rows) {
    os << r.regularity << "," << r.integrability << "," << r.summability << "," << r.lowpass << "," << r.thermic << ","
       << r.lowpass + r.thermic << "\n";
  }
}

}  // namespace stablesde
