#include "stablesde/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "stablesde/errors.hpp"
#include "stablesde/fourier.hpp"
#include "stablesde/stats.hpp"

namespace stablesde {
namespace {

double norm_of(const Vec& v, int dim) { return dim == 1 ? std::abs(v[0]) : std::hypot(v[0], v[1]); }

template <class M>
GridFunction synthesize(const Grid& grid, const Spectrum& base, M&& multiplier) {
  Spectrum c(base.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = base[k] * multiplier(k, grid.wavevector(k));
  return inverse(grid, std::move(c));
}

bool nyquist_along(const Grid& g, std::size_t k, int axis) {
  const auto half = static_cast<std::size_t>(g.points() / 2);
  if (g.dim() == 1) return k == half;
  return axis == 0 ? k / g.points() == half : k % g.points() == half;
}

}  // namespace

double DerivativeTag::order(double alpha) const {
  switch (kind) {
    case Kind::identity: return 0.0;
    case Kind::axis: return 1.0;
    case Kind::fractional: return alpha;
  }
  return 0.0;
}

std::string DerivativeTag::name() const {
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::axis: return "axis-" + std::to_string(axis + 1);
    case Kind::fractional: return "fractional";
  }
  return "?";
}

Spectrum kernel_spectrum(const SpectralMeasure& measure, double t, const Grid& grid) {
  if (measure.dim() != grid.dim()) throw InvalidArgument("measure and grid dimensions differ");
  Spectrum c(grid.size());
  const double scale = std::pow(2.0 * grid.half_width(), -grid.dim());
  const int n = grid.points();
  for (std::size_t k = 0; k < c.size(); ++k) {
    const int parity = grid.dim() == 1 ? static_cast<int>(k) : static_cast<int>(k / n + k % n);
    const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
    c[k] = sign * scale * std::exp(-t * measure.exponent(grid.wavevector(k)));
  }
  return c;
}

StableKernel density_grid(const SpectralMeasure& measure, double t, const Grid& grid, double nyquist_tolerance) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("kernel time must be positive");
  if (measure.dim() != grid.dim()) throw InvalidArgument("measure and grid dimensions differ");

  KernelDiagnostics diag;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.is_nyquist(k)) diag.nyquist_decay = std::max(diag.nyquist_decay, std::exp(-t * measure.exponent(grid.wavevector(k))));
  }
  if (diag.nyquist_decay > nyquist_tolerance) {
    throw UnderResolvedGrid("grid under-resolves p(t) at t=" + std::to_string(t) +
                            ": exp(-t psi) at Nyquist = " + std::to_string(diag.nyquist_decay));
  }

  GridFunction density = inverse(grid, kernel_spectrum(measure, t, grid));
  diag.mass = density.integral();
  diag.mass_defect = std::abs(diag.mass - 1.0);
  diag.min_value = density.min();
  diag.max_value = density.max();
  diag.negativity = std::max(0.0, -diag.min_value) / diag.max_value;
  return StableKernel(measure, t, std::move(density), diag);
}

GridFunction multiplier_derivative(const StableKernel& kernel, DerivativeTag eta) {
  const Grid& g = kernel.grid();
  if (eta.kind == DerivativeTag::Kind::identity) return kernel.density();
  if (eta.kind == DerivativeTag::Kind::axis && (eta.axis < 0 || eta.axis >= g.dim())) {
    throw InvalidArgument("derivative axis out of range");
  }
  const Spectrum base = kernel_spectrum(kernel.measure(), kernel.time(), g);
  const double alpha = kernel.measure().alpha();
  if (eta.kind == DerivativeTag::Kind::axis) {
    return synthesize(g, base, [&](std::size_t k, const Vec& l) {
      return nyquist_along(g, k, eta.axis) ? std::complex<double>(0.0) : std::complex<double>(0.0, l[eta.axis]);
    });
  }
  return synthesize(g, base, [&](std::size_t, const Vec& l) { return std::complex<double>(std::pow(norm_of(l, g.dim()), alpha)); });
}

double default_half_width(const SpectralMeasure& measure, double t_max, double tail_budget) {
  if (!(t_max > 0.0) || !(tail_budget > 0.0 && tail_budget < 1.0)) throw InvalidArgument("bad half-width request");
  const double alpha = measure.alpha();
  const auto nd = nondegeneracy_constants(measure);
  const double scale = nd.max_on_sphere * t_max;  // psi <= scale/t_max on the sphere
  const double per_axis_budget = tail_budget / measure.dim();
  if (alpha == 2.0) {
    // Gaussian with variance 2 * scale per axis.
    const double z = std::sqrt(2.0 * std::log(2.0 / per_axis_budget)) + 1.0;
    return z * std::sqrt(2.0 * scale);
  }
  // P(|X| > x) ~ (2/pi) Gamma(alpha) sin(pi alpha / 2) scale x^{-alpha}.
  const double c = 2.0 / std::numbers::pi * std::tgamma(alpha) * std::sin(std::numbers::pi * alpha / 2.0);
  return std::pow(c * scale / per_axis_budget, 1.0 / alpha);
}

KernelBoundsReport verify_kernel_bounds(const SpectralMeasure& measure, std::span<const double> times, int order,
                                        double moment, const Grid& grid, const KernelBoundsOptions& options) {
  if (order != 1 && order != 2) throw InvalidArgument("derivative order must be 1 or 2");
  const double alpha = measure.alpha();
  const int d = grid.dim();
  if (!(moment >= 0.0 && moment < alpha)) throw InvalidArgument("moment order must lie in [0, alpha)");
  if (times.size() < 2) throw InvalidArgument("need at least two times for the moment regression");

  KernelBoundsReport rep;
  rep.order = order;
  rep.moment = moment;
  rep.envelope_exponent = options.envelope_exponent > 0.0 ? options.envelope_exponent : d + 1.0 + alpha;
  rep.predicted_slope = moment / alpha;

  const SpectralMeasure reference = SpectralMeasure::isotropic(alpha, d);
  std::vector<double> ts, moments;
  for (double t : times) {
    const Spectrum base = kernel_spectrum(measure, t, grid);
    // Spatial derivative magnitude: gradient norm (l = 1) or Hessian Frobenius norm (l = 2).
    std::vector<double> dmag(grid.size(), 0.0);
    if (order == 1) {
      for (int a = 0; a < d; ++a) {
        const GridFunction da = synthesize(grid, base, [&](std::size_t k, const Vec& l) {
          return nyquist_along(grid, k, a) ? std::complex<double>(0.0) : std::complex<double>(0.0, l[a]);
        });
        for (std::size_t i = 0; i < dmag.size(); ++i) dmag[i] += da.values[i] * da.values[i];
      }
    } else {
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          const GridFunction dab = synthesize(grid, base, [&](std::size_t, const Vec& l) { return std::complex<double>(-l[a] * l[b]); });
          for (std::size_t i = 0; i < dmag.size(); ++i) dmag[i] += dab.values[i] * dab.values[i];
        }
      }
    }
    for (double& v : dmag) v = std::sqrt(v);
    const double psi_power = order;
    const GridFunction dt = synthesize(grid, base, [&](std::size_t, const Vec& l) {
      return std::complex<double>(std::pow(-measure.exponent(l), psi_power));
    });

    const GridFunction q = inverse(grid, kernel_spectrum(reference, options.reference_dilation * t, grid));
    const double qmax = q.max();

    // Polynomial envelope C_m t^{-d/alpha} (1 + |y|/t^{1/alpha})^{-m}, normalized on the grid.
    GridFunction env(grid);
    const double s = std::pow(t, 1.0 / alpha);
    for (std::size_t i = 0; i < env.values.size(); ++i) {
      const double r = norm_of(grid.point(i), d);
      env.values[i] = std::pow(1.0 + r / s, -rep.envelope_exponent);
    }
    env *= 1.0 / env.integral();

    KernelBoundsRow row{t, 0.0, 0.0, 0.0, 0.0};
    const double space_scale = std::pow(t, order / alpha);
    const double time_scale = std::pow(t, order);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (q.values[i] >= options.floor * qmax) {
        row.space_ratio = std::max(row.space_ratio, dmag[i] * space_scale / q.values[i]);
        row.time_ratio = std::max(row.time_ratio, std::abs(dt.values[i]) * time_scale / q.values[i]);
      }
      if (env.values[i] >= options.floor * env.max()) {
        row.envelope_ratio = std::max(row.envelope_ratio, dmag[i] * space_scale / env.values[i]);
      }
    }
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) m += env.values[i] * std::pow(norm_of(grid.point(i), d), moment);
    row.envelope_moment = m * grid.cell_volume();
    rep.rows.push_back(row);
    rep.ratio_bound = std::max(rep.ratio_bound, row.space_ratio);
    rep.time_ratio_bound = std::max(rep.time_ratio_bound, row.time_ratio);
    ts.push_back(t);
    moments.push_back(row.envelope_moment);
  }
  rep.moment_slope = fit_log_log(ts, moments).slope;
  rep.ratio_ok = std::isfinite(rep.ratio_bound) && rep.ratio_bound <= options.ratio_limit;
  rep.slope_ok = std::abs(rep.moment_slope - rep.predicted_slope) <= options.slope_tolerance;
  return rep;
}

Vec sample_increment(const SpectralMeasure& measure, double t, RandomStream& rng) {
  if (!(t > 0.0)) throw InvalidArgument("increment time must be positive");
  const double alpha = measure.alpha();
  const int d = measure.dim();
  auto scalar = [&](double scale) {
    // psi contribution scale * |l|^alpha along one direction.
    if (alpha == 2.0) return std::sqrt(2.0 * scale * t) * rng.normal();
    return std::pow(scale * t, 1.0 / alpha) * symmetric_stable(alpha, rng);
  };
  Vec out{0.0, 0.0};
  if (const auto* iso = std::get_if<IsotropicKind>(&measure.kind())) {
    const double c = iso->total_mass * isotropic_sphere_moment(alpha, d);
    if (d == 1) {
      out[0] = scalar(c);
      return out;
    }
    if (alpha == 2.0) {
      out[0] = std::sqrt(2.0 * c * t) * rng.normal();
      out[1] = std::sqrt(2.0 * c * t) * rng.normal();
      return out;
    }
    // Brownian subordination: sqrt(A) G, G ~ N(0, 2 I), E exp(-A s) = exp(-c t s^{alpha/2}).
    const double a = std::pow(c * t, 2.0 / alpha) * positive_stable(alpha / 2.0, rng);
    out[0] = std::sqrt(2.0 * a) * rng.normal();
    out[1] = std::sqrt(2.0 * a) * rng.normal();
    return out;
  }
  if (const auto* cyl = std::get_if<CylindricalKind>(&measure.kind())) {
    for (int j = 0; j < d; ++j) out[j] = scalar(2.0 * cyl->weights[j]);
    return out;
  }
  const auto& atoms = std::get<AtomicKind>(measure.kind()).atoms;
  // Each symmetric pair (xi, -xi) carries weight 2w along xi; only the
  // representative with the lexicographically positive direction draws.
  for (const auto& a : atoms) {
    const bool representative = a.direction[0] > 0.0 || (a.direction[0] == 0.0 && a.direction[1] > 0.0);
    if (!representative) continue;
    const double x = scalar(2.0 * a.weight);
    out[0] += x * a.direction[0];
    out[1] += x * a.direction[1];
  }
  return out;
}

void write_grid_csv(std::ostream& os, const GridFunction& f, const std::string& value_name) {
  const Grid& g = f.grid;
  os << (g.dim() == 1 ? "x," : "x1,x2,") << value_name << "\n";
  os.precision(17);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec p = g.point(i);
    os << p[0] << ",";
    if (g.dim() == 2) os << p[1] << ",";
    os << f.values[i] << "\n";
  }
}

}  // namespace stablesde
