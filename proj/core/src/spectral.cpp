#include "stablesde/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "stablesde/errors.hpp"

namespace stablesde {
namespace {

void check_alpha_dim(double alpha, int dim) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    throw InvalidArgument("stability index must lie in (1, 2], got " + std::to_string(alpha));
  }
  if (dim != 1 && dim != 2) {
    throw InvalidArgument("dimension must be 1 or 2, got " + std::to_string(dim));
  }
}

constexpr double kSymmetryTol = 1e-12;

bool same_direction(const Vec& a, const Vec& b) {
  return std::abs(a[0] - b[0]) <= kSymmetryTol && std::abs(a[1] - b[1]) <= kSymmetryTol;
}

}  // namespace

double isotropic_sphere_moment(double alpha, int dim) {
  if (dim == 1) return 1.0;
  // E|cos U|^alpha for U uniform on the circle.
  return std::tgamma((alpha + 1.0) / 2.0) / (std::sqrt(std::numbers::pi) * std::tgamma(alpha / 2.0 + 1.0));
}

SpectralMeasure::SpectralMeasure(double alpha, int dim, MeasureKind kind)
    : alpha_(alpha), dim_(dim), kind_(std::move(kind)) {
  if (const auto* iso = std::get_if<IsotropicKind>(&kind_)) {
    isotropic_factor_ = iso->total_mass * isotropic_sphere_moment(alpha_, dim_);
  }
}

SpectralMeasure SpectralMeasure::isotropic(double alpha, int dim) {
  check_alpha_dim(alpha, dim);
  return SpectralMeasure(alpha, dim, IsotropicKind{1.0 / isotropic_sphere_moment(alpha, dim)});
}

SpectralMeasure SpectralMeasure::isotropic_with_mass(double alpha, int dim, double total_mass) {
  check_alpha_dim(alpha, dim);
  if (!(total_mass > 0.0) || !std::isfinite(total_mass)) {
    throw InvalidArgument("isotropic total mass must be positive");
  }
  return SpectralMeasure(alpha, dim, IsotropicKind{total_mass});
}

SpectralMeasure SpectralMeasure::cylindrical(double alpha, std::vector<double> weights) {
  const int dim = static_cast<int>(weights.size());
  check_alpha_dim(alpha, dim);
  for (double c : weights) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("cylindrical weights must be positive");
  }
  return SpectralMeasure(alpha, dim, CylindricalKind{std::move(weights)});
}

SpectralMeasure SpectralMeasure::atomic(double alpha, int dim, std::vector<Atom> atoms) {
  check_alpha_dim(alpha, dim);
  if (atoms.empty()) throw InvalidArgument("atomic measure needs at least one atom");
  for (const auto& a : atoms) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) throw InvalidArgument("atom weights must be positive");
    if (dim == 1 && a.direction[1] != 0.0) throw InvalidArgument("1-d atoms must have zero second coordinate");
    const double norm = std::hypot(a.direction[0], a.direction[1]);
    if (std::abs(norm - 1.0) > 1e-9) throw InvalidArgument("atom directions must be unit vectors");
  }
  for (const auto& a : atoms) {
    const Vec mirror{-a.direction[0], -a.direction[1]};
    bool found = false;
    for (const auto& b : atoms) {
      if (same_direction(b.direction, mirror) && std::abs(b.weight - a.weight) <= kSymmetryTol * a.weight) {
        found = true;
        break;
      }
    }
    if (!found) throw InvalidArgument("atomic measure is not symmetric under xi -> -xi");
  }
  return SpectralMeasure(alpha, dim, AtomicKind{std::move(atoms)});
}

double SpectralMeasure::exponent(const Vec& lambda) const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, IsotropicKind>) {
          const double norm = dim_ == 1 ? std::abs(lambda[0]) : std::hypot(lambda[0], lambda[1]);
          return isotropic_factor_ * std::pow(norm, alpha_);
        } else if constexpr (std::is_same_v<K, CylindricalKind>) {
          double s = 0.0;
          for (int j = 0; j < dim_; ++j) s += 2.0 * k.weights[j] * std::pow(std::abs(lambda[j]), alpha_);
          return s;
        } else {
          double s = 0.0;
          for (const auto& a : k.atoms) s += a.weight * std::pow(std::abs(dot(lambda, a.direction)), alpha_);
          return s;
        }
      },
      kind_);
}

std::string SpectralMeasure::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, IsotropicKind>) {
          os << "isotropic(alpha=" << alpha_ << ",d=" << dim_ << ",mass=" << k.total_mass << ")";
        } else if constexpr (std::is_same_v<K, CylindricalKind>) {
          os << "cylindrical(alpha=" << alpha_ << ",c=[";
          for (std::size_t j = 0; j < k.weights.size(); ++j) os << (j ? "," : "") << k.weights[j];
          os << "])";
        } else {
          os << "atomic(alpha=" << alpha_ << ",d=" << dim_ << ",atoms=" << k.atoms.size() << ")";
        }
      },
      kind_);
  return os.str();
}

double characteristic_exponent(const SpectralMeasure& measure, const Vec& lambda) {
  for (int j = 0; j < measure.dim(); ++j) {
    if (!std::isfinite(lambda[j])) throw InvalidArgument("characteristic exponent: non-finite frequency");
  }
  return measure.exponent(lambda);
}

NondegeneracyReport nondegeneracy_constants(const SpectralMeasure& measure, int resolution, double floor) {
  std::vector<Vec> directions;
  if (measure.dim() == 1) {
    directions = {Vec{1.0, 0.0}, Vec{-1.0, 0.0}};
  } else {
    if (resolution <= 0) resolution = 4096;
    if (resolution < 64) throw InvalidArgument("sphere search needs at least 64 directions");
    directions.reserve(resolution);
    for (int i = 0; i < resolution; ++i) {
      const double a = 2.0 * std::numbers::pi * i / resolution;
      directions.push_back(Vec{std::cos(a), std::sin(a)});
    }
  }
  NondegeneracyReport rep{};
  rep.min_on_sphere = INFINITY;
  rep.max_on_sphere = -INFINITY;
  for (const auto& xi : directions) {
    const double v = measure.exponent(xi);
    if (v < rep.min_on_sphere) {
      rep.min_on_sphere = v;
      rep.argmin_direction = xi;
    }
    if (v > rep.max_on_sphere) {
      rep.max_on_sphere = v;
      rep.argmax_direction = xi;
    }
  }
  if (rep.min_on_sphere < floor) {
    throw DegenerateMeasure("spectral measure is degenerate: min psi on the sphere = " +
                            std::to_string(rep.min_on_sphere));
  }
  rep.kappa = std::max({rep.max_on_sphere, 1.0 / rep.min_on_sphere, 1.0});
  return rep;
}

}  // namespace stablesde
