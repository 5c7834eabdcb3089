#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

namespace stablesde {

/// Points, wave vectors and directions. Dimension is 1 or 2; unused
/// trailing coordinates are zero.
using Vec = std::array<double, 2>;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1]; }
inline Vec operator*(double c, const Vec& v) { return {c * v[0], c * v[1]}; }
inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1]}; }

/// Rotation-invariant spectral measure. The total mass is stored; the
/// default mass makes psi(lambda) = |lambda|^alpha.
struct IsotropicKind {
  double total_mass;
};

/// sum_j c_j (delta_{e_j} + delta_{-e_j}).
struct CylindricalKind {
  std::vector<double> weights;
};

struct Atom {
  Vec direction;
  double weight;
};

/// Finite sum of Dirac masses, closed under xi -> -xi with equal weights.
struct AtomicKind {
  std::vector<Atom> atoms;
};

using MeasureKind = std::variant<IsotropicKind, CylindricalKind, AtomicKind>;

/// Spectral measure mu on the unit sphere together with the stability
/// index alpha in (1, 2]. Immutable once built.
class SpectralMeasure {
 public:
  static SpectralMeasure isotropic(double alpha, int dim);
  static SpectralMeasure isotropic_with_mass(double alpha, int dim, double total_mass);
  static SpectralMeasure cylindrical(double alpha, std::vector<double> weights);
  static SpectralMeasure atomic(double alpha, int dim, std::vector<Atom> atoms);

  double alpha() const { return alpha_; }
  int dim() const { return dim_; }
  const MeasureKind& kind() const { return kind_; }
  bool is_isotropic() const { return std::holds_alternative<IsotropicKind>(kind_); }

  /// psi(lambda) = int |lambda . xi|^alpha mu(d xi). No argument checks.
  double exponent(const Vec& lambda) const;

  /// Short human-readable tag, e.g. "isotropic(alpha=1.5,d=1,mass=1)".
  std::string describe() const;

 private:
  SpectralMeasure(double alpha, int dim, MeasureKind kind);

  double alpha_;
  int dim_;
  MeasureKind kind_;
  double isotropic_factor_ = 0.0;  // mass * E|xi_1|^alpha, isotropic only
};

/// E|xi_1|^alpha for xi uniform on S^{d-1}; isotropic psi is
/// total_mass * this * |lambda|^alpha.
double isotropic_sphere_moment(double alpha, int dim);

/// Checked evaluation of psi; rejects non-finite lambda.
double characteristic_exponent(const SpectralMeasure& measure, const Vec& lambda);

struct NondegeneracyReport {
  double kappa;
  double min_on_sphere;
  double max_on_sphere;
  Vec argmin_direction;
  Vec argmax_direction;
};

/// Grid search for kappa = max(sup psi, sup 1/psi) on the unit sphere.
/// resolution <= 0 selects the default (4096 directions for d = 2; the two
/// points of S^0 for d = 1). Throws DegenerateMeasure when min psi < floor.
NondegeneracyReport nondegeneracy_constants(const SpectralMeasure& measure, int resolution = 0,
                                            double floor = 1e-12);

}  // namespace stablesde
