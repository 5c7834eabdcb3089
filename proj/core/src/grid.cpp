#include "stablesde/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stablesde/errors.hpp"

namespace stablesde {

Grid::Grid(int dim, double half_width, int points) : dim_(dim), half_width_(half_width), points_(points) {
  if (dim != 1 && dim != 2) throw InvalidArgument("grid dimension must be 1 or 2");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw InvalidArgument("grid half-width must be positive");
  if (points < 64 || (points & (points - 1)) != 0) {
    throw InvalidArgument("grid points per axis must be a power of two >= 64, got " + std::to_string(points));
  }
}

std::size_t Grid::size() const {
  const auto n = static_cast<std::size_t>(points_);
  return dim_ == 1 ? n : n * n;
}

double Grid::cell_volume() const { return dim_ == 1 ? spacing() : spacing() * spacing(); }

double Grid::frequency(int k) const { return std::numbers::pi / half_width_ * signed_index(k); }

Vec Grid::point(std::size_t flat) const {
  if (dim_ == 1) return Vec{coordinate(static_cast<int>(flat)), 0.0};
  const auto n = static_cast<std::size_t>(points_);
  return Vec{coordinate(static_cast<int>(flat / n)), coordinate(static_cast<int>(flat % n))};
}

Vec Grid::wavevector(std::size_t flat) const {
  if (dim_ == 1) return Vec{frequency(static_cast<int>(flat)), 0.0};
  const auto n = static_cast<std::size_t>(points_);
  return Vec{frequency(static_cast<int>(flat / n)), frequency(static_cast<int>(flat % n))};
}

bool Grid::is_nyquist(std::size_t flat) const {
  const auto n = static_cast<std::size_t>(points_);
  const auto half = n / 2;
  if (dim_ == 1) return flat == half;
  return flat / n == half || flat % n == half;
}

std::size_t Grid::index(int i0, int i1) const {
  auto wrap = [this](int i) { return static_cast<std::size_t>(((i % points_) + points_) % points_); };
  if (dim_ == 1) return wrap(i0);
  return wrap(i0) * static_cast<std::size_t>(points_) + wrap(i1);
}

GridFunction::GridFunction(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw InvalidArgument("grid function size does not match its grid");
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::max() const { return *std::max_element(values.begin(), values.end()); }
double GridFunction::min() const { return *std::min_element(values.begin(), values.end()); }

double GridFunction::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_volume();
}

double GridFunction::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double GridFunction::lp_norm(double l) const {
  if (std::isinf(l)) return max_abs();
  if (!(l >= 1.0)) throw InvalidArgument("integrability index must be >= 1");
  double s = 0.0;
  if (l == 1.0) {
    for (double v : values) s += std::abs(v);
    return s * grid.cell_volume();
  }
  if (l == 2.0) {
    for (double v : values) s += v * v;
    return std::sqrt(s * grid.cell_volume());
  }
  for (double v : values) s += std::pow(std::abs(v), l);
  return std::pow(s * grid.cell_volume(), 1.0 / l);
}

bool GridFunction::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (!(grid == o.grid)) throw InvalidArgument("grid mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  if (!(grid == o.grid)) throw InvalidArgument("grid mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (double& v : values) v *= c;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

GridFunction hadamard(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid == b.grid)) throw InvalidArgument("grid mismatch");
  GridFunction out(a.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  return out;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid == b.grid)) throw InvalidArgument("grid mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

}  // namespace stablesde
