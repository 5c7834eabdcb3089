#pragma once

#include <cstddef>
#include <vector>

#include "stablesde/spectral.hpp"

namespace stablesde {

/// Periodic grid on the torus [-L, L)^d with N points per axis.
/// Point i along an axis sits at -L + i h, h = 2L / N; the index N/2 is the
/// origin. Frequencies follow FFT order: pi/L * {0, 1, ..., N/2-1, -N/2, ..., -1}.
class Grid {
 public:
  Grid(int dim, double half_width, int points);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points() const { return points_; }
  double spacing() const { return 2.0 * half_width_ / points_; }
  std::size_t size() const;
  double cell_volume() const;

  double coordinate(int i) const { return -half_width_ + i * spacing(); }
  /// Signed integer frequency index for FFT slot k.
  int signed_index(int k) const { return k < points_ / 2 ? k : k - points_; }
  double frequency(int k) const;

  /// Multi-index helpers, row-major (axis 0 slowest).
  Vec point(std::size_t flat) const;
  Vec wavevector(std::size_t flat) const;
  /// True when the slot holds a Nyquist component along some axis.
  bool is_nyquist(std::size_t flat) const;
  std::size_t index(int i0, int i1 = 0) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.points_ == b.points_ && a.half_width_ == b.half_width_;
  }

 private:
  int dim_;
  double half_width_;
  int points_;
};

/// Real scalar field sampled on a Grid.
struct GridFunction {
  Grid grid;
  std::vector<double> values;

  explicit GridFunction(const Grid& g) : grid(g), values(g.size(), 0.0) {}
  GridFunction(const Grid& g, std::vector<double> v);

  template <class F>
  static GridFunction sample(const Grid& g, F&& f) {
    GridFunction out(g);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = f(g.point(i));
    return out;
  }

  double max_abs() const;
  double max() const;
  double min() const;
  /// Grid quadrature of the integral over the fundamental domain.
  double integral() const;
  double mean() const;
  /// L^l norm by grid quadrature; l = infinity gives the grid max.
  double lp_norm(double l) const;
  bool all_finite() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double c);
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);
/// Pointwise product.
GridFunction hadamard(const GridFunction& a, const GridFunction& b);

/// Sup-norm distance.
double max_abs_diff(const GridFunction& a, const GridFunction& b);

}  // namespace stablesde
