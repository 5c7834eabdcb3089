#pragma once

#include <complex>
#include <type_traits>
#include <vector>

#include "stablesde/grid.hpp"

namespace stablesde {

using Spectrum = std::vector<std::complex<double>>;

/// Discrete Fourier coefficients, normalized so that
/// f(x_j) = sum_k c_k exp(i lambda_k (x_j + L)).
Spectrum forward(const GridFunction& f);

/// Real part of the coefficient synthesis; inverse of forward().
GridFunction inverse(const Grid& grid, Spectrum coefficients);

/// Multiplies the spectrum of f by m(lambda). At Nyquist slots only the real
/// part of m is used so that the output stays real.
template <class Multiplier>
GridFunction apply_multiplier(const GridFunction& f, Multiplier&& m) {
  Spectrum c = forward(f);
  const Grid& g = f.grid;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Vec lambda = g.wavevector(k);
    if constexpr (std::is_convertible_v<std::invoke_result_t<Multiplier&, const Vec&>, double>) {
      c[k] *= static_cast<double>(m(lambda));
    } else {
      std::complex<double> v = m(lambda);
      if (g.is_nyquist(k)) v = v.real();
      c[k] *= v;
    }
  }
  return inverse(g, std::move(c));
}

/// Spectral partial derivative along an axis (Nyquist mode dropped).
GridFunction spectral_derivative(const GridFunction& f, int axis);

/// Spectral gradient, one GridFunction per axis.
std::vector<GridFunction> spectral_gradient(const GridFunction& f);

}  // namespace stablesde
