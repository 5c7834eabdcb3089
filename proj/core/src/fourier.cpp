#include "stablesde/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "stablesde/errors.hpp"

namespace stablesde {
namespace {

// fftw_execute_dft is thread-safe, planning is not; plans are cached per
// (dim, N, sign) and created under a lock.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t total = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
    std::vector<std::complex<double>> a(total), b(total);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = dim == 1 ? fftw_plan_dft_1d(n, in, out, sign, flags) : fftw_plan_dft_2d(n, n, in, out, sign, flags);
    if (p == nullptr) throw Error("FFTW planning failed");
    plans_.emplace(key, p);
    return p;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, p] : plans_) fftw_destroy_plan(p);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const Grid& g, int sign, std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out) {
  fftw_plan p = PlanCache::instance().get(g.dim(), g.points(), sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

Spectrum forward(const GridFunction& f) {
  const Grid& g = f.grid;
  std::vector<std::complex<double>> in(f.values.begin(), f.values.end());
  Spectrum out(in.size());
  execute(g, FFTW_FORWARD, in, out);
  const double scale = 1.0 / static_cast<double>(in.size());
  for (auto& c : out) c *= scale;
  return out;
}

GridFunction inverse(const Grid& grid, Spectrum coefficients) {
  if (coefficients.size() != grid.size()) throw InvalidArgument("spectrum size does not match grid");
  Spectrum out(coefficients.size());
  execute(grid, FFTW_BACKWARD, coefficients, out);
  GridFunction f(grid);
  for (std::size_t i = 0; i < out.size(); ++i) f.values[i] = out[i].real();
  return f;
}

GridFunction spectral_derivative(const GridFunction& f, int axis) {
  if (axis < 0 || axis >= f.grid.dim()) throw InvalidArgument("derivative axis out of range");
  const Grid& g = f.grid;
  Spectrum c = forward(f);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Vec lambda = g.wavevector(k);
    const bool nyquist_on_axis =
        g.dim() == 1 ? g.is_nyquist(k)
                     : (axis == 0 ? k / g.points() == static_cast<std::size_t>(g.points() / 2)
                                  : k % g.points() == static_cast<std::size_t>(g.points() / 2));
    c[k] *= nyquist_on_axis ? std::complex<double>(0.0) : std::complex<double>(0.0, lambda[axis]);
  }
  return inverse(g, std::move(c));
}

std::vector<GridFunction> spectral_gradient(const GridFunction& f) {
  std::vector<GridFunction> out;
  out.reserve(f.grid.dim());
  for (int a = 0; a < f.grid.dim(); ++a) out.push_back(spectral_derivative(f, a));
  return out;
}

}  // namespace stablesde
