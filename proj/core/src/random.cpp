#include "stablesde/random.hpp"

#include <cmath>
#include <numbers>

namespace stablesde {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

double RandomStream::exponential() { return -std::log(uniform_open()); }

double RandomStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_open()));
  const double a = 2.0 * std::numbers::pi * uniform();
  cached_normal_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

double symmetric_stable(double alpha, RandomStream& rng) {
  const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
  const double w = rng.exponential();
  if (alpha == 2.0) return 2.0 * std::sin(v) * std::sqrt(w);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

double positive_stable(double beta, RandomStream& rng) {
  const double u = std::numbers::pi * rng.uniform_open();
  const double e = rng.exponential();
  const double a = std::sin(beta * u) / std::pow(std::sin(u), 1.0 / beta);
  const double b = std::pow(std::sin((1.0 - beta) * u) / e, (1.0 - beta) / beta);
  return a * b;
}

}  // namespace stablesde
