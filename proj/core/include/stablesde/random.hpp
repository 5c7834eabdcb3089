#pragma once

#include <cstdint>
#include <random>

namespace stablesde {

/// SplitMix64 step; used to derive independent substream seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Reproducible random stream. Variates are built from raw 64-bit engine
/// output so sequences do not depend on the standard library's
/// distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  double exponential();
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// Symmetric alpha-stable variate with E exp(i l X) = exp(-|l|^alpha)
/// (Chambers-Mallows-Stuck).
double symmetric_stable(double alpha, RandomStream& rng);

/// Positive beta-stable variate, beta in (0, 1), with
/// E exp(-s S) = exp(-s^beta) (Kanter's representation).
double positive_stable(double beta, RandomStream& rng);

}  // namespace stablesde
