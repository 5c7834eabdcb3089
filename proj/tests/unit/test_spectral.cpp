#include <cmath>
#include <limits>

#include "doctest.h"
#include "stablesde/errors.hpp"
#include "stablesde/random.hpp"
#include "stablesde/spectral.hpp"

using namespace stablesde;

TEST_SUITE("spectral") {
  TEST_CASE("isotropic exponent is |lambda|^alpha") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    CHECK(characteristic_exponent(mu, {2.0, 0.0}) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-14));
    const auto mu2 = SpectralMeasure::isotropic(1.3, 2);
    CHECK(characteristic_exponent(mu2, {3.0, 4.0}) == doctest::Approx(std::pow(5.0, 1.3)).epsilon(1e-12));
  }

  TEST_CASE("cylindrical exponent sums the axes") {
    const auto mu = SpectralMeasure::cylindrical(1.5, {0.5, 0.5});
    CHECK(characteristic_exponent(mu, {1.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(characteristic_exponent(mu, {-2.0, 0.5}) ==
          doctest::Approx(std::pow(2.0, 1.5) + std::pow(0.5, 1.5)).epsilon(1e-14));
  }

  TEST_CASE("atomic exponent matches the direct sum") {
    const double s = std::sqrt(0.5);
    const auto mu = SpectralMeasure::atomic(1.7, 2, {{{s, s}, 0.3}, {{-s, -s}, 0.3}, {{1.0, 0.0}, 0.2}, {{-1.0, 0.0}, 0.2}});
    const Vec l{0.7, -1.9};
    const double expect = 0.6 * std::pow(std::abs(s * 0.7 - s * 1.9), 1.7) + 0.4 * std::pow(0.7, 1.7);
    CHECK(characteristic_exponent(mu, l) == doctest::Approx(expect).epsilon(1e-13));
  }

  TEST_CASE("exponent vanishes at the origin") {
    CHECK(characteristic_exponent(SpectralMeasure::isotropic(1.5, 2), {0.0, 0.0}) == 0.0);
    CHECK(characteristic_exponent(SpectralMeasure::cylindrical(1.2, {1.0, 3.0}), {0.0, 0.0}) == 0.0);
    CHECK(characteristic_exponent(SpectralMeasure::atomic(2.0, 1, {{{1.0, 0.0}, 1.0}, {{-1.0, 0.0}, 1.0}}), {0.0, 0.0}) ==
          0.0);
  }

  TEST_CASE("non-finite frequencies are rejected") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    CHECK_THROWS_AS(characteristic_exponent(mu, {std::numeric_limits<double>::quiet_NaN(), 0.0}), InvalidArgument);
    CHECK_THROWS_AS(characteristic_exponent(mu, {std::numeric_limits<double>::infinity(), 0.0}), InvalidArgument);
  }

  TEST_CASE("invalid measures are rejected") {
    CHECK_THROWS_AS(SpectralMeasure::isotropic(1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(SpectralMeasure::isotropic(2.1, 2), InvalidArgument);
    CHECK_THROWS_AS(SpectralMeasure::cylindrical(1.5, {1.0, 0.0}), InvalidArgument);
    // not closed under xi -> -xi
    CHECK_THROWS_AS(SpectralMeasure::atomic(1.5, 2, {{{1.0, 0.0}, 1.0}}), InvalidArgument);
  }

  TEST_CASE("scaling and symmetry on random arguments") {
    RandomStream rng(7);
    const SpectralMeasure measures[] = {
        SpectralMeasure::isotropic(1.5, 2), SpectralMeasure::cylindrical(1.8, {0.3, 1.1}),
        SpectralMeasure::atomic(1.2, 2, {{{0.6, 0.8}, 0.5}, {{-0.6, -0.8}, 0.5}, {{0.0, 1.0}, 1.5}, {{0.0, -1.0}, 1.5}})};
    for (const auto& mu : measures) {
      for (int i = 0; i < 100; ++i) {
        const Vec l{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
        const double c = 6.0 * rng.uniform() - 3.0;
        const double base = mu.exponent(l);
        const double scaled = mu.exponent(c * l);
        const double ref = std::pow(std::abs(c), mu.alpha()) * base;
        CHECK(std::abs(scaled - ref) <= 1e-12 * ref + 1e-300);
        CHECK(mu.exponent(-1.0 * l) == base);
      }
    }
  }

  TEST_CASE("nondegeneracy constants") {
    CHECK(nondegeneracy_constants(SpectralMeasure::isotropic(1.5, 2)).kappa == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nondegeneracy_constants(SpectralMeasure::isotropic(1.5, 1)).kappa == doctest::Approx(1.0).epsilon(1e-12));
    const auto cyl = nondegeneracy_constants(SpectralMeasure::cylindrical(1.5, {0.5, 0.5}));
    CHECK(cyl.kappa == doctest::Approx(std::pow(2.0, 1.0 - 0.75)).epsilon(1e-6));
    CHECK(nondegeneracy_constants(SpectralMeasure::cylindrical(1.5, {0.5})).kappa == doctest::Approx(1.0));
  }

  TEST_CASE("kappa brackets the exponent on the sphere") {
    const auto mu = SpectralMeasure::cylindrical(1.3, {0.2, 0.9});
    const double kappa = nondegeneracy_constants(mu, 4096).kappa;
    CHECK(kappa >= 1.0);
    for (int i = 0; i < 997; ++i) {
      const double a = 2.0 * M_PI * i / 997.0;
      const double psi = mu.exponent({std::cos(a), std::sin(a)});
      CHECK(psi >= 1.0 / kappa * (1.0 - 1e-5));
      CHECK(psi <= kappa * (1.0 + 1e-5));
    }
  }

  TEST_CASE("degenerate measure is signalled") {
    // all mass along one axis in d = 2
    const auto mu = SpectralMeasure::atomic(1.5, 2, {{{1.0, 0.0}, 1.0}, {{-1.0, 0.0}, 1.0}});
    CHECK_THROWS_AS(nondegeneracy_constants(mu), DegenerateMeasure);
  }
}
