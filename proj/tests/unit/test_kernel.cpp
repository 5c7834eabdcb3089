#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "stablesde/errors.hpp"
#include "stablesde/fourier.hpp"
#include "stablesde/kernel.hpp"
#include "stablesde/random.hpp"
#include "stablesde/stats.hpp"

using namespace stablesde;

namespace {

const double kPi = std::numbers::pi;

double gaussian(double y) { return std::exp(-y * y / 4.0) / (2.0 * std::sqrt(kPi)); }

// |mean cos(l . X) - exp(-t psi(l))| in units of the Monte Carlo standard error.
double cf_deviation(const SpectralMeasure& mu, double t, const Vec& l, int draws, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<double> c(draws);
  for (int i = 0; i < draws; ++i) c[i] = std::cos(dot(l, sample_increment(mu, t, rng)));
  const double se = sample_stddev(c) / std::sqrt(static_cast<double>(draws));
  return std::abs(mean(c) - std::exp(-t * mu.exponent(l))) / se;
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("layout puts the origin at index N/2") {
    const Grid g(1, 4.0, 64);
    CHECK(g.coordinate(32) == 0.0);
    CHECK(g.spacing() == doctest::Approx(0.125));
    CHECK(g.frequency(1) == doctest::Approx(kPi / 4.0));
    CHECK(g.signed_index(63) == -1);
    CHECK(g.size() == 64u);
    CHECK(Grid(2, 1.0, 64).size() == 4096u);
  }

  TEST_CASE("Fourier round trip") {
    RandomStream rng(3);
    for (int dim : {1, 2}) {
      const Grid g(dim, 2.5, 64);
      GridFunction f(g);
      for (auto& v : f.values) v = rng.normal();
      const GridFunction back = inverse(g, forward(f));
      CHECK(max_abs_diff(f, back) <= 1e-10 * f.max_abs());
    }
  }

  TEST_CASE("spectral derivative of a plane wave") {
    const Grid g(1, kPi, 128);
    const auto f = GridFunction::sample(g, [](const Vec& x) { return std::sin(3.0 * x[0]) + std::cos(5.0 * x[0]); });
    const auto df = spectral_derivative(f, 0);
    const auto ref =
        GridFunction::sample(g, [](const Vec& x) { return 3.0 * std::cos(3.0 * x[0]) - 5.0 * std::sin(5.0 * x[0]); });
    CHECK(max_abs_diff(df, ref) <= 1e-11);

    const Grid g2(2, kPi, 64);
    const auto h = GridFunction::sample(g2, [](const Vec& x) { return std::sin(x[0]) * std::cos(2.0 * x[1]); });
    const auto grad = spectral_gradient(h);
    const auto dy = GridFunction::sample(g2, [](const Vec& x) { return -2.0 * std::sin(x[0]) * std::sin(2.0 * x[1]); });
    CHECK(max_abs_diff(grad[1], dy) <= 1e-11);
  }

  TEST_CASE("quadrature and norms") {
    const Grid g(1, kPi, 256);
    const auto f = GridFunction::sample(g, [](const Vec& x) { return std::cos(x[0]); });
    CHECK(f.integral() == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    CHECK(f.lp_norm(2.0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
    CHECK(f.lp_norm(std::numeric_limits<double>::infinity()) == doctest::Approx(1.0));
  }
}

TEST_SUITE("random") {
  TEST_CASE("reproducible streams") {
    RandomStream a(11, 4), b(11, 4), c(11, 5);
    CHECK(a.next() == b.next());
    CHECK(a.next() != c.next());
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  }

  TEST_CASE("Gaussian increment has variance 2t") {
    const auto mu = SpectralMeasure::isotropic(2.0, 1);
    RandomStream rng(5);
    const int n = 100000;
    std::vector<double> x(n);
    for (auto& v : x) v = sample_increment(mu, 1.0, rng)[0];
    const double var = sample_stddev(x) * sample_stddev(x);
    // sd of the sample variance of N(0, 2) is sqrt(8 / n)
    CHECK(std::abs(var - 2.0) <= 3.0 * std::sqrt(8.0 / n));
  }

  TEST_CASE("symmetric stable characteristic function") {
    for (double alpha : {1.2, 1.5, 1.9}) {
      RandomStream rng(17);
      const int n = 100000;
      for (double l : {0.5, 1.0, 2.0}) {
        std::vector<double> c(n);
        for (auto& v : c) v = std::cos(l * symmetric_stable(alpha, rng));
        const double se = sample_stddev(c) / std::sqrt(double(n));
        CHECK(std::abs(mean(c) - std::exp(-std::pow(l, alpha))) <= 3.0 * se);
      }
    }
  }

  TEST_CASE("positive stable Laplace transform") {
    const double beta = 0.75;
    RandomStream rng(23);
    const int n = 100000;
    std::vector<double> s(n);
    for (auto& v : s) v = positive_stable(beta, rng);
    for (double u : {0.5, 1.0, 2.0}) {
      std::vector<double> e(n);
      for (int i = 0; i < n; ++i) e[i] = std::exp(-u * s[i]);
      const double se = sample_stddev(e) / std::sqrt(double(n));
      CHECK(std::abs(mean(e) - std::exp(-std::pow(u, beta))) <= 3.0 * se);
    }
  }

  TEST_CASE("isotropic increments match the characteristic function") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    for (double l : {0.5, 1.0, 2.0}) CHECK(cf_deviation(mu, 1.0, {l, 0.0}, 100000, 31) <= 3.0);
    const auto mu2 = SpectralMeasure::isotropic(1.5, 2);
    for (Vec l : {Vec{0.5, 0.0}, Vec{0.0, 1.0}, Vec{0.7, 0.7}, Vec{-1.0, 2.0}})
      CHECK(cf_deviation(mu2, 0.5, l, 100000, 37) <= 3.0);
  }

  TEST_CASE("cylindrical and atomic increments match the characteristic function") {
    const auto cyl = SpectralMeasure::cylindrical(1.5, {0.5, 0.5});
    for (Vec l : {Vec{0.5, 0.0}, Vec{1.0, 1.0}, Vec{-2.0, 0.5}}) CHECK(cf_deviation(cyl, 1.0, l, 100000, 41) <= 3.0);
    const double s = std::sqrt(0.5);
    const auto atoms = SpectralMeasure::atomic(1.3, 2, {{{s, s}, 0.4}, {{-s, -s}, 0.4}, {{0.0, 1.0}, 0.3}, {{0.0, -1.0}, 0.3}});
    for (Vec l : {Vec{1.0, 0.0}, Vec{0.3, -1.2}}) CHECK(cf_deviation(atoms, 0.7, l, 100000, 43) <= 3.0);
  }

  TEST_CASE("cylindrical coordinates are independent") {
    const auto mu = SpectralMeasure::cylindrical(1.5, {0.5, 0.5});
    RandomStream rng(47);
    const int n = 100000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec w = sample_increment(mu, 1.0, rng);
      s += (w[0] > 0 ? 1.0 : -1.0) * (w[1] > 0 ? 1.0 : -1.0);
    }
    // product of independent fair signs: mean 0, sd 1 / sqrt(n)
    CHECK(std::abs(s / n) <= 3.0 / std::sqrt(double(n)));
  }
}

TEST_SUITE("kernel") {
  TEST_CASE("Gaussian density at the origin") {
    const auto k = density_grid(SpectralMeasure::isotropic(2.0, 1), 1.0, Grid(1, 16.0, 1024));
    CHECK(k.density().values[512] == doctest::Approx(1.0 / (2.0 * std::sqrt(kPi))).epsilon(1e-12));
  }

  TEST_CASE("stable density at the origin") {
    // p(1, 0) = (1 / pi) int_0^inf exp(-l^alpha) dl
    const double alpha = 1.5;
    const auto k = density_grid(SpectralMeasure::isotropic(alpha, 1), 1.0, Grid(1, 64.0, 4096));
    CHECK(k.density().values[2048] == doctest::Approx(std::tgamma(1.0 + 1.0 / alpha) / kPi).epsilon(1e-4));
  }

  TEST_CASE("self-similarity") {
    // p(t, y) = t^{-1/alpha} p(1, t^{-1/alpha} y); with t^{1/alpha} = 2 the torus of
    // twice the width carries the rescaled density exactly.
    const double alpha = 1.5;
    const auto mu = SpectralMeasure::isotropic(alpha, 1);
    const auto p1 = density_grid(mu, 1.0, Grid(1, 32.0, 2048)).density();
    const auto pt = density_grid(mu, std::pow(2.0, alpha), Grid(1, 64.0, 2048)).density();
    for (int i = 974; i < 1074; ++i) {
      CHECK(pt.values[i] == doctest::Approx(0.5 * p1.values[i]).epsilon(1e-6));
    }
  }

  TEST_CASE("semigroup property under grid convolution") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const Grid g(1, 16.0, 1024);
    const auto a = density_grid(mu, 0.3, g).density();
    const auto b = density_grid(mu, 0.5, g).density();
    const auto c = density_grid(mu, 0.8, g).density();
    const int n = g.points();
    double err = 0.0;
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += a.values[i] * b.values[((j - i + n / 2) % n + n) % n];
      err = std::max(err, std::abs(s * g.spacing() - c.values[j]));
    }
    CHECK(err <= 1e-8);
  }

  TEST_CASE("symmetry and mass") {
    for (double alpha : {1.2, 1.5, 2.0}) {
      const auto mu = SpectralMeasure::isotropic(alpha, 1);
      for (double t : {0.1, 0.5, 1.0}) {
        const auto k = density_grid(mu, t, Grid(1, 64.0, 4096));
        const auto& p = k.density().values;
        double asym = 0.0;
        for (int i = 1; i < 2048; ++i) asym = std::max(asym, std::abs(p[2048 + i] - p[2048 - i]));
        CHECK(asym <= 1e-14);
        CHECK(std::abs(k.density().integral() - 1.0) <= 1e-6);
        CHECK(k.diagnostics().negativity <= 1e-6);
      }
    }
    const auto k2 = density_grid(SpectralMeasure::cylindrical(1.5, {0.5, 1.0}), 0.5, Grid(2, 32.0, 256));
    CHECK(std::abs(k2.density().integral() - 1.0) <= 1e-6);
  }

  TEST_CASE("derivatives of the Gaussian density") {
    const Grid g(1, 16.0, 1024);
    const auto k = density_grid(SpectralMeasure::isotropic(2.0, 1), 1.0, g);
    CHECK(max_abs_diff(multiplier_derivative(k, DerivativeTag::identity()), k.density()) == 0.0);

    const auto dp = multiplier_derivative(k, DerivativeTag::along(0));
    const auto ref = GridFunction::sample(g, [](const Vec& y) { return -0.5 * y[0] * gaussian(y[0]); });
    CHECK(max_abs_diff(dp, ref) <= 1e-6);
    CHECK(std::abs(dp.values[512]) <= 1e-15);

    // |lambda|^2 is -d^2/dy^2
    const auto lap = multiplier_derivative(k, DerivativeTag::fractional());
    const auto ref2 =
        GridFunction::sample(g, [](const Vec& y) { return (0.5 - 0.25 * y[0] * y[0]) * gaussian(y[0]); });
    CHECK(max_abs_diff(lap, ref2) <= 1e-6);
  }

  TEST_CASE("derivative orders") {
    CHECK(DerivativeTag::identity().order(1.5) == 0.0);
    CHECK(DerivativeTag::along(1).order(1.5) == 1.0);
    CHECK(DerivativeTag::fractional().order(1.5) == 1.5);
  }

  TEST_CASE("under-resolved grid is signalled") {
    CHECK_THROWS_AS(density_grid(SpectralMeasure::isotropic(1.5, 1), 1e-4, Grid(1, kPi, 64)), UnderResolvedGrid);
  }

  TEST_CASE("default half-width grows with time") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const double a = default_half_width(mu, 0.1);
    const double b = default_half_width(mu, 1.0);
    CHECK(a > 0.0);
    CHECK(b > a);
  }

  TEST_CASE("kernel bounds") {
    const std::vector<double> times{0.25, 0.5, 1.0};
    const auto gauss = verify_kernel_bounds(SpectralMeasure::isotropic(2.0, 1), times, 1, 0.0, Grid(1, 64.0, 4096));
    CHECK(gauss.ratio_bound <= 5.0);
    CHECK(gauss.moment_slope == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    CHECK(gauss.pass());

    const std::vector<double> times2{0.0625, 0.125, 0.25, 0.5, 1.0};
    const auto st = verify_kernel_bounds(SpectralMeasure::isotropic(1.5, 1), times2, 1, 1.0, Grid(1, 64.0, 4096));
    CHECK(std::abs(st.moment_slope - 1.0 / 1.5) <= 0.05);
    CHECK(std::isfinite(st.ratio_bound));
  }
}
