#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "stablesde/drift.hpp"
#include "stablesde/errors.hpp"
#include "stablesde/fourier.hpp"
#include "stablesde/pde.hpp"
#include "stablesde/stats.hpp"

using namespace stablesde;

namespace {

const double kPi = std::numbers::pi;

DriftField smooth_drift(int levels, double amplitude, int m, double alpha = 1.5) {
  DriftSpec s;
  s.gamma = 0.9;
  s.levels = levels;
  s.amplitude = amplitude;
  return mollify(build_drift(s, 4), m, alpha);
}

double sup_u_error(const MildSolution& s, const Grid& g, double (*ref)(double t, double x)) {
  double err = 0.0;
  for (int n = 0; n < s.nodes(); ++n)
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(s.u(n, i) - ref(s.times[n], g.point(i)[0])));
  return err;
}

}  // namespace

TEST_SUITE("pde") {
  TEST_CASE("semigroup action") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const Grid g(1, kPi, 256);
    const auto f = GridFunction::sample(g, [](const Vec& x) { return 0.4 + std::cos(3.0 * x[0]) - 2.0 * std::sin(x[0]); });
    CHECK(max_abs_diff(semigroup_apply(mu, 0.0, f), f) <= 1e-14);
    const double t = 0.3;
    const auto pf = semigroup_apply(mu, t, f);
    const auto ref = GridFunction::sample(g, [&](const Vec& x) {
      return 0.4 + std::exp(-t * std::pow(3.0, 1.5)) * std::cos(3.0 * x[0]) - 2.0 * std::exp(-t) * std::sin(x[0]);
    });
    CHECK(max_abs_diff(pf, ref) <= 1e-13);
    CHECK(pf.mean() == doctest::Approx(f.mean()).epsilon(1e-13));
    CHECK_THROWS_AS(semigroup_apply(mu, -1.0, f), InvalidArgument);
  }

  TEST_CASE("exponential trapezoid weights") {
    const double dt = 0.1, psi = 7.0;
    const auto [w0, w1] = exponential_trapezoid_weights(dt, psi);
    CHECK(w0 + w1 == doctest::Approx((1.0 - std::exp(-dt * psi)) / psi).epsilon(1e-14));
    // int_0^dt exp(-s psi) s / dt ds
    const double lin = (1.0 - std::exp(-dt * psi) * (1.0 + dt * psi)) / (psi * psi * dt);
    CHECK(w1 == doctest::Approx(lin).epsilon(1e-12));
    const auto [z0, z1] = exponential_trapezoid_weights(dt, 0.0);
    CHECK(z0 == doctest::Approx(dt / 2));
    CHECK(z1 == doctest::Approx(dt / 2));
    // tiny psi stays accurate
    const auto [s0, s1] = exponential_trapezoid_weights(dt, 1e-9);
    CHECK(s0 + s1 == doctest::Approx(dt).epsilon(1e-9));
  }

  TEST_CASE("Green operator on time-constant integrands") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const Grid g(1, kPi, 256);
    const double T = 0.2, k = 5.0;
    const int nodes = 17;
    const auto c = GridFunction::sample(g, [](const Vec&) { return 1.3; });
    const auto out = green_apply(mu, std::vector<GridFunction>(nodes, c), T);
    const auto wave = GridFunction::sample(g, [k](const Vec& x) { return std::cos(k * x[0]); });
    const auto outw = green_apply(mu, std::vector<GridFunction>(nodes, wave), T);
    const auto zero = green_apply(mu, std::vector<GridFunction>(nodes, GridFunction(g)), T);
    const double psi = std::pow(k, 1.5);
    for (int i = 0; i < nodes; ++i) {
      const double rest = T - i * T / (nodes - 1);
      for (std::size_t j = 0; j < g.size(); j += 17) {
        CHECK(out[i].values[j] == doctest::Approx(1.3 * rest).epsilon(1e-12));
        CHECK(std::abs(outw[i].values[j] - wave.values[j] * (1.0 - std::exp(-rest * psi)) / psi) <= 1e-13);
      }
      CHECK(zero[i].max_abs() == 0.0);
    }
  }

  TEST_CASE("closed-form solutions") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const Grid g(1, kPi, 512);
    const double T = 0.05;
    const auto id = solve_mild(PdeProblem::identity_terminal(mu, DriftField::zero(1), g, 0.0, T, 16, 0));
    CHECK(sup_u_error(id, g, [](double, double x) { return x; }) <= 1e-12);

    const auto tr = solve_mild(PdeProblem::identity_terminal(mu, DriftField::constant(1, {0.3, 0.0}), g, 0.0, T, 16, 0));
    CHECK(sup_u_error(tr, g, [](double t, double x) { return x + 0.3 * (0.05 - t); }) <= 1e-8);

    PdeProblem pr(mu, DriftField::zero(1), g);
    pr.horizon = T;
    pr.steps = 16;
    pr.source = GridFunction::sample(g, [](const Vec&) { return 0.7; });
    const auto src = solve_mild(pr);
    CHECK(sup_u_error(src, g, [](double t, double) { return 0.7 * (0.05 - t); }) <= 1e-12);
  }

  TEST_CASE("gate and mollification preconditions") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const Grid g(1, kPi, 512);
    DriftSpec s;
    s.gamma = 0.5;
    s.levels = 4;
    const auto rough = mollify(build_drift(s, 1), 6, 1.5);
    CHECK_THROWS_AS(solve_mild(PdeProblem::zvonkin(mu, rough, g, 0.05, 16, 0)), InvalidArgument);
    auto ok = PdeProblem::zvonkin(mu, rough, g, 0.05, 16, 0);
    ok.override_gate = true;
    CHECK_NOTHROW(solve_mild(ok));
    s.gamma = 0.9;
    CHECK_THROWS_AS(solve_mild(PdeProblem::zvonkin(mu, build_drift(s, 1), g, 0.05, 16, 0)), InvalidArgument);
  }

  TEST_CASE("strong drift over a long horizon does not contract") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const Grid g(1, kPi, 256);
    auto pr = PdeProblem::zvonkin(mu, smooth_drift(5, 40.0, 4), g, 1.0, 32, 0);
    SolverOptions o;
    o.max_iter = 30;
    CHECK_THROWS_AS(solve_mild(pr, o), NonContraction);
  }

  TEST_CASE("fixed point, contraction and gradient bound") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const Grid g(1, kPi, 1024);
    const auto pr = PdeProblem::zvonkin(mu, smooth_drift(8, 0.2, 8), g, 0.05, 64, 0);
    SolverOptions o;
    o.tol = 1e-9;
    const auto s = solve_mild(pr, o);
    CHECK(s.residual <= o.tol);
    CHECK(duhamel_residual(pr, s) <= 2.0 * o.tol);
    CHECK(s.contraction_factor <= 0.9);
    for (std::size_t i = 1; i + 1 < s.increments.size(); ++i) CHECK(s.increments[i] < s.increments[i - 1]);
    CHECK(s.gradient_sup() <= 0.25);
    const std::vector<MildSolution> comps{s};
    const auto z = zvonkin_transform(comps);
    CHECK(z.min_jacobian >= 0.75 - 1e-12);
    CHECK(z.invertible);
  }

  TEST_CASE("spectral gradient against centred differences") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const auto drift = smooth_drift(6, 0.3, 6);
    std::vector<double> hs, errs;
    for (int n : {512, 1024, 2048, 4096}) {
      const Grid g(1, kPi, n);
      const auto s = solve_mild(PdeProblem::zvonkin(mu, drift, g, 0.05, 16, 0));
      const auto& w = s.w[0].values;
      double err = 0.0;
      for (int i = 0; i < n; ++i) {
        const double fd = (w[(i + 1) % n] - w[(i + n - 1) % n]) / (2.0 * g.spacing());
        err = std::max(err, std::abs(fd - s.du[0][0].values[i]));
      }
      hs.push_back(g.spacing());
      errs.push_back(err);
    }
    CHECK(std::abs(fit_log_log(hs, errs).slope - 2.0) <= 0.2);
  }

  TEST_CASE("solutions stabilise as the mollification is removed") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const Grid g(1, kPi, 1024);
    DriftSpec s;
    s.gamma = 0.9;
    s.levels = 8;
    s.amplitude = 0.2;
    const auto raw = build_drift(s, 2);
    auto solve = [&](int m) { return solve_mild(PdeProblem::zvonkin(mu, mollify(raw, m, 1.5), g, 0.05, 32, 0)); };
    // ||u_m - u_{2m}||; at m = 1 both mollifiers flatten most levels
    std::vector<double> gaps;
    for (int m = 2; m <= 5; ++m) gaps.push_back(max_abs_diff(solve(m).w[0], solve(2 * m).w[0]));
    for (std::size_t i = 1; i < gaps.size(); ++i) CHECK(gaps[i] < gaps[i - 1]);
  }

  TEST_CASE("Zvonkin map of the zero solution is the identity") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const Grid g(1, kPi, 256);
    const auto s = solve_mild(PdeProblem::zvonkin(mu, DriftField::zero(1), g, 0.05, 8, 0));
    const std::vector<MildSolution> comps{s};
    const auto z = zvonkin_transform(comps);
    CHECK(z.min_jacobian == 1.0);
    CHECK(z.gradient_sup == 0.0);
    for (std::size_t i = 0; i < g.size(); i += 31) CHECK(zvonkin_map(comps, 0, i)[0] == g.point(i)[0]);
  }

  TEST_CASE("two-dimensional Zvonkin corrector") {
    const auto mu = SpectralMeasure::cylindrical(1.5, {0.5, 0.5});
    const Grid g(2, kPi, 64);
    DriftSpec s;
    s.dim = 2;
    s.gamma = 0.9;
    s.levels = 4;
    s.amplitude = 0.2;
    const auto f = mollify(build_drift(s, 8), 4, 1.5);
    std::vector<MildSolution> comps;
    for (int c = 0; c < 2; ++c) comps.push_back(solve_mild(PdeProblem::zvonkin(mu, f, g, 0.05, 16, c)));
    const auto z = zvonkin_transform(comps);
    CHECK(z.gradient_sup <= 0.25);
    CHECK(z.min_jacobian >= 0.5625);
  }

  TEST_CASE("smooth data saturates the spatial Holder fit") {
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const Grid g(1, kPi, 1024);
    PdeProblem pr(mu, DriftField::zero(1), g);
    pr.horizon = 0.05;
    pr.steps = 64;
    pr.source = GridFunction::sample(g, [](const Vec& x) { return std::cos(3.0 * x[0]); });
    const auto s = solve_mild(pr);
    RegularityParams rp;
    const auto rep = schauder_report(s, rp);
    CHECK(rep.space_du.measured >= 0.95);
    CHECK(rep.space_du.predicted == doctest::Approx(rp.theta() - 1.0 - rp.epsilon));
    CHECK(rep.time_u.predicted == doctest::Approx(rp.theta() / 1.5));
  }

  TEST_CASE("Schauder targets") {
    RegularityParams rp;
    rp.alpha = 2.0;
    rp.gamma = 0.8;
    CHECK(rp.theta() - 1.0 - rp.epsilon == doctest::Approx(0.8 - 0.02));
    rp.alpha = 1.5;
    rp.gamma = 0.9;
    CHECK(rp.theta() / rp.alpha == doctest::Approx(1.4 / 1.5));
  }

  TEST_CASE("pointwise gradient of the Green operator") {
    // growth exponent 2 - gamma - alpha changes sign at gamma = 2 - alpha
    const auto mu = SpectralMeasure::isotropic(1.5, 1);
    const Grid g(1, kPi, 2048);
    const auto below = green_gradient_scan(mu, 0.4, 1.0, g, 4, 9);
    const auto above = green_gradient_scan(mu, 0.6, 1.0, g, 4, 9);
    CHECK_FALSE(below.exists);
    CHECK(above.exists);
    CHECK(below.fitted_exponent == doctest::Approx(0.1).epsilon(0.3));
    CHECK(above.fitted_exponent == doctest::Approx(-0.1).epsilon(0.3));
  }
}
