// Acceptance run: one line per criterion, exit status 0 iff every selected
// criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <CLI11.hpp>

#include "stablesde/besov.hpp"
#include "stablesde/drift.hpp"
#include "stablesde/gate.hpp"
#include "stablesde/kernel.hpp"
#include "stablesde/pde.hpp"
#include "stablesde/random.hpp"
#include "stablesde/sde.hpp"

using namespace stablesde;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Criterion {
  int id;
  const char* title;
  double time_limit;  // seconds
  std::function<void(Outcome&)> body;
};

DriftField pde_drift() {
  DriftSpec s;
  s.gamma = 0.9;
  s.levels = 11;
  s.amplitude = 0.2;
  return mollify(build_drift(s, 1), 11, 1.5);
}

DriftField sde_drift() {
  DriftSpec s;
  s.gamma = 0.9;
  s.levels = 4;
  s.amplitude = 1.0;
  return build_drift(s, 1);
}

RegularityParams reference_params() {
  RegularityParams rp;
  rp.alpha = 1.5;
  rp.gamma = 0.9;
  return rp;
}

EulerOptions sde_options(double horizon, double step, int paths) {
  EulerOptions eo;
  eo.horizon = horizon;
  eo.step = step;
  eo.paths = paths;
  eo.seed = 1;
  return eo;
}

void kernel_exactness(Outcome& o) {
  const Grid g(1, 16.0, 1024);
  const auto k = density_grid(SpectralMeasure::isotropic(2.0, 1), 1.0, g);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.point(i)[0];
    err = std::max(err, std::abs(k.density().values[i] - std::exp(-x * x / 4.0) / std::sqrt(4.0 * kPi)));
  }
  o.require(err <= 1e-6, "gaussian sup error " + fmt(err));

  // p_1(0) = (1/pi) int_0^inf exp(-rho^alpha) d rho by double-exponential quadrature
  boost::math::quadrature::exp_sinh<double> integrator;
  const double oracle = integrator.integrate([](double r) { return std::exp(-std::pow(r, 1.5)); }) / kPi;
  const Grid wide(1, 64.0, 4096);
  const auto ks = density_grid(SpectralMeasure::isotropic(1.5, 1), 1.0, wide);
  const double value = ks.density().values[wide.index(wide.points() / 2)];
  o.require(std::abs(value - oracle) <= 1e-4, "alpha=1.5 p(0) " + fmt(value) + " vs " + fmt(oracle));
}

void kernel_bounds(Outcome& o) {
  std::vector<double> times;
  for (int j = -4; j <= 0; ++j) times.push_back(std::ldexp(1.0, j));
  const Grid grid(1, 64.0, 4096);
  for (double alpha : {1.5, 2.0}) {
    for (int order : {1, 2}) {
      const auto rep = verify_kernel_bounds(SpectralMeasure::isotropic(alpha, 1), times, order, 1.0, grid);
      o.require(std::isfinite(rep.ratio_bound) && rep.ratio_bound <= 10.0,
                "a=" + fmt(alpha) + " l=" + std::to_string(order) + " C=" + fmt(rep.ratio_bound));
      if (order == 1)
        o.require(std::abs(rep.moment_slope - rep.predicted_slope) <= 0.05,
                  "a=" + fmt(alpha) + " slope " + fmt(rep.moment_slope) + " vs " + fmt(rep.predicted_slope));
    }
  }
}

void besov_scaling(Outcome& o) {
  const Grid grid(1, kPi, 1024);
  for (double theta : {-0.5, 0.3, 0.8}) {
    double worst = 0.0, prev = 0.0;
    for (int k = 4; k <= 64; k *= 2) {
      const auto f = GridFunction::sample(grid, [&](const Vec& x) { return std::cos(k * x[0]); });
      const double t = besov_norm(f, BesovIndex{theta, kInfinity, kInfinity, 1.5, 0}).thermic;
      if (prev > 0.0) worst = std::max(worst, std::abs(t / prev / std::pow(2.0, theta) - 1.0));
      prev = t;
    }
    o.require(worst <= 0.05, "theta=" + fmt(theta) + " max rel dev " + fmt(worst));
  }
  RandomStream rng(2024);
  int holds = 0;
  for (int i = 0; i < 50; ++i) {
    const auto f = random_band_limited(grid, 16, rng);
    const auto g = random_band_limited(grid, 16, rng);
    holds += check_duality(f, g, BesovIndex{0.4, kInfinity, kInfinity, 1.5, 0}).holds() ? 1 : 0;
  }
  o.require(holds == 50, "duality " + std::to_string(holds) + "/50");
}

void product_bound(Outcome& o) {
  const Grid grid(1, kPi, 4096);
  const auto one = GridFunction::sample(grid, [](const Vec&) { return 1.0; });
  ProductBoundRequest req;
  req.gamma = 0.9;
  req.p = kInfinity;
  req.q = 1.0;  // norm in B^{1-gamma}_{1, inf}
  for (int j = 4; j <= 12; ++j) req.gaps.push_back(std::ldexp(1.0, -j));
  for (auto eta : {DerivativeTag::identity(), DerivativeTag::along(0), DerivativeTag::fractional()}) {
    const auto rep = verify_product_bound(one, SpectralMeasure::isotropic(1.5, 1), eta, req);
    o.require(std::abs(rep.fitted_exponent - rep.predicted_exponent) <= 0.1,
              eta.name() + " " + fmt(rep.fitted_exponent) + " vs " + fmt(rep.predicted_exponent));
  }
}

void pde_closed_forms(Outcome& o) {
  const auto mu = SpectralMeasure::isotropic(1.5, 1);
  const Grid grid(1, kPi, 1024);
  const double T = 0.05;
  {
    const auto s = solve_mild(PdeProblem::identity_terminal(mu, DriftField::zero(1), grid, 0.0, T, 16, 0));
    double err = 0.0;
    for (int n = 0; n < s.nodes(); ++n)
      for (std::size_t i = 0; i < grid.size(); ++i) err = std::max(err, std::abs(s.u(n, i) - grid.point(i)[0]));
    o.require(err <= 1e-8, "identity " + fmt(err));
  }
  {
    const auto s = solve_mild(PdeProblem::identity_terminal(mu, DriftField::constant(1, {0.3, 0.0}), grid, 0.0, T, 16, 0));
    double err = 0.0;
    for (int n = 0; n < s.nodes(); ++n)
      for (std::size_t i = 0; i < grid.size(); ++i)
        err = std::max(err, std::abs(s.u(n, i) - grid.point(i)[0] - 0.3 * (T - s.times[n])));
    o.require(err <= 1e-8, "constant drift " + fmt(err));
  }
  {
    PdeProblem pr(mu, DriftField::zero(1), grid);
    pr.horizon = T;
    pr.steps = 16;
    pr.source = GridFunction::sample(grid, [](const Vec&) { return 0.7; });
    const auto s = solve_mild(pr);
    double err = 0.0;
    for (int n = 0; n < s.nodes(); ++n)
      for (std::size_t i = 0; i < grid.size(); ++i) err = std::max(err, std::abs(s.u(n, i) - 0.7 * (T - s.times[n])));
    o.require(err <= 1e-8, "constant source " + fmt(err));
  }
  const Grid fine(1, kPi, 4096);
  const auto drift = pde_drift();
  o.require(check_gate(reference_params()).weak_ok, "gate");
  const auto s = solve_mild(PdeProblem::zvonkin(mu, drift, fine, T, 256, 0));
  o.require(s.contraction_factor <= 0.9, "contraction " + fmt(s.contraction_factor));
}

void schauder(Outcome& o) {
  const auto mu = SpectralMeasure::isotropic(1.5, 1);
  const Grid grid(1, kPi, 4096);
  const auto s = solve_mild(PdeProblem::zvonkin(mu, pde_drift(), grid, 0.05, 256, 0));
  const auto rep = schauder_report(s, reference_params());
  o.require(rep.space_du.measured >= 0.28, "space Du " + fmt(rep.space_du.measured));
  o.require(rep.time_u.measured >= 1.4 / 1.5 - 0.1, "time u " + fmt(rep.time_u.measured));
  o.require(rep.space_du.r_squared >= 0.9 && rep.time_u.r_squared >= 0.9,
            "r2 " + fmt(rep.space_du.r_squared) + "," + fmt(rep.time_u.r_squared));
}

void drift_increment(Outcome& o) {
  const DriftIncrementRule rule(sde_drift(), SpectralMeasure::isotropic(1.5, 1));
  std::vector<double> hs;
  for (int j = 4; j <= 10; ++j) hs.push_back(std::ldexp(1.0, -j));
  std::vector<Vec> pts;
  for (int i = 0; i < 64; ++i) pts.push_back({-kPi + 2.0 * kPi * i / 64.0, 0.0});
  const auto rep = drift_bound_report(rule, 0.0, hs, pts, reference_params());
  const double chi = 0.5 - 0.1 / 1.5;
  o.require(rep.slope >= 0.5 + chi - 0.05, "slope " + fmt(rep.slope) + " >= " + fmt(0.5 + chi - 0.05));
}

void moment_scaling_criterion(Outcome& o) {
  const DriftIncrementRule rule(sde_drift(), SpectralMeasure::isotropic(1.5, 1));
  const auto e = euler_paths(rule, sde_options(0.25, 1.0 / 1024.0, 10000));
  const auto rep = moment_scaling(e, 1.2, 0, 6, reference_params());
  const double target = 1.0 / 1.5 + 0.4 / 1.5 - 0.1;
  o.require(rep.slope >= target, "slope " + fmt(rep.slope) + " >= " + fmt(target));
}

void riemann(Outcome& o) {
  const auto mu = SpectralMeasure::isotropic(1.5, 1);
  const DriftIncrementRule rule(sde_drift(), mu);
  const auto e = euler_paths(rule, sde_options(0.25, 1.0 / 1024.0, 2000));
  const std::pair<IncrementKind, const char*> kinds[] = {
      {IncrementKind::state, "X"}, {IncrementKind::noise, "W"}, {IncrementKind::drift, "F"}};
  for (auto [kind, label] : kinds) {
    const auto r = young_riemann(e, rule, kind, Integrand::sine_of_state, 1, 5, 1.2);
    o.require(r.rate > 0.0, std::string(label) + " rate " + fmt(r.rate));
  }
  double tele = 0.0;
  for (auto kind : {IncrementKind::state, IncrementKind::noise})
    for (int level = 1; level <= 5; ++level) tele = std::max(tele, riemann_gap(e, rule, kind, Integrand::one, level, 1.2));
  const DriftIncrementRule constant(DriftField::constant(1, {0.7, 0.0}), mu);
  const auto ce = euler_paths(constant, sde_options(0.25, 1.0 / 1024.0, 200));
  for (int level = 1; level <= 5; ++level)
    tele = std::max(tele, riemann_gap(ce, constant, IncrementKind::drift, Integrand::one, level, 1.2));
  o.require(tele <= 1e-12, "telescoping " + fmt(tele));
}

void identification(Outcome& o) {
  const DriftIncrementRule rule(sde_drift(), SpectralMeasure::isotropic(1.5, 1));
  const auto e = euler_paths(rule, sde_options(0.25, 1.0 / 1024.0, 2000));
  const std::vector<int> levels = {2, 4, 6, 8};
  const auto id = drift_identification(e, rule, levels, 1.2);
  o.require(id.strictly_decreasing, "decreasing");
  o.require(id.final_ratio <= 0.1, "final/initial " + fmt(id.final_ratio));
}

void uniqueness(Outcome& o) {
  const auto mu = SpectralMeasure::isotropic(1.5, 1);
  const auto opts = sde_options(0.1, 0.1 / 1024.0, 10000);
  const auto g48 = pathwise_gap(sde_drift(), mu, 4, 8, opts);
  const auto g28 = pathwise_gap(sde_drift(), mu, 2, 8, opts);
  o.require(g48.sup_mean_gap < g28.sup_mean_gap, "gap(4,8) " + fmt(g48.sup_mean_gap) + " < gap(2,8) " + fmt(g28.sup_mean_gap));
  o.require(g48.sup_mean_gap <= 5e-2, "gap(4,8) <= 5e-2");
}

void krylov(Outcome& o) {
  const DriftIncrementRule rule(sde_drift(), SpectralMeasure::isotropic(1.5, 1));
  const auto e = euler_paths(rule, sde_options(0.25, 1.0 / 1024.0, 10000));
  std::vector<double> freqs;
  for (int k = 1; k <= 64; ++k) freqs.push_back(k);
  const auto rep = krylov_check(e, freqs, reference_params(), 5.0);
  o.require(rep.max_over_median <= 5.0, "max/median " + fmt(rep.max_over_median));
}

void gate(Outcome& o) {
  RegularityParams b;
  b.alpha = 2.0;
  const auto gb = check_gate(b);
  o.require(gb.weak_threshold == 0.5, "brownian threshold " + fmt(gb.weak_threshold));
  b.gamma = 0.5;
  const bool at = check_gate(b).weak_ok;
  b.gamma = std::nextafter(0.5, 1.0);
  const bool above = check_gate(b).weak_ok;
  o.require(!at && above, "brownian switch at 1/2");

  for (double alpha : {1.2, 1.5, 1.8}) {
    RegularityParams s;
    s.alpha = alpha;
    const double thr = (3.0 - alpha) / 2.0;
    const auto gs = check_gate(s);
    o.require(gs.weak_threshold == thr, "stable threshold a=" + fmt(alpha));
    s.gamma = thr;
    const bool s_at = check_gate(s).weak_ok;
    s.gamma = std::nextafter(thr, 1.0);
    o.require(!s_at && check_gate(s).weak_ok, "stable switch a=" + fmt(alpha));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "run these criteria only");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "kernel exactness", 5, kernel_exactness},
      {2, "kernel bounds", 30, kernel_bounds},
      {3, "besov plane-wave scaling and duality", 30, besov_scaling},
      {4, "product-bound decay exponents", 60, product_bound},
      {5, "pde closed forms and contraction", 120, pde_closed_forms},
      {6, "schauder exponents", 180, schauder},
      {7, "drift-increment bound", 60, drift_increment},
      {8, "dynamics moment scaling", 300, moment_scaling_criterion},
      {9, "riemann-sum convergence", 600, riemann},
      {10, "drift identification", 600, identification},
      {11, "pathwise uniqueness proxy", 600, uniqueness},
      {12, "krylov boundedness", 600, krylov},
      {13, "gate conformance", 5, gate},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < c.time_limit, "runtime " + fmt(secs) + " s < " + fmt(c.time_limit) + " s");
    std::printf("[%s] criterion %2d  %-38s %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.str().c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
