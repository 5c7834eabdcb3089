#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "stablesde/besov.hpp"
#include "stablesde/drift.hpp"
#include "stablesde/kernel.hpp"
#include "stablesde/pde.hpp"
#include "stablesde/random.hpp"
#include "stablesde/sde.hpp"

using namespace stablesde;

static void BM_DensityGrid(benchmark::State& state) {
  const Grid grid(1, 64.0, static_cast<int>(state.range(0)));
  const auto mu = SpectralMeasure::isotropic(1.5, 1);
  for (auto _ : state) benchmark::DoNotOptimize(density_grid(mu, 1.0, grid).density().values.data());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DensityGrid)->RangeMultiplier(4)->Range(1024, 16384)->Complexity();

static void BM_DensityGrid2D(benchmark::State& state) {
  const Grid grid(2, 8.0, static_cast<int>(state.range(0)));
  const auto mu = SpectralMeasure::isotropic(1.5, 2);
  for (auto _ : state) benchmark::DoNotOptimize(density_grid(mu, 1.0, grid).density().values.data());
}
BENCHMARK(BM_DensityGrid2D)->Arg(64)->Arg(128)->Arg(256);

static void BM_BesovNorm(benchmark::State& state) {
  const Grid grid(1, std::numbers::pi, static_cast<int>(state.range(0)));
  const auto f = GridFunction::sample(grid, [](const Vec& x) { return std::cos(16 * x[0]) + 0.3 * std::sin(3 * x[0]); });
  const BesovIndex idx{0.3, kInfinity, kInfinity, 1.5, 0};
  for (auto _ : state) benchmark::DoNotOptimize(besov_norm(f, idx).total());
}
BENCHMARK(BM_BesovNorm)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_PicardSolve(benchmark::State& state) {
  const Grid grid(1, std::numbers::pi, static_cast<int>(state.range(0)));
  const auto mu = SpectralMeasure::isotropic(1.5, 1);
  DriftSpec spec;
  spec.levels = 8;
  spec.amplitude = 0.2;
  const auto drift = mollify(build_drift(spec, 7), 8, 1.5);
  const auto problem = PdeProblem::zvonkin(mu, drift, grid, 0.05, 128, 0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_mild(problem).iterations);
}
BENCHMARK(BM_PicardSolve)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

static void BM_EulerPaths(benchmark::State& state) {
  const auto mu = SpectralMeasure::isotropic(1.5, 1);
  DriftSpec spec;
  spec.levels = 4;
  const DriftIncrementRule rule(build_drift(spec, 7), mu);
  EulerOptions eo;
  eo.paths = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(euler_paths(rule, eo).noise.data());
  state.SetItemsProcessed(state.iterations() * state.range(0) * 256);
}
BENCHMARK(BM_EulerPaths)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_StableDraw(benchmark::State& state) {
  RandomStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_stable(1.5, rng));
}
BENCHMARK(BM_StableDraw);

BENCHMARK_MAIN();
