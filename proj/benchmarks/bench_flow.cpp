#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "infocons/coarse.hpp"
#include "infocons/entropy.hpp"
#include "infocons/flow.hpp"

using namespace infocons;

namespace {

DensityOfStates von_mises_mu() {
  return DensityOfStates([](std::span<const double> x, double) {
    return std::exp(std::cos(2.0 * std::numbers::pi * x[0]) + std::cos(2.0 * std::numbers::pi * x[1]));
  });
}

}  // namespace

static void BM_FlowMap(benchmark::State& state) {
  const auto torus = StateSpace::unit_box(2, Boundary::periodic);
  const auto v = stream_field(von_mises_mu(), streams::cellular(0.25));
  StepControl c;
  c.step = 1e-2;
  const std::vector<double> x0{0.3, 0.6};
  for (auto _ : state) benchmark::DoNotOptimize(flow_map(v, torus, x0, 0.0, 1.0, c));
}
BENCHMARK(BM_FlowMap);

static void BM_EvolveDensity(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto torus = StateSpace::unit_box(2, Boundary::periodic);
  const Grid g(torus, {n, n});
  const auto mu = von_mises_mu();
  const auto rho0 = GridDensity::from_function(g, [](std::span<const double> x) {
    return std::exp(-((x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5)) / 0.02);
  });
  const auto v = stream_field(mu, streams::cellular(0.25));
  StepControl c;
  c.step = 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(evolve_density(rho0, v, mu, 1.0, c));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_EvolveDensity)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_Info(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g(StateSpace::unit_box(2), {n, n});
  const auto mu = von_mises_mu();
  const auto rho = GridDensity::from_function(g, [](std::span<const double> x) { return 1.0 + x[0] * x[1]; });
  mu.snapshot(g);
  for (auto _ : state) benchmark::DoNotOptimize(info(rho, mu));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_Info)->Arg(256)->Arg(512);

static void BM_CoarseGrain(benchmark::State& state) {
  const Grid g(StateSpace::unit_box(2), {512, 128});
  const CoarseGraining cg(g, {4, 4});
  const auto rho = GridDensity::from_function(g, [](std::span<const double> x) { return 1.0 + x[0] * x[1]; });
  for (auto _ : state) benchmark::DoNotOptimize(coarse_grain(rho, cg));
}
BENCHMARK(BM_CoarseGrain);

BENCHMARK_MAIN();
