#include <benchmark/benchmark.h>

#include "infocons/quantum.hpp"

using namespace infocons::quantum;

static void BM_WaveSample(benchmark::State& state) {
  const auto modes = ModeSet2D::random_phases(static_cast<std::size_t>(state.range(0)), 1);
  const WaveField field(modes);
  const auto c = modes.coefficients_at(0.3);
  double x = 0.1234, y = 0.5678;
  for (auto _ : state) {
    const auto s = field.sample(x, y, c);
    benchmark::DoNotOptimize(s);
    x = x < 0.9 ? x + 1e-3 : 0.1;
  }
}
BENCHMARK(BM_WaveSample)->Arg(1)->Arg(4)->Arg(16)->Arg(64);

static void BM_GuidanceVelocity(benchmark::State& state) {
  const WaveField field(ModeSet2D::random_phases(16, 1));
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(guidance_velocity(field, 0.37, 0.61, t));
    t += 1e-4;
  }
}
BENCHMARK(BM_GuidanceVelocity);

static void BM_Relaxation(benchmark::State& state) {
  const auto modes = ModeSet2D::random_phases(16, 2);
  RelaxationConfig cfg;
  cfg.trajectories = static_cast<std::size_t>(state.range(0));
  cfg.t_final = box_period();
  cfg.snapshots = 2;
  for (auto _ : state) benchmark::DoNotOptimize(relaxation_experiment(modes, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Relaxation)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
