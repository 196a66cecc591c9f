#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "infocons/discrete.hpp"

using namespace infocons;

static void BM_CertifyPermutation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::size_t> target(n);
  std::iota(target.begin(), target.end(), std::size_t{0});
  std::shuffle(target.begin(), target.end(), std::mt19937_64(1));
  const auto T = DiscretePropagator::permutation(target);
  const auto mu = DiscreteStateSpace::uniform(n);
  for (auto _ : state) benchmark::DoNotOptimize(certify_information_conserving(T, mu));
}
BENCHMARK(BM_CertifyPermutation)->Arg(12)->Arg(128);

static void BM_CertifyMixing(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto T = DiscretePropagator::mixing(n);
  const auto mu = DiscreteStateSpace::uniform(n);
  for (auto _ : state) benchmark::DoNotOptimize(certify_information_conserving(T, mu));
}
BENCHMARK(BM_CertifyMixing)->Arg(12)->Arg(128);

static void BM_Propagate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto T = DiscretePropagator::mixing(n);
  const std::vector<double> p(n, 1.0 / static_cast<double>(n));
  for (auto _ : state) benchmark::DoNotOptimize(propagate(T, p));
}
BENCHMARK(BM_Propagate)->Arg(12)->Arg(128);

BENCHMARK_MAIN();
