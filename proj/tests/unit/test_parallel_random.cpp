#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "infocons/errors.hpp"
#include "infocons/parallel.hpp"
#include "infocons/random.hpp"
#include "infocons/sampling.hpp"
#include "infocons/statespace.hpp"

using namespace infocons;

TEST(Executor, VisitsEveryIndexOnce) {
  for (std::size_t threads : {1u, 2u, 5u}) {
    const Executor ex(threads);
    std::vector<std::atomic<int>> hits(1001);
    ex.for_each(hits.size(), [&](std::size_t i) { hits[i]++; }, 17);
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(Executor, ChunkLayoutIgnoresThreadCount) {
  auto layout = [](std::size_t threads) {
    std::vector<std::pair<std::size_t, std::size_t>> chunks(Executor::chunk_count(100, 7));
    Executor(threads).for_chunks(100, 7, [&](std::size_t c, std::size_t b, std::size_t e) { chunks[c] = {b, e}; });
    return chunks;
  };
  EXPECT_EQ(layout(1), layout(4));
  EXPECT_EQ(layout(1).back(), (std::pair<std::size_t, std::size_t>{98, 100}));
}

TEST(Executor, RethrowsLowestFailingChunk) {
  const Executor ex(4);
  try {
    ex.for_chunks(40, 1, [](std::size_t c, std::size_t, std::size_t) {
      if (c == 7 || c == 31) throw std::runtime_error("chunk " + std::to_string(c));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "chunk 7");
  }
}

TEST(Executor, EmptyRangeIsNoOp) {
  bool called = false;
  Executor(3).for_chunks(0, 8, [&](std::size_t, std::size_t, std::size_t) { called = true; });
  EXPECT_FALSE(called);
}

TEST(Random, StreamsAreDistinctAndReproducible) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(stream_seed(42, s));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(stream_seed(1, 2), stream_seed(1, 2));
  EXPECT_NE(stream_seed(1, 2), stream_seed(2, 1));

  Rng a(7, 3), b(7, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.bits(), b.bits());
}

TEST(Random, UniformMomentsAndRange) {
  Rng rng(99);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 / std::sqrt(12.0 * n));
  EXPECT_NEAR(sq / n, 1.0 / 3.0, 0.005);
}

TEST(Random, BelowStaysInRange) {
  Rng rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) counts[rng.below(7)]++;
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Random, NormalMoments) {
  Rng rng(11);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Sampling, RejectionSamplesMatchMarginalAndThreadCount) {
  const StateSpace box = StateSpace::unit_box(2);
  const PointDensity ramp = [](std::span<const double> x) { return 2.0 * x[0]; };
  const auto serial = rejection_sample(ramp, box, 20000, 3, 2.0 + 1e-12, Executor(1));
  const auto threaded = rejection_sample(ramp, box, 20000, 3, 2.0 + 1e-12, Executor(4));
  EXPECT_EQ(serial, threaded);
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t k = 0; k < 20000; ++k) {
    mean_x += serial[2 * k];
    mean_y += serial[2 * k + 1];
  }
  // E[x] = 2/3 under pdf 2x; E[y] = 1/2.
  EXPECT_NEAR(mean_x / 20000, 2.0 / 3.0, 0.01);
  EXPECT_NEAR(mean_y / 20000, 0.5, 0.01);
}

TEST(Sampling, EnvelopeViolationAndStarvation) {
  const StateSpace box = StateSpace::unit_box(1);
  const PointDensity ramp = [](std::span<const double> x) { return 2.0 * x[0]; };
  EXPECT_THROW(rejection_sample(ramp, box, 1000, 1, 1.0), SamplingError);
  const PointDensity zero = [](std::span<const double>) { return 0.0; };
  EXPECT_THROW(rejection_sample(zero, box, 10, 1, 1.0, serial_executor(), 50), SamplingError);
  EXPECT_THROW(estimate_envelope(zero, box), SamplingError);
  EXPECT_GE(estimate_envelope(ramp, box), 2.0);
}
