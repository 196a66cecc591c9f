#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "infocons/entropy.hpp"
#include "infocons/errors.hpp"
#include "infocons/statespace.hpp"
#include "oracles.hpp"

using namespace infocons;

namespace {

DensityOfStates uniform_mu() {
  return DensityOfStates([](std::span<const double>, double) { return 1.0; });
}

/// Direct fine-grid quadrature of rho log(rho / mu), computed here.
double brute_info(const GridDensity& rho, const GridDensity& mu) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (rho[i] > 0.0) s += static_cast<long double>(rho[i]) * std::log(static_cast<long double>(rho[i]) / mu[i]);
  return static_cast<double>(s * rho.grid().cell_volume());
}

}  // namespace

TEST(Info, ZeroWhenRhoEqualsMu) {
  const Grid g(StateSpace::unit_box(2), {32, 32});
  const auto mu = SeparableDensity(StateSpace::unit_box(2), {profiles::gaussian(0, 1, 0.3, 0.2),
                                                               profiles::exponential_tilt(0, 1, -2)})
                      .density_of_states();
  const auto& m = mu.snapshot(g)->density;
  const InfoValue v = info(m, mu);
  EXPECT_TRUE(v.finite);
  EXPECT_NEAR(v.value, 0.0, 1e-14);
}

TEST(Info, HalfBoxIsLogTwo) {
  const Grid g(StateSpace::unit_box(2), {64, 64});
  const auto half = CellMask::box(g, std::vector<double>{0.0, 0.0}, std::vector<double>{0.5, 1.0});
  const auto rho = uniform_on(half, uniform_mu());
  EXPECT_NEAR(info(rho, uniform_mu()).value, std::log(2.0), 1e-13);
}

TEST(Info, RampHalfIsLogFour) {
  const Grid line(StateSpace::unit_box(1), {4000});
  const auto mu = SeparableDensity(StateSpace::unit_box(1), {profiles::ramp(0, 1)}).density_of_states();
  const auto left = CellMask::box(line, std::vector<double>{0.0}, std::vector<double>{0.5});
  const auto rho = uniform_on(left, mu);
  EXPECT_NEAR(info(rho, mu).value, std::log(4.0), 1e-10);
  EXPECT_NEAR(brute_info(rho, mu.snapshot(line)->density), std::log(4.0), 1e-10);
  EXPECT_NEAR(boltzmann_info(left, mu), std::log(4.0), 1e-10);
}

TEST(Info, ZeroLogZeroAndForbiddenSupport) {
  const Grid g(StateSpace::unit_box(1), {4});
  const GridDensity rho(g, {2.0, 2.0, 0.0, 0.0});
  const GridDensity mu(g, {0.0, 2.0, 1.0, 1.0});
  const InfoValue v = info(rho, mu);
  EXPECT_FALSE(v.finite);
  EXPECT_TRUE(std::isinf(v.value));

  const GridDensity mu_ok(g, {1.0, 1.0, 1.0, 1.0});
  EXPECT_NEAR(info(rho, mu_ok).value, std::log(2.0), 1e-15);

  const GridDensity other(Grid(StateSpace::unit_box(1), {5}), std::vector<double>(5, 1.0));
  EXPECT_THROW(info(other, mu_ok), DimensionError);
}

TEST(Info, GibbsInequalityProperty) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g(StateSpace::unit_box(2), {8, 8});
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> r(g.size()), m(g.size());
    for (auto& x : r) x = u(gen) < 0.2 ? 0.0 : u(gen);
    for (auto& x : m) x = 0.01 + u(gen);
    if (trial == 0) r = m;
    const auto rho = GridDensity::normalized(g, r);
    const auto mu = GridDensity::normalized(g, m);
    const double v = info(rho, mu).value;
    EXPECT_GE(v, 0.0);
    EXPECT_NEAR(v, brute_info(rho, mu), 1e-12);
    if (trial == 0) EXPECT_NEAR(v, 0.0, 1e-14);
  }
}

TEST(Info, PermutationInvariance) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g(StateSpace::unit_box(1), {50});
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> r(g.size()), m(g.size());
    for (auto& x : r) x = u(gen);
    for (auto& x : m) x = 0.05 + u(gen);
    const auto perm = oracle::random_permutation(gen, g.size());
    std::vector<double> rp(g.size()), mp(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      rp[perm[i]] = r[i];
      mp[perm[i]] = m[i];
    }
    const double a = info(GridDensity::normalized(g, r), GridDensity::normalized(g, m)).value;
    const double b = info(GridDensity::normalized(g, rp), GridDensity::normalized(g, mp)).value;
    EXPECT_NEAR(a, b, 1e-13);
  }
}

TEST(Boltzmann, SpecExamples) {
  const Grid g(StateSpace::unit_box(2), {40, 40});
  EXPECT_NEAR(boltzmann_info(CellMask::all(g), uniform_mu()), 0.0, 1e-14);
  const auto quadrant = CellMask::box(g, std::vector<double>{0.0, 0.0}, std::vector<double>{0.5, 0.5});
  EXPECT_NEAR(boltzmann_info(quadrant, uniform_mu()), std::log(4.0), 1e-13);
  EXPECT_NEAR(info(uniform_on(quadrant, uniform_mu()), uniform_mu()).value, std::log(4.0), 1e-13);
  EXPECT_THROW(boltzmann_info(CellMask(g), uniform_mu()), EmptySupportError);

  // N = 1/e on the line: a mask of length 1/e (to grid resolution).
  const Grid line(StateSpace::unit_box(1), {100000});
  const auto m = CellMask::box(line, std::vector<double>{0.0}, std::vector<double>{std::exp(-1.0)});
  EXPECT_NEAR(boltzmann_info(m, uniform_mu()), 1.0, 2e-5);
}

TEST(Boltzmann, NestedRegionsAreMonotone) {
  const Grid g(StateSpace::unit_box(2), {30, 30});
  const auto mu = SeparableDensity(StateSpace::unit_box(2), {profiles::gaussian(0, 1, 0.5, 0.25),
                                                               profiles::exponential_tilt(0, 1, 1.0)})
                      .density_of_states();
  double prev = std::numeric_limits<double>::infinity();
  for (double r = 0.1; r <= 1.0; r += 0.1) {
    const auto m = CellMask::box(g, std::vector<double>{0.0, 0.0}, std::vector<double>{r, r});
    const double b = boltzmann_info(m, mu);
    EXPECT_LE(b, prev);
    prev = b;
  }
}

TEST(DeltaProxy, GrowsLikeLogCellCount) {
  for (std::size_t n : {10u, 20u}) {
    const Grid g(StateSpace::unit_box(2), {n, n});
    const auto rho = single_cell_density(g, n + 3);
    EXPECT_NEAR(info_delta_proxy(rho, uniform_mu()).value, std::log(static_cast<double>(n * n)), 1e-12);
  }
  const Grid one(StateSpace::unit_box(2), {1, 1});
  EXPECT_NEAR(info_delta_proxy(single_cell_density(one, 0), uniform_mu()).value, 0.0, 1e-15);

  const Grid g(StateSpace::unit_box(1), {4});
  EXPECT_THROW(info_delta_proxy(GridDensity(g, {2.0, 2.0, 0.0, 0.0}), uniform_mu()), Error);
}

TEST(RelativeInfo, MatchesOracle) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = oracle::random_distribution(gen, 9);
    const auto q = oracle::random_distribution(gen, 9);
    EXPECT_NEAR(relative_info(p, q), static_cast<double>(oracle::info(p, q)), 1e-13);
  }
  EXPECT_THROW(relative_info(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}), DimensionError);
}
