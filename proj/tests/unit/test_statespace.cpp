#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "infocons/errors.hpp"
#include "infocons/statespace.hpp"
#include "oracles.hpp"

using namespace infocons;

namespace {

DensityOfStates uniform_mu() {
  return DensityOfStates([](std::span<const double>, double) { return 1.0; });
}

DensityOfStates ramp_mu_1d() {
  return SeparableDensity(StateSpace::unit_box(1), {profiles::ramp(0.0, 1.0)}).density_of_states();
}

}  // namespace

TEST(StateSpace, ValidatesBounds) {
  EXPECT_THROW(StateSpace({}, {}), DimensionError);
  EXPECT_THROW(StateSpace({1.0}, {1.0}), DimensionError);
  EXPECT_THROW(StateSpace({0.0, 0.0}, {1.0}), DimensionError);
  const StateSpace s({0.0, -1.0}, {2.0, 1.0});
  EXPECT_DOUBLE_EQ(s.volume(), 4.0);
  EXPECT_TRUE(s.contains(std::vector<double>{2.0, -1.0}));
  EXPECT_FALSE(s.contains(std::vector<double>{2.1, 0.0}));
}

TEST(StateSpace, BoundaryRules) {
  const StateSpace s({0.0, 0.0}, {1.0, 1.0}, {Boundary::periodic, Boundary::reflecting});
  std::vector<double> x{1.25, 1.25};
  EXPECT_TRUE(s.apply_boundary(x));
  EXPECT_NEAR(x[0], 0.25, 1e-15);
  EXPECT_NEAR(x[1], 0.75, 1e-15);
  x = {-0.25, -2.25};
  EXPECT_TRUE(s.apply_boundary(x));
  EXPECT_NEAR(x[0], 0.75, 1e-15);
  EXPECT_NEAR(x[1], 0.25, 1e-15);

  const StateSpace absorbing({0.0}, {1.0}, Boundary::absorbing_forbidden);
  EXPECT_THROW(absorbing.require_supported(), BoundaryError);
  std::vector<double> y{1.5};
  EXPECT_FALSE(absorbing.apply_boundary(y));
  EXPECT_EQ(parse_boundary("periodic"), Boundary::periodic);
  EXPECT_THROW(parse_boundary("sticky"), Error);
}

TEST(Grid, LayoutAndIndexing) {
  const Grid g(StateSpace({0.0, 0.0}, {2.0, 1.0}), {4, 5});
  EXPECT_EQ(g.size(), 20u);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.5 * 0.2);
  EXPECT_DOUBLE_EQ(g.center(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(g.center(1, 4), 0.9);
  std::vector<std::size_t> idx(2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.unravel(i, idx);
    EXPECT_EQ(g.flat_index(idx), i);
    EXPECT_EQ(g.locate(g.center(i)), i);
  }
  EXPECT_EQ(g.locate(std::vector<double>{2.0, 1.0}), g.size() - 1);
  EXPECT_FALSE(g.locate(std::vector<double>{2.5, 0.5}).has_value());
  EXPECT_THROW(Grid(StateSpace::unit_box(2), {3, 0}), DimensionError);
  EXPECT_THROW(Grid(StateSpace::unit_box(2), {3}), DimensionError);
  EXPECT_EQ(g.refined(2).size(), 80u);
}

TEST(Quadrature, SpecExamples) {
  const Grid g(StateSpace::unit_box(2), {64, 64});
  EXPECT_NEAR(quadrature(g, std::vector<double>(g.size(), 1.0)), 1.0, 1e-14);

  const auto left = CellMask::box(g, std::vector<double>{0.0, 0.0}, std::vector<double>{0.5, 1.0});
  const GridDensity rho(g, std::vector<double>(g.size(), 1.0));
  EXPECT_NEAR(quadrature(rho, &left), 0.5, 1e-14);

  // mu = 2x on [0, 1]: the midpoint rule is exact for linear integrands.
  const Grid line(StateSpace::unit_box(1), {100});
  const auto half = CellMask::box(line, std::vector<double>{0.0}, std::vector<double>{0.5});
  const auto mu = ramp_mu_1d();
  EXPECT_NEAR(state_count(half, mu), 0.25, 1e-12);

  const CellMask other(Grid(StateSpace::unit_box(2), {8, 8}));
  EXPECT_THROW(quadrature(g, std::vector<double>(g.size(), 1.0), &other), DimensionError);
}

TEST(Quadrature, SecondOrderUnderRefinement) {
  const auto f = [](std::span<const double> x) { return std::exp(x[0] + x[1]); };
  const double exact = (std::exp(1.0) - 1.0) * (std::exp(1.0) - 1.0);
  double prev = 0.0;
  for (std::size_t n : {16u, 32u, 64u}) {
    const Grid g(StateSpace::unit_box(2), {n, n});
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.center(i));
    const double err = std::abs(quadrature(g, v) - exact);
    if (prev > 0.0) EXPECT_NEAR(std::log2(prev / err), 2.0, 0.05);
    prev = err;
  }
}

TEST(StateCount, SpecExamples) {
  const Grid g(StateSpace::unit_box(2), {32, 32});
  const auto mu = uniform_mu();
  EXPECT_NEAR(state_count(CellMask::all(g), mu), 1.0, 1e-14);
  EXPECT_EQ(state_count(CellMask(g), mu), 0.0);
  const auto quadrant = CellMask::box(g, std::vector<double>{0.0, 0.0}, std::vector<double>{0.5, 0.5});
  EXPECT_NEAR(state_count(quadrant, mu), 0.25, 1e-14);
}

TEST(StateCount, ExactlyAdditiveOverDisjointMasks) {
  std::mt19937_64 gen(3);
  const Grid g(StateSpace::unit_box(2), {40, 40});
  const auto mu = SeparableDensity(StateSpace::unit_box(2), {profiles::exponential_tilt(0, 1, 1.3),
                                                               profiles::gaussian(0, 1, 0.4, 0.3)})
                      .density_of_states();
  for (int trial = 0; trial < 50; ++trial) {
    CellMask a(g), b(g);
    std::bernoulli_distribution coin(0.3);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (coin(gen)) a.set(i);
      else if (coin(gen)) b.set(i);
    }
    ASSERT_TRUE(a.disjoint(b));
    // Union quadrature is the pairwise sum of the same terms, so compare with
    // the two-part sum at rounding level.
    EXPECT_NEAR(state_count(a | b, mu), state_count(a, mu) + state_count(b, mu), 4e-16);
  }
}

TEST(UniformOn, SpecExamples) {
  const Grid g(StateSpace::unit_box(2), {16, 16});
  const auto mu = uniform_mu();
  const auto all = uniform_on(CellMask::all(g), mu);
  for (double v : all.values()) EXPECT_NEAR(v, 1.0, 1e-14);

  const auto half = CellMask::box(g, std::vector<double>{0.0, 0.0}, std::vector<double>{0.5, 1.0});
  const auto rho = uniform_on(half, mu);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(rho[i], half[i] ? 2.0 : 0.0, 1e-14);

  const Grid line(StateSpace::unit_box(1), {200});
  const auto left = CellMask::box(line, std::vector<double>{0.0}, std::vector<double>{0.5});
  const auto r = uniform_on(left, ramp_mu_1d());
  for (std::size_t i = 0; i < line.size(); ++i) {
    const double x = line.center(0, i);
    EXPECT_NEAR(r[i], x < 0.5 ? 8.0 * x : 0.0, 1e-12);
  }
  EXPECT_THROW(uniform_on(CellMask(g), mu), EmptySupportError);
}

TEST(UniformOn, NormalizedForRandomMasks) {
  std::mt19937_64 gen(9);
  const Grid g(StateSpace::unit_box(2), {24, 24});
  const auto mu = SeparableDensity(StateSpace::unit_box(2), {profiles::gaussian(0, 1, 0.5, 0.2),
                                                               profiles::ramp(0, 1)})
                      .density_of_states();
  std::uniform_int_distribution<std::size_t> cell(0, g.size() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    CellMask m(g);
    const std::size_t k = 1 + trial;
    for (std::size_t j = 0; j < k; ++j) m.set(cell(gen));
    // Cells at y = 0 carry mu > 0 because the ramp is sampled at centres.
    EXPECT_NEAR(quadrature(uniform_on(m, mu)), 1.0, 1e-10);
  }
}

TEST(GridDensity, Validation) {
  const Grid g(StateSpace::unit_box(1), {4});
  EXPECT_THROW(GridDensity(g, {1.0, 1.0, 1.0}), DimensionError);
  EXPECT_THROW(GridDensity(g, {1.0, 1.0, 1.0, 1.1}), InvalidDensityError);
  EXPECT_THROW(GridDensity(g, {2.0, -1.0, 1.0, 2.0}), InvalidDensityError);
  EXPECT_THROW(GridDensity(g, {1.0, NAN, 1.0, 1.0}), InvalidDensityError);
  EXPECT_THROW(GridDensity::normalized(g, {0.0, 0.0, 0.0, 0.0}), InvalidDensityError);
  const auto d = GridDensity::normalized(g, {1.0, 2.0, 3.0, 4.0});
  EXPECT_NEAR(quadrature(d), 1.0, 1e-15);
  EXPECT_NEAR(d[3], 1.6, 1e-15);
}

TEST(DensityOfStates, GuardsAndSnapshots) {
  const DensityOfStates bad([](std::span<const double> x, double) { return x[0] - 0.5; });
  EXPECT_THROW(bad(std::vector<double>{0.1}), InvalidDensityError);

  const Grid g(StateSpace::unit_box(1), {50});
  const DensityOfStates scaled([](std::span<const double>, double) { return 3.0; });
  const auto snap = scaled.snapshot(g);
  EXPECT_NEAR(snap->raw_mass, 3.0, 1e-14);
  EXPECT_NEAR(quadrature(snap->density), 1.0, 1e-14);
  EXPECT_EQ(scaled.snapshot(g).get(), snap.get());

  const DensityOfStates moving([](std::span<const double> x, double t) { return 1.0 + t * (x[0] - 0.5); }, true);
  EXPECT_NE(moving.snapshot(g, 0.0)->density[0], moving.snapshot(g, 1.0)->density[0]);
}

TEST(Interpolation, ExactForMultilinearFields) {
  const Grid g(StateSpace::unit_box(2), {10, 12});
  std::vector<double> v(g.size());
  const auto f = [](double x, double y) { return 1.0 + 2.0 * x - 3.0 * y + 0.5 * x * y; };
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.center(i);
    v[i] = f(c[0], c[1]);
  }
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int k = 0; k < 100; ++k) {
    const double x = u(gen), y = u(gen);
    EXPECT_NEAR(interpolate(g, v, std::vector<double>{x, y}), f(x, y), 1e-12);
  }
}

TEST(Interpolation, PeriodicAxesWrap) {
  const Grid g(StateSpace::unit_box(1, Boundary::periodic), {4});
  const std::vector<double> v{0.0, 1.0, 2.0, 3.0};
  // Halfway between the last centre (0.875) and the first (0.125 + 1).
  EXPECT_NEAR(interpolate(g, v, std::vector<double>{0.0}), 1.5, 1e-15);
  const Grid r(StateSpace::unit_box(1), {4});
  EXPECT_NEAR(interpolate(r, v, std::vector<double>{0.0}), 0.0, 1e-15);
}

TEST(Separable, BoxMassesMatchClosedForms) {
  const StateSpace box({0.0, -1.0}, {2.0, 1.0});
  const SeparableDensity tilt(box, {profiles::exponential_tilt(0, 2, 0.7), profiles::gaussian(-1, 1, 0.2, 0.4)});
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> ux(0.0, 2.0), uy(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    double a = ux(gen), b = ux(gen), c = uy(gen), d = uy(gen);
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    const double expect = oracle::tilt_mass(a, b, 0, 2, 0.7) * oracle::gaussian_mass(c, d, -1, 1, 0.2, 0.4);
    EXPECT_NEAR(tilt.box_mass(std::vector<double>{a, c}, std::vector<double>{b, d}), expect, 1e-13);
  }
  EXPECT_NEAR(tilt.box_mass(std::vector<double>{0, -1}, std::vector<double>{2, 1}), 1.0, 1e-14);
}

TEST(Separable, VonMisesIsNormalizedAndPeriodic) {
  const auto p = profiles::von_mises(0.0, 1.0, 1.5, 0.3);
  const int n = 20000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += p.pdf((i + 0.5) / n) / n;
  EXPECT_NEAR(s, 1.0, 1e-10);
  EXPECT_NEAR(p.pdf(0.0), p.pdf(1.0), 1e-13);
  EXPECT_NEAR(p.cdf(1.0), 1.0, 1e-10);
  EXPECT_NEAR(p.cdf(0.0), 0.0, 1e-15);
}

TEST(GridCsv, RoundTrip) {
  const Grid g(StateSpace({0.0, 1.0}, {2.0, 3.0}), {3, 4});
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.125 * static_cast<double>(i + 1);
  const auto d = GridDensity::normalized(g, v);
  std::stringstream io;
  write_grid_csv(io, g, d.values());
  std::string header;
  std::getline(io, header);
  EXPECT_EQ(header, "dim,shape_0,shape_1,lo_0,lo_1,hi_0,hi_1");
  io.seekg(0);
  const auto back = read_grid_density_csv(io);
  EXPECT_TRUE(back.grid().same_layout(g));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back[i], d[i]);
}
