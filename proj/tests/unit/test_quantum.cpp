#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "infocons/errors.hpp"
#include "infocons/quantum.hpp"
#include "oracles.hpp"

using namespace infocons;
using namespace infocons::quantum;

namespace {

constexpr double kPi = std::numbers::pi;

ModeSet2D two_mode_set(Complex a, Complex b) {
  return ModeSet2D({Mode{1, 1, a}, Mode{2, 1, b}});
}

}  // namespace

TEST(Modes, EnergiesAndValidation) {
  EXPECT_NEAR((Mode{1, 1}.energy()), kPi * kPi, 1e-14);
  EXPECT_NEAR((Mode{2, 3}.energy()), oracle::energy(2, 3), 1e-12);
  EXPECT_NEAR(box_period(), 2.0 / kPi, 1e-15);
  EXPECT_THROW(ModeSet2D({Mode{1, 1, Complex(0.9, 0.0)}}), Error);
  EXPECT_THROW(ModeSet2D({Mode{0, 1}}), Error);
  EXPECT_THROW(ModeSet2D({}), Error);
  EXPECT_NO_THROW(ModeSet2D::single(3, 2));
}

TEST(Modes, DefaultIndices) {
  const auto four = default_mode_indices(4);
  EXPECT_EQ(four, (std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}, {2, 2}}));
  EXPECT_EQ(default_mode_indices(16).size(), 16u);
  const auto three = default_mode_indices(3);
  EXPECT_EQ(three[0], (std::pair<int, int>{1, 1}));
  for (std::size_t i = 1; i < three.size(); ++i)
    EXPECT_LE(oracle::energy(three[i - 1].first, three[i - 1].second),
              oracle::energy(three[i].first, three[i].second));
}

TEST(Modes, RandomPhasesAreSeededAndNormalized) {
  const auto a = ModeSet2D::random_phases(16, 5);
  const auto b = ModeSet2D::random_phases(16, 5);
  const auto c = ModeSet2D::random_phases(16, 6);
  EXPECT_NEAR(a.norm(), 1.0, 1e-12);
  for (std::size_t k = 0; k < 16; ++k) {
    EXPECT_EQ(a.modes()[k].amplitude, b.modes()[k].amplitude);
    EXPECT_NEAR(std::abs(a.modes()[k].amplitude), 0.25, 1e-15);
  }
  bool differs = false;
  for (std::size_t k = 0; k < 16; ++k) differs |= a.modes()[k].amplitude != c.modes()[k].amplitude;
  EXPECT_TRUE(differs);
}

TEST(WaveField, MatchesClosedFormTwoModeSum) {
  const Complex a(0.6, 0.0), b(0.0, 0.8);
  const WaveField field(two_mode_set(a, b));
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double x = u(gen), y = u(gen), t = u(gen);
    const auto ref = oracle::two_mode(a, b, x, y, t);
    const auto s = field.sample(x, y, t);
    EXPECT_LT(std::abs(s.psi - ref.psi), 1e-12);
    EXPECT_LT(std::abs(s.dpsi_dx - ref.dx), 1e-10);
    EXPECT_LT(std::abs(s.dpsi_dy - ref.dy), 1e-10);
    EXPECT_LT(std::abs(field(x, y, t) - ref.psi), 1e-12);
  }
  EXPECT_EQ(field(0.0, 0.3, 0.2), Complex(0.0, 0.0));
  EXPECT_LT(std::abs(field(0.4, 1.0, 0.2)), 1e-14);
}

TEST(WaveField, HighModeSumMatchesDirectEvaluation) {
  const auto modes = ModeSet2D::random_phases(16, 11);
  const WaveField field(modes);
  const double x = 0.37, y = 0.81, t = 0.23;
  const auto c = modes.coefficients_at(t);
  Complex psi = 0.0;
  for (std::size_t k = 0; k < modes.size(); ++k)
    psi += c[k] * oracle::phi(modes.modes()[k].m, modes.modes()[k].n, x, y);
  EXPECT_LT(std::abs(field(x, y, t) - psi), 1e-12);
}

TEST(BornDensity, SpecExamples) {
  const Grid g(box_space(), {64, 64});
  const auto ground = ModeSet2D::single(1, 1);
  const auto d0 = born_density(ground, g, 0.0);
  const auto d1 = born_density(ground, g, 0.7);
  double mass = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.center(i);
    const double ref = std::pow(oracle::phi(1, 1, c[0], c[1]), 2);
    mass += ref * g.cell_volume();
    EXPECT_NEAR(d0[i], d1[i], 1e-14 * d0[i]);
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.center(i);
    EXPECT_NEAR(d0[i], std::pow(oracle::phi(1, 1, c[0], c[1]), 2) / mass, 1e-12);
  }
  EXPECT_NEAR(quadrature(d0), 1.0, 1e-8);

  const auto pair = ModeSet2D::equal_superposition({{1, 1}, {2, 1}});
  const double flip = kPi / (oracle::energy(2, 1) - oracle::energy(1, 1));
  const auto a = born_density(pair, g, 0.0);
  const auto b = born_density(pair, g, flip);
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j) EXPECT_NEAR(a[i * 64 + j], b[(63 - i) * 64 + j], 1e-10);
}

TEST(BornDensity, UnitarityOverTime) {
  const auto modes = ModeSet2D::random_phases(16, 3);
  const Grid g(box_space(), {64, 64});
  const auto mu = born_density_of_states(modes);
  EXPECT_TRUE(mu.time_dependent());
  for (double t : {0.0, 0.1, 0.5, 2.0}) EXPECT_NEAR(mu.snapshot(g, t)->raw_mass, 1.0, 1e-6);
}

TEST(CoefficientFlow, DivergenceFree) {
  const auto single = coefficient_flow_divergence(ModeSet2D::single(1, 1));
  EXPECT_EQ(single.analytic_divergence, 0.0);
  EXPECT_LT(std::abs(single.fd_divergence), 1e-8);

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (std::size_t m : {4u, 16u}) {
      const auto r = coefficient_flow_divergence(ModeSet2D::random_phases(m, seed), 0.37 * static_cast<double>(seed));
      EXPECT_EQ(r.analytic_divergence, 0.0);
      EXPECT_LT(std::abs(r.fd_divergence), 1e-8);
      EXPECT_LT(r.norm_drift, 1e-12);
    }
  }
}

TEST(CoefficientFlow, VelocityIsRotationInEachPlane) {
  const std::vector<double> coords{0.6, 0.0, 0.0, 0.8};
  const std::vector<double> energies{2.0, 5.0};
  const auto v = coefficient_velocity(coords, energies);
  // d/dt (a + i b) = -i E (a + i b) = E b - i E a.
  EXPECT_EQ(v, (std::vector<double>{0.0, -1.2, 4.0, 0.0}));
}

TEST(Guidance, SpecExamples) {
  const WaveField ground(ModeSet2D::single(2, 3));
  const auto v0 = guidance_velocity(ground, 0.3, 0.4, 1.2);
  EXPECT_NEAR(v0[0], 0.0, 1e-12);
  EXPECT_NEAR(v0[1], 0.0, 1e-12);

  const Complex a(0.6, 0.0), b(0.0, 0.8);
  const WaveField field(two_mode_set(a, b));
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int k = 0; k < 50; ++k) {
    const double x = u(gen), y = u(gen), t = u(gen);
    const auto ref = oracle::two_mode(a, b, x, y, t);
    if (std::abs(ref.psi) < 1e-3) continue;
    const double vx = std::imag(ref.dx / ref.psi), vy = std::imag(ref.dy / ref.psi);
    const auto v = guidance_velocity(field, x, y, t);
    EXPECT_NEAR(v[0], vx, 1e-10 * std::max(1.0, std::abs(vx)));
    EXPECT_NEAR(v[1], vy, 1e-10 * std::max(1.0, std::abs(vy)));
  }
  EXPECT_THROW(guidance_velocity(field, 0.0, 0.5, 0.1), NodeProximityError);
}

TEST(Guidance, ContinuityResidualIsSecondOrder) {
  const auto modes = ModeSet2D::random_phases(4, 21);
  const WaveField field(modes);
  auto flux = [&](double x, double y, double t) {
    const auto v = guidance_velocity(field, x, y, t);
    const double r = field.density(x, y, t);
    return std::array<double, 2>{r * v[0], r * v[1]};
  };
  auto residual = [&](double x, double y, double t, double h) {
    const double dt = (field.density(x, y, t + h) - field.density(x, y, t - h)) / (2 * h);
    const double dx = (flux(x + h, y, t)[0] - flux(x - h, y, t)[0]) / (2 * h);
    const double dy = (flux(x, y + h, t)[1] - flux(x, y - h, t)[1]) / (2 * h);
    return dt + dx + dy;
  };
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  int tested = 0;
  for (int k = 0; k < 100; ++k) {
    const double x = u(gen), y = u(gen), t = u(gen);
    if (std::abs(field(x, y, t)) < 1e-3) continue;
    ++tested;
    const double r1 = std::abs(residual(x, y, t, 1e-3));
    const double r2 = std::abs(residual(x, y, t, 5e-4));
    EXPECT_LT(r1, 2e-2);
    if (r1 > 1e-9) EXPECT_LT(r2, 0.35 * r1);
  }
  EXPECT_GT(tested, 80);
}

TEST(CoarseH, HistogramAgainstMu) {
  const Grid coarse(box_space(), {2, 2});
  const GridDensity mu(coarse, {1.0, 1.0, 1.0, 1.0});
  const std::vector<double> pts{0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75, 0.75};
  std::vector<std::uint8_t> lost(4, 0);
  EXPECT_NEAR(coarse_h(pts, lost, mu), 0.0, 1e-15);

  const std::vector<double> clumped{0.1, 0.1, 0.2, 0.2, 0.3, 0.3, 0.9, 0.9};
  // Cell masses (3/4, 0, 0, 1/4) against (1/4, ...).
  const std::vector<double> p{0.75, 0.0, 0.0, 0.25}, q{0.25, 0.25, 0.25, 0.25};
  EXPECT_NEAR(coarse_h(clumped, lost, mu), static_cast<double>(oracle::info(p, q)), 1e-14);

  lost[3] = 1;
  EXPECT_NEAR(coarse_h(clumped, lost, mu), std::log(4.0), 1e-14);
  std::fill(lost.begin(), lost.end(), 1);
  EXPECT_THROW(coarse_h(clumped, lost, mu), SamplingError);
}

TEST(Relaxation, SingleModeIsStatic) {
  RelaxationConfig cfg;
  cfg.trajectories = 2000;
  cfg.t_final = box_period();
  cfg.snapshots = 4;
  cfg.seed = 3;
  const auto r = relaxation_experiment(ModeSet2D::single(1, 1), cfg);
  ASSERT_EQ(r.series.size(), 5u);
  for (const auto& row : r.series) EXPECT_EQ(row.coarse_h, r.series[0].coarse_h);
  ASSERT_EQ(r.ensemble_initial.size(), r.ensemble_final.size());
  for (std::size_t i = 0; i < r.ensemble_initial.size(); ++i)
    EXPECT_NEAR(r.ensemble_final[i], r.ensemble_initial[i], 1e-12);
  EXPECT_EQ(r.lost_count, 0u);
  EXPECT_FALSE(r.degraded);
}

TEST(Relaxation, BornEnsembleStaysBorn) {
  RelaxationConfig cfg;
  cfg.trajectories = 4000;
  cfg.t_final = box_period();
  cfg.snapshots = 4;
  cfg.initial = InitialEnsemble::born;
  cfg.seed = 4;
  const auto r = relaxation_experiment(ModeSet2D::random_phases(4, 1), cfg);
  for (const auto& row : r.series) {
    EXPECT_GE(row.coarse_h, 0.0);
    EXPECT_LT(row.coarse_h, 3.0 * r.series[0].coarse_h);
  }
}

TEST(Relaxation, GroundStateEnsembleRelaxesAndIsDeterministic) {
  RelaxationConfig cfg;
  cfg.trajectories = 3000;
  cfg.t_final = 2.0 * box_period();
  cfg.snapshots = 4;
  cfg.seed = 9;
  const auto modes = ModeSet2D::random_phases(16, 2);
  const auto a = relaxation_experiment(modes, cfg);
  EXPECT_LT(a.series.back().coarse_h, 0.5 * a.series.front().coarse_h);
  EXPECT_EQ(a.ensemble_initial.size(), 2 * cfg.trajectories);
  for (double v : a.ensemble_final) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  const auto b = relaxation_experiment(modes, cfg, Executor(3));
  EXPECT_EQ(a.ensemble_final, b.ensemble_final);
  for (std::size_t k = 0; k < a.series.size(); ++k) EXPECT_EQ(a.series[k].coarse_h, b.series[k].coarse_h);
}
