#include "infocons/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <thread>

#include "infocons/coarse.hpp"
#include "infocons/csv.hpp"
#include "infocons/discrete.hpp"
#include "infocons/entropy.hpp"
#include "infocons/errors.hpp"
#include "infocons/parallel.hpp"
#include "infocons/quantum.hpp"
#include "infocons/random.hpp"

#ifndef INFOCONS_VERSION
#define INFOCONS_VERSION "unknown"
#endif

namespace infocons {

namespace {

constexpr std::uint64_t kProbeStream = 0x9b0be;

std::vector<Boundary> boundaries_of(const Scenario& s) {
  std::vector<Boundary> out;
  for (const auto& w : s.words("space.boundary")) out.push_back(parse_boundary(w));
  return out;
}

SeparableDensity mu_preset(const Scenario& s, const StateSpace& space) {
  const std::string& name = s.text("mu.preset");
  const double strength = s.real("mu.strength");
  std::vector<AxisProfile> axes;
  for (std::size_t a = 0; a < 2; ++a) {
    const double lo = space.lo(a);
    const double hi = space.hi(a);
    if (name == "uniform") {
      axes.push_back(profiles::uniform(lo, hi));
    } else if (name == "exponential_tilt") {
      axes.push_back(profiles::exponential_tilt(lo, hi, a == 0 ? strength : 0.5 * strength));
    } else if (name == "gaussian") {
      axes.push_back(profiles::gaussian(lo, hi, 0.5 * (lo + hi), s.real("mu.width")));
    } else {
      axes.push_back(profiles::von_mises(lo, hi, strength, a == 0 ? 0.0 : 1.0));
    }
  }
  return SeparableDensity(space, std::move(axes));
}

VelocityField law_preset(const Scenario& s, const DensityOfStates& mu) {
  const std::string& name = s.text("stream.preset");
  const double a = s.real("stream.amplitude");
  if (name == "zero") return VelocityField::zero(2);
  if (name == "expansion") return fields::expansion(2, a);
  if (name == "shear") return fields::shear(a);
  if (name == "rotation") return fields::rotation(a, 0.5, 0.5);
  StreamFunction f;
  if (name == "constant") {
    f = streams::constant(a);
  } else if (name == "cellular") {
    const auto k = s.integers("stream.modes");
    f = streams::cellular(a, static_cast<int>(k[0]), static_cast<int>(k[1]));
  } else if (name == "shear_wave") {
    f = streams::shear_wave(a);
  } else if (name == "diagonal_wave") {
    f = streams::diagonal_wave(a);
  } else if (name == "mixed_wave") {
    f = streams::mixed_wave(a);
  } else if (name == "linear_y") {
    f = streams::linear_y(a);
  } else {
    f = streams::quadratic(a);
  }
  return stream_field(mu, std::move(f));
}

GridDensity blob(const Grid& grid, std::span<const double> center, std::span<const double> width) {
  const StateSpace& space = grid.space();
  return GridDensity::from_function(grid, [&](std::span<const double> x) {
    double q = 0.0;
    for (std::size_t a = 0; a < 2; ++a) {
      double d = x[a] - center[a];
      if (space.boundary(a) == Boundary::periodic) {
        const double L = space.hi(a) - space.lo(a);
        d -= L * std::round(d / L);
      }
      q += d * d / (width[a] * width[a]);
    }
    return std::exp(-0.5 * q);
  });
}

std::vector<double> snapshot_times(double span, long long snapshots) {
  std::vector<double> t;
  for (long long k = 0; k <= snapshots; ++k)
    t.push_back(k == snapshots ? span : span * static_cast<double>(k) / static_cast<double>(snapshots));
  return t;
}

struct Context {
  const Scenario& scenario;
  std::filesystem::path dir;
  std::uint64_t seed;
  const Executor& executor;
  std::ostream& log;
  bool quiet;
  RunOutcome& outcome;

  std::ofstream open(const std::string& name) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    outcome.files.push_back(path);
    return out;
  }
  void note(const std::string& msg) const {
    if (!quiet) log << msg << '\n';
  }
  void warn(const std::string& msg) const {
    outcome.warnings.push_back(msg);
    log << "warning: " << msg << '\n';
  }
};

void run_discrete(Context& ctx) {
  const Scenario& s = ctx.scenario;
  const DiscretePropagator T = load_propagator_csv(s.text("matrix"));
  const DiscreteStateSpace space = s.text("mu").empty() ? DiscreteStateSpace::uniform(T.size())
                                                        : DiscreteStateSpace(load_weights_csv(s.text("mu")));
  if (space.size() != T.size()) throw DimensionError("mu has " + std::to_string(space.size()) +
                                                     " states but the matrix has " + std::to_string(T.size()));
  CertifyOptions opt;
  opt.tolerance = s.real("certify.tolerance");
  opt.random_trials = static_cast<std::size_t>(s.integer("certify.trials"));
  opt.seed = ctx.seed;
  const Certificate cert = certify_information_conserving(T, space, opt);

  std::string verdict;
  if (cert.conserving) {
    verdict = "conserving\n";
    auto out = ctx.open("permutation.csv");
    csv::Writer w(out, {"state", "target"});
    for (std::size_t j = 0; j < cert.permutation.size(); ++j)
      w.row({static_cast<double>(j), static_cast<double>(cert.permutation[j])});
  } else {
    const Witness& wit = *cert.witness;
    verdict = "violating\nreason: " + wit.reason + "\n";
    auto out = ctx.open("witness.csv");
    if (wit.kind == Witness::Kind::distribution) {
      verdict += "witness: distribution\ninfo_before: " + csv::format_number(wit.info_before) +
                 "\ninfo_after: " + csv::format_number(wit.info_after) + "\n";
      const auto image = propagate(T, wit.distribution);
      csv::Writer w(out, {"state", "p", "propagated_p"});
      for (std::size_t i = 0; i < wit.distribution.size(); ++i)
        w.row({static_cast<double>(i), wit.distribution[i], image[i]});
    } else {
      verdict += "witness: mask\nrow: " + std::to_string(wit.row) + "\nmask_value: " +
                 csv::format_number(wit.mask_value) + "\nmu_value: " + csv::format_number(wit.mu_value) + "\n";
      std::vector<double> in_region(T.size(), 0.0);
      for (auto i : wit.region) in_region[i] = 1.0;
      const auto U = mask(T, wit.region, space.mu());
      csv::Writer w(out, {"state", "in_region", "mask", "mu"});
      for (std::size_t i = 0; i < T.size(); ++i)
        w.row({static_cast<double>(i), in_region[i], U[i], space.mu()[i]});
    }
  }
  ctx.open("verdict.txt") << verdict;
  ctx.note(verdict.substr(0, verdict.find('\n')));
}

void run_flow_demo(Context& ctx) {
  const Scenario& s = ctx.scenario;
  const FlowSetup setup = build_flow_setup(s);
  const auto times = snapshot_times(s.real("time.span"), s.integer("time.snapshots"));
  const auto n_probe = static_cast<std::size_t>(s.integer("probe.points"));
  const double h = s.real("probe.h");

  // Probe points sit at least 2h inside non-periodic walls.
  std::vector<std::vector<double>> probes;
  Rng rng(ctx.seed, kProbeStream);
  for (std::size_t k = 0; k < n_probe; ++k) {
    std::vector<double> x(2);
    for (std::size_t a = 0; a < 2; ++a) {
      const double lo = setup.space.lo(a);
      const double hi = setup.space.hi(a);
      const double margin = setup.space.boundary(a) == Boundary::periodic ? 0.0 : 2.0 * h;
      x[a] = rng.uniform(lo + margin, hi - margin);
    }
    probes.push_back(std::move(x));
  }

  auto out = ctx.open("flow_series.csv");
  csv::Writer w(out, {"t", "info", "normalization_drift", "max_mu_divergence"});
  for (double t : times) {
    const EvolveResult r = evolve_density(setup.rho0, setup.velocity, setup.mu, t, setup.control, ctx.executor);
    const InfoValue inf = info(r.density, setup.mu.snapshot(setup.grid, t)->density);
    double div = 0.0;
    for (const auto& x : probes) div = std::max(div, std::abs(mu_divergence(setup.velocity, setup.mu, setup.space, x, t, h)));
    w.row({t, inf.value, r.normalization_drift, div});
    ctx.note("t = " + csv::format_number(t) + "  info = " + csv::format_number(inf.value));
  }
}

void run_htheorem(Context& ctx) {
  const Scenario& s = ctx.scenario;
  const FlowSetup setup = build_flow_setup(s);
  const auto f = s.integers("coarse.factor");
  const CoarseGraining cg(setup.grid, {static_cast<std::size_t>(f[0]), static_cast<std::size_t>(f[1])});
  const auto premise = coarse_info_change(setup.rho0, setup.rho0, setup.mu, cg, 0.0);
  if (!premise.premise_holds) ctx.warn(premise.warning);

  const FlowScenario scenario{setup.rho0, setup.velocity, setup.mu, setup.control};
  const auto times = snapshot_times(s.real("time.span"), s.integer("time.snapshots"));
  const auto rows = htheorem_run(scenario, cg, times, ctx.executor);
  auto out = ctx.open("htheorem.csv");
  csv::Writer w(out, {"t", "fine_info", "coarse_info", "normalization_drift"});
  for (const auto& r : rows) w.row({r.t, r.fine_info, r.coarse_info, r.normalization_drift});
  ctx.note("coarse info " + csv::format_number(rows.front().coarse_info) + " -> " +
           csv::format_number(rows.back().coarse_info));
}

void run_hilbert(Context& ctx) {
  const Scenario& s = ctx.scenario;
  const auto modes = quantum::ModeSet2D::random_phases(static_cast<std::size_t>(s.integer("modes.count")), ctx.seed);
  const auto times = snapshot_times(s.real("time.span"), s.integer("time.snapshots"));
  auto out = ctx.open("hilbert.csv");
  csv::Writer w(out, {"t", "analytic_divergence", "fd_divergence", "norm_drift"});
  double worst = 0.0;
  for (double t : times) {
    const auto c = quantum::coefficient_flow_divergence(modes, t, s.real("fd.step"));
    w.row({t, c.analytic_divergence, c.fd_divergence, c.norm_drift});
    worst = std::max(worst, std::abs(c.fd_divergence));
  }
  ctx.note("largest finite-difference divergence " + csv::format_number(worst));
}

void run_relax(Context& ctx) {
  const Scenario& s = ctx.scenario;
  const auto modes = quantum::ModeSet2D::random_phases(static_cast<std::size_t>(s.integer("modes.count")), ctx.seed);
  quantum::RelaxationConfig cfg;
  cfg.trajectories = static_cast<std::size_t>(s.integer("trajectories"));
  cfg.t_final = s.real("time.t_final");
  cfg.snapshots = static_cast<std::size_t>(s.integer("time.snapshots"));
  cfg.step = s.real("time.step");
  const auto fine = s.integers("grid.fine");
  const auto coarse = s.integers("grid.coarse");
  cfg.fine_shape = {static_cast<std::size_t>(fine[0]), static_cast<std::size_t>(fine[1])};
  cfg.coarse_shape = {static_cast<std::size_t>(coarse[0]), static_cast<std::size_t>(coarse[1])};
  cfg.initial = s.text("initial") == "born" ? quantum::InitialEnsemble::born : quantum::InitialEnsemble::ground_state;
  cfg.node_floor = s.real("node.floor");
  cfg.min_step = s.real("node.min_step");
  cfg.speed_cap = s.real("node.speed_cap");
  cfg.max_displacement = s.real("step.max_displacement");
  cfg.degraded_fraction = s.real("degraded.fraction");
  cfg.seed = ctx.seed;

  const auto result = quantum::relaxation_experiment(modes, cfg, ctx.executor);
  {
    auto out = ctx.open("h_series.csv");
    csv::Writer w(out, {"t", "coarse_H", "lost_fraction"});
    for (const auto& r : result.series) w.row({r.t, r.coarse_h, r.lost_fraction});
  }
  {
    auto out = ctx.open("ensemble_t0.csv");
    csv::Writer w(out, {"x", "y"});
    for (std::size_t k = 0; k < cfg.trajectories; ++k)
      w.row({result.ensemble_initial[2 * k], result.ensemble_initial[2 * k + 1]});
  }
  {
    auto out = ctx.open("ensemble_tfinal.csv");
    csv::Writer w(out, {"x", "y", "lost"});
    for (std::size_t k = 0; k < cfg.trajectories; ++k)
      w.row({result.ensemble_final[2 * k], result.ensemble_final[2 * k + 1], static_cast<double>(result.lost[k])});
  }
  {
    auto out = ctx.open("born_grid_tfinal.csv");
    write_grid_csv(out, result.born_final.grid(), result.born_final.values());
  }
  ctx.note("coarse H " + csv::format_number(result.series.front().coarse_h) + " -> " +
           csv::format_number(result.series.back().coarse_h) + ", lost fraction " +
           csv::format_number(result.lost_fraction));
  if (result.degraded) {
    ctx.warn(result.warning);
    ctx.outcome.exit_code = kExitDegraded;
  }
}

void write_meta(const Context& ctx, std::size_t threads, double wall, const RunOutcome& outcome) {
  std::ofstream out(ctx.dir / "run_meta.txt", std::ios::binary);
  if (!out) return;
  out << "kind = " << to_string(ctx.scenario.kind()) << '\n'
      << "seed = " << ctx.seed << '\n'
      << "version = " << INFOCONS_VERSION << '\n'
      << "threads = " << threads << '\n'
      << "wall_time_s = " << csv::format_number(wall) << '\n'
      << "exit_code = " << outcome.exit_code << '\n';
  for (const auto& w : outcome.warnings) out << "warning = " << w << '\n';
  if (!outcome.error.empty()) out << "error = " << outcome.error << '\n';
  out << "\n# parameters\n" << ctx.scenario.canonical();
}

}  // namespace

FlowSetup build_flow_setup(const Scenario& s) {
  StateSpace space({0.0, 0.0}, {1.0, 1.0}, boundaries_of(s));
  const auto shape = s.integers("grid.shape");
  Grid grid(space, {static_cast<std::size_t>(shape[0]), static_cast<std::size_t>(shape[1])});
  DensityOfStates mu = mu_preset(s, space).density_of_states();
  VelocityField v = law_preset(s, mu);
  const auto center = s.reals("rho.center");
  const auto width = s.reals("rho.width");
  GridDensity rho0 = blob(grid, center, width);
  StepControl control;
  control.step = s.real("time.step");
  return FlowSetup{std::move(space), std::move(grid), std::move(mu), std::move(v), std::move(rho0), control};
}

RunOutcome run(const Scenario& scenario, const RunOptions& options, std::ostream& log) {
  RunOutcome outcome;
  const auto started = std::chrono::steady_clock::now();
  const std::size_t threads =
      options.threads == 0 ? std::max<std::size_t>(1, std::thread::hardware_concurrency()) : options.threads;
  const Executor executor(threads);
  const std::uint64_t seed = options.seed ? *options.seed : static_cast<std::uint64_t>(scenario.integer("seed"));
  const std::filesystem::path dir = options.out_dir ? *options.out_dir : std::filesystem::path(scenario.text("output.dir"));

  Context ctx{scenario, dir, seed, executor, log, options.quiet, outcome};
  const std::string kind(to_string(scenario.kind()));
  try {
    std::filesystem::create_directories(dir);
    switch (scenario.kind()) {
      case ScenarioKind::discrete_check: run_discrete(ctx); break;
      case ScenarioKind::flow_demo: run_flow_demo(ctx); break;
      case ScenarioKind::htheorem: run_htheorem(ctx); break;
      case ScenarioKind::hilbert_demo: run_hilbert(ctx); break;
      case ScenarioKind::relax: run_relax(ctx); break;
    }
  } catch (const std::exception& e) {
    outcome.exit_code = kExitError;
    outcome.error = kind + ": " + e.what();
    log << "error: " << outcome.error << '\n';
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::error_code ec;
  if (std::filesystem::is_directory(dir, ec)) write_meta(ctx, threads, wall, outcome);
  return outcome;
}

}  // namespace infocons
