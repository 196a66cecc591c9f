#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "infocons/runner.hpp"
#include "infocons/scenario.hpp"

namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

struct Globals {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  bool quiet = false;
};

struct Command {
  infocons::ScenarioKind kind;
  std::string scenario_file;
  std::vector<std::string> sets;
  Pairs flags;
};

std::string kind_list() {
  std::string out;
  for (auto k : infocons::all_scenario_kinds()) out += (out.empty() ? "" : ", ") + std::string(to_string(k));
  return out;
}

infocons::Scenario build(const Command& cmd, bool generic) {
  Pairs pairs = cmd.flags;
  for (const auto& s : cmd.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw infocons::ScenarioError({{0, s, "--set expects key=value"}});
    pairs.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (cmd.scenario_file.empty()) return infocons::make_scenario(cmd.kind, pairs);

  infocons::Scenario s = infocons::load_scenario(cmd.scenario_file);
  if (!generic && s.kind() != cmd.kind)
    throw infocons::Error("scenario file is of kind " + std::string(to_string(s.kind())) + ", expected " +
                          std::string(to_string(cmd.kind)));
  std::vector<infocons::ScenarioIssue> issues;
  for (const auto& [k, v] : pairs) {
    try {
      s.set(k, v);
    } catch (const infocons::ScenarioError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  if (!issues.empty()) throw infocons::ScenarioError(std::move(issues));
  return s;
}

void print_schema(infocons::ScenarioKind kind) {
  std::cout << "kind = " << to_string(kind) << '\n';
  for (const auto& k : infocons::scenario_schema(kind)) {
    std::cout << k.key << " = " << (k.fallback ? *k.fallback : std::string("<required>")) << "    # " << k.help;
    if (!k.choices.empty()) {
      std::cout << " (";
      for (std::size_t i = 0; i < k.choices.size(); ++i) std::cout << (i ? "|" : "") << k.choices[i];
      std::cout << ')';
    }
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-conservation experiments: discrete certification, mu-incompressible flows, "
               "coarse-grained H-theorem and quantum relaxation."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(INFOCONS_CLI_VERSION));

  Globals g;
  app.add_option("--out", g.out, "Output directory (overrides output.dir)");
  app.add_option("--seed", g.seed, "Master seed (overrides the scenario seed)");
  app.add_option("--threads", g.threads, "Worker threads, 0 for all cores")->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Only print warnings and errors");

  Command cmd{infocons::ScenarioKind::relax, {}, {}, {}};
  bool generic = false;
  std::optional<infocons::ScenarioKind> schema_kind;

  auto common = [&](CLI::App* sub, infocons::ScenarioKind kind) {
    sub->fallthrough();
    sub->add_option("--scenario", cmd.scenario_file, "Scenario file (key = value lines)")->check(CLI::ExistingFile);
    sub->add_option("--set", cmd.sets, "Override a scenario key, key=value (repeatable)");
    sub->callback([&cmd, kind] { cmd.kind = kind; });
  };

  auto* run = app.add_subcommand("run", "Run a scenario file of any kind");
  std::string run_file;
  run->fallthrough();
  run->add_option("--scenario", run_file, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", cmd.sets, "Override a scenario key, key=value (repeatable)");
  run->callback([&] {
    generic = true;
    cmd.scenario_file = run_file;
  });

  auto* discrete = app.add_subcommand("discrete-check", "Certify a column-stochastic propagator");
  std::string matrix, mu;
  common(discrete, infocons::ScenarioKind::discrete_check);
  discrete->add_option("--matrix", matrix, "CSV with n rows of n reals");
  discrete->add_option("--mu", mu, "CSV with state weights (uniform if omitted)");

  auto* flow = app.add_subcommand("flow-demo", "Evolve a density under a stream-function law");
  common(flow, infocons::ScenarioKind::flow_demo);

  auto* htheorem = app.add_subcommand("htheorem", "Fine and coarse information under a mixing flow");
  common(htheorem, infocons::ScenarioKind::htheorem);

  auto* hilbert = app.add_subcommand("hilbert-demo", "Divergence of the Schrodinger coefficient flow");
  common(hilbert, infocons::ScenarioKind::hilbert_demo);

  auto* relax = app.add_subcommand("relax", "Quantum relaxation of a trajectory ensemble");
  common(relax, infocons::ScenarioKind::relax);
  std::optional<long long> modes, trajectories;
  std::optional<std::string> t_final;
  relax->add_option("--modes", modes, "Number of box modes");
  relax->add_option("--trajectories", trajectories, "Ensemble size");
  relax->add_option("--t-final", t_final, "Final time");

  auto* schema = app.add_subcommand("schema", "Print the keys and defaults for a scenario kind");
  std::string schema_name;
  schema->add_option("kind", schema_name, "One of: " + kind_list())->required();
  schema->callback([&] {
    schema_kind = infocons::parse_scenario_kind(schema_name);
    if (!schema_kind) throw CLI::ValidationError("kind", "unknown kind '" + schema_name + "'");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : infocons::kExitError;
  }

  if (schema_kind) {
    print_schema(*schema_kind);
    return infocons::kExitOk;
  }

  if (!matrix.empty()) cmd.flags.emplace_back("matrix", matrix);
  if (!mu.empty()) cmd.flags.emplace_back("mu", mu);
  if (modes) cmd.flags.emplace_back("modes.count", std::to_string(*modes));
  if (trajectories) cmd.flags.emplace_back("trajectories", std::to_string(*trajectories));
  if (t_final) cmd.flags.emplace_back("time.t_final", *t_final);

  try {
    const infocons::Scenario scenario = build(cmd, generic);
    infocons::RunOptions options;
    if (!g.out.empty()) options.out_dir = g.out;
    options.seed = g.seed;
    options.threads = g.threads;
    options.quiet = g.quiet;
    const auto outcome = infocons::run(scenario, options, std::cerr);
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return infocons::kExitError;
  }
}
