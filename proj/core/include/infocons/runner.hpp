#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "infocons/flow.hpp"
#include "infocons/scenario.hpp"
#include "infocons/statespace.hpp"

namespace infocons {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitDegraded = 2 };

struct RunOptions {
  /// Overrides the scenario's output.dir.
  std::optional<std::filesystem::path> out_dir;
  /// Overrides the scenario's seed.
  std::optional<std::uint64_t> seed;
  /// Worker threads; 0 picks the hardware concurrency.
  std::size_t threads = 1;
  bool quiet = false;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> files;
  std::string error;
};

/// Grid-based flow setup shared by flow-demo and htheorem scenarios.
struct FlowSetup {
  StateSpace space;
  Grid grid;
  DensityOfStates mu;
  VelocityField velocity;
  GridDensity rho0;
  StepControl control;
};

FlowSetup build_flow_setup(const Scenario& scenario);

/// Runs a scenario and writes its artifacts. Messages go to `log` unless
/// quiet; errors are always reported there. Never throws for scenario or
/// numerical failures: they become exit code 1.
RunOutcome run(const Scenario& scenario, const RunOptions& options, std::ostream& log);

}  // namespace infocons
