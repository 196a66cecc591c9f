#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "infocons/entropy.hpp"
#include "infocons/flow.hpp"
#include "infocons/parallel.hpp"
#include "infocons/statespace.hpp"

namespace infocons {

/// Groups `factor[a]` fine cells per coarse cell along each axis.
class CoarseGraining {
 public:
  CoarseGraining(Grid fine, std::vector<std::size_t> factor);

  const Grid& fine() const noexcept { return fine_; }
  const Grid& coarse() const noexcept { return coarse_; }
  std::span<const std::size_t> factor() const noexcept { return factor_; }

  std::size_t coarse_cell(std::size_t fine_cell) const;

  /// Cell averages on the coarse grid.
  std::vector<double> average(std::span<const double> fine_values) const;
  /// Piecewise-constant lift of coarse values back to the fine grid.
  std::vector<double> prolong(std::span<const double> coarse_values) const;

 private:
  Grid fine_;
  Grid coarse_;
  std::vector<std::size_t> factor_;
  std::vector<std::size_t> fine_to_coarse_;
};

/// Cell-averaged density on the coarse grid. Mass is preserved exactly up to
/// rounding: each coarse value is the mean of its fine cells.
GridDensity coarse_grain(const GridDensity& rho, const CoarseGraining& cg);

/// The coarse-grained density expressed on the fine grid (rho bar).
GridDensity smear(const GridDensity& rho, const CoarseGraining& cg);

/// info(coarse rho, coarse mu).
InfoValue coarse_info(const GridDensity& rho, const GridDensity& mu, const CoarseGraining& cg);
InfoValue coarse_info(const GridDensity& rho, const DensityOfStates& mu, const CoarseGraining& cg, double t = 0.0);

struct CoarseInfoChange {
  /// Inf[rho_t bar] - Inf[rho_0 bar].
  double delta = 0.0;
  /// The cells resolve rho_0 and mu: coarse and fine information of rho_0
  /// agree and mu bar matches mu, both within the premise tolerance.
  bool premise_holds = true;
  double info_gap = 0.0;
  double mu_gap = 0.0;
  std::string warning;
};

/// Coarse information change between two snapshots. A violated premise is
/// reported in the result, not thrown.
CoarseInfoChange coarse_info_change(const GridDensity& rho_t, const GridDensity& rho_0, const DensityOfStates& mu,
                                    const CoarseGraining& cg, double t, double t0 = 0.0,
                                    double premise_tolerance = 1e-3);

/// Everything needed to evolve a density under a deterministic law.
struct FlowScenario {
  GridDensity rho0;
  VelocityField velocity;
  DensityOfStates mu;
  StepControl step;
};

struct HTheoremRow {
  double t = 0.0;
  double fine_info = 0.0;
  double coarse_info = 0.0;
  double normalization_drift = 0.0;
};

/// Fine and coarse information of the evolved density at each snapshot time.
std::vector<HTheoremRow> htheorem_run(const FlowScenario& scenario, const CoarseGraining& cg,
                                      std::span<const double> times, const Executor& executor = serial_executor());

/// Largest excursion of fine or coarse information from its initial value in
/// a run (normally the v = 0 null run), never below a rounding floor of
/// 64 machine epsilons relative to the initial information.
double noise_floor(std::span<const HTheoremRow> rows);

}  // namespace infocons
