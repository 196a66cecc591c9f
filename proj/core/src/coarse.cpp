#include "infocons/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "infocons/csv.hpp"
#include "infocons/errors.hpp"

namespace infocons {

namespace {

Grid coarse_grid_of(const Grid& fine, std::span<const std::size_t> factor) {
  if (factor.size() != fine.dim()) throw DimensionError("one coarse-graining factor per axis required");
  std::vector<std::size_t> shape(fine.dim());
  for (std::size_t a = 0; a < fine.dim(); ++a) {
    if (factor[a] == 0 || fine.shape()[a] % factor[a] != 0)
      throw DimensionError("coarse-graining factor " + std::to_string(factor[a]) + " does not divide axis " +
                           std::to_string(a) + " of size " + std::to_string(fine.shape()[a]));
    shape[a] = fine.shape()[a] / factor[a];
  }
  return Grid(fine.space(), std::move(shape));
}

}  // namespace

CoarseGraining::CoarseGraining(Grid fine, std::vector<std::size_t> factor)
    : fine_(std::move(fine)), coarse_(coarse_grid_of(fine_, factor)), factor_(std::move(factor)) {
  fine_to_coarse_.resize(fine_.size());
  std::vector<std::size_t> idx(fine_.dim());
  for (std::size_t i = 0; i < fine_.size(); ++i) {
    fine_.unravel(i, idx);
    for (std::size_t a = 0; a < idx.size(); ++a) idx[a] /= factor_[a];
    fine_to_coarse_[i] = coarse_.flat_index(idx);
  }
}

std::size_t CoarseGraining::coarse_cell(std::size_t fine_cell) const { return fine_to_coarse_.at(fine_cell); }

std::vector<double> CoarseGraining::average(std::span<const double> fine_values) const {
  if (fine_values.size() != fine_.size()) throw DimensionError("field does not live on the fine grid");
  std::vector<double> sums(coarse_.size(), 0.0);
  for (std::size_t i = 0; i < fine_values.size(); ++i) sums[fine_to_coarse_[i]] += fine_values[i];
  std::size_t per_cell = 1;
  for (auto f : factor_) per_cell *= f;
  for (auto& s : sums) s /= static_cast<double>(per_cell);
  return sums;
}

std::vector<double> CoarseGraining::prolong(std::span<const double> coarse_values) const {
  if (coarse_values.size() != coarse_.size()) throw DimensionError("field does not live on the coarse grid");
  std::vector<double> out(fine_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coarse_values[fine_to_coarse_[i]];
  return out;
}

GridDensity coarse_grain(const GridDensity& rho, const CoarseGraining& cg) {
  if (!rho.grid().same_layout(cg.fine())) throw DimensionError("density does not live on the fine grid");
  return GridDensity(cg.coarse(), cg.average(rho.values()));
}

GridDensity smear(const GridDensity& rho, const CoarseGraining& cg) {
  if (!rho.grid().same_layout(cg.fine())) throw DimensionError("density does not live on the fine grid");
  return GridDensity(cg.fine(), cg.prolong(cg.average(rho.values())));
}

InfoValue coarse_info(const GridDensity& rho, const GridDensity& mu, const CoarseGraining& cg) {
  return info(coarse_grain(rho, cg), coarse_grain(mu, cg));
}

InfoValue coarse_info(const GridDensity& rho, const DensityOfStates& mu, const CoarseGraining& cg, double t) {
  return coarse_info(rho, mu.snapshot(cg.fine(), t)->density, cg);
}

CoarseInfoChange coarse_info_change(const GridDensity& rho_t, const GridDensity& rho_0, const DensityOfStates& mu,
                                    const CoarseGraining& cg, double t, double t0, double premise_tolerance) {
  const auto& mu0 = mu.snapshot(cg.fine(), t0)->density;
  const auto& mut = mu.snapshot(cg.fine(), t)->density;

  CoarseInfoChange out;
  const InfoValue fine0 = info(rho_0, mu0);
  const InfoValue coarse0 = coarse_info(rho_0, mu0, cg);
  const InfoValue coarse_t = coarse_info(rho_t, mut, cg);
  if (!coarse0.finite || !coarse_t.finite) {
    out.delta = coarse_t.finite ? -std::numeric_limits<double>::infinity()
                                : std::numeric_limits<double>::infinity();
  } else {
    out.delta = coarse_t.value - coarse0.value;
  }

  const double scale = std::max(std::abs(fine0.value), 1e-12);
  out.info_gap = fine0.finite && coarse0.finite ? std::abs(coarse0.value - fine0.value) / scale
                                                : std::numeric_limits<double>::infinity();
  const auto mu_bar = cg.prolong(cg.average(mu0.values()));
  double gap = 0.0;
  for (std::size_t i = 0; i < mu_bar.size(); ++i) {
    const double m = mu0.values()[i];
    if (m > 0.0) gap = std::max(gap, std::abs(mu_bar[i] - m) / m);
  }
  out.mu_gap = gap;
  out.premise_holds = out.info_gap <= premise_tolerance && out.mu_gap <= premise_tolerance;
  if (!out.premise_holds) {
    out.warning = "coarse cells do not resolve the initial state: information gap " +
                  csv::format_number(out.info_gap) + ", mu gap " + csv::format_number(out.mu_gap);
  }
  return out;
}

std::vector<HTheoremRow> htheorem_run(const FlowScenario& scenario, const CoarseGraining& cg,
                                      std::span<const double> times, const Executor& executor) {
  if (!scenario.rho0.grid().same_layout(cg.fine())) throw DimensionError("scenario grid and coarse graining differ");
  std::vector<HTheoremRow> rows;
  rows.reserve(times.size());
  for (double t : times) {
    const EvolveResult evolved = evolve_density(scenario.rho0, scenario.velocity, scenario.mu, t, scenario.step, executor);
    const auto& mu_t = scenario.mu.snapshot(cg.fine(), t)->density;
    HTheoremRow row;
    row.t = t;
    row.fine_info = info(evolved.density, mu_t).value;
    row.coarse_info = coarse_info(evolved.density, mu_t, cg).value;
    row.normalization_drift = evolved.normalization_drift;
    rows.push_back(row);
  }
  return rows;
}

double noise_floor(std::span<const HTheoremRow> rows) {
  if (rows.empty()) return 0.0;
  const auto& first = rows.front();
  double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                 std::max({std::abs(first.fine_info), std::abs(first.coarse_info), 1.0});
  for (const auto& r : rows) {
    floor = std::max(floor, std::abs(r.fine_info - first.fine_info));
    floor = std::max(floor, std::abs(r.coarse_info - first.coarse_info));
  }
  return floor;
}

}  // namespace infocons
