#include "infocons/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "infocons/errors.hpp"

namespace infocons {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sum of p log(p/q) over all entries; flags p > 0 on q = 0.
InfoValue relative_sum(std::span<const double> p, std::span<const double> q) {
  bool infinite = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::isnan(p[i]) || std::isnan(q[i])) throw InvalidDensityError("NaN in information input");
    if (p[i] > 0.0 && q[i] <= 0.0) infinite = true;
  }
  if (infinite) return {kInf, false};
  const double s = pairwise_reduce(0, p.size(), [&](std::size_t i) {
    return p[i] > 0.0 ? p[i] * std::log(p[i] / q[i]) : 0.0;
  });
  return {s, true};
}

}  // namespace

InfoValue info(const GridDensity& rho, const GridDensity& mu) {
  if (!rho.grid().same_layout(mu.grid())) throw DimensionError("rho and mu live on different grids");
  InfoValue v = relative_sum(rho.values(), mu.values());
  if (v.finite) v.value = std::max(0.0, v.value * rho.grid().cell_volume());
  return v;
}

InfoValue info(const GridDensity& rho, const DensityOfStates& mu, double t) {
  return info(rho, mu.snapshot(rho.grid(), t)->density);
}

double boltzmann_info(const CellMask& region, const DensityOfStates& mu, double t) {
  const double n = state_count(region, mu, t);
  if (!(n > 0.0)) throw EmptySupportError("region contains no states (N = 0)");
  return std::abs(std::log(n));
}

GridDensity single_cell_density(const Grid& grid, std::size_t cell) {
  if (cell >= grid.size()) throw DimensionError("cell index out of range");
  std::vector<double> values(grid.size(), 0.0);
  values[cell] = 1.0 / grid.cell_volume();
  return GridDensity(grid, std::move(values));
}

InfoValue info_delta_proxy(const GridDensity& rho, const DensityOfStates& mu, double t) {
  const auto support = std::count_if(rho.values().begin(), rho.values().end(), [](double v) { return v > 0.0; });
  if (support != 1) throw InvalidDensityError("delta proxy needs a density supported on a single cell");
  return info(rho, mu, t);
}

double relative_info(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionError("relative_info operands differ in length");
  return relative_sum(p, q).value;
}

}  // namespace infocons
