#pragma once

#include <cstddef>
#include <span>

#include "infocons/statespace.hpp"

namespace infocons {

/// Information content in nats. `finite == false` flags support of rho where
/// mu vanishes; `value` is then +infinity.
struct InfoValue {
  double value = 0.0;
  bool finite = true;
};

/// Inf[rho] = integral of rho log(rho / mu), the negative Jaynes entropy.
/// Cells with rho = 0 contribute nothing.
InfoValue info(const GridDensity& rho, const GridDensity& mu);
InfoValue info(const GridDensity& rho, const DensityOfStates& mu, double t = 0.0);

/// |log N_omega| for the uniform distribution on `region`.
double boltzmann_info(const CellMask& region, const DensityOfStates& mu, double t = 0.0);

/// Density concentrated in one cell: the grid's stand-in for a point mass.
GridDensity single_cell_density(const Grid& grid, std::size_t cell);

/// info() of a single-cell density. The value is finite on any grid and grows
/// like |log cell_volume| under refinement, tracking the divergence of the
/// information of a point mass. Throws InvalidDensityError unless `rho` is
/// supported on exactly one cell.
InfoValue info_delta_proxy(const GridDensity& rho, const DensityOfStates& mu, double t = 0.0);

/// Discrete relative information sum_i p_i log(p_i / q_i) with the 0 log 0 = 0
/// convention; +infinity when p_i > 0 and q_i = 0.
double relative_info(std::span<const double> p, std::span<const double> q);

}  // namespace infocons
