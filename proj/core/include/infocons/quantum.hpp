#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "infocons/flow.hpp"
#include "infocons/parallel.hpp"
#include "infocons/statespace.hpp"

namespace infocons::quantum {

// Particle in the unit square with hard walls, hbar = mass = 1.

using Complex = std::complex<double>;

/// Box eigenmode phi_mn(x, y) = 2 sin(m pi x) sin(n pi y) with amplitude c_mn.
struct Mode {
  int m = 1;
  int n = 1;
  Complex amplitude{1.0, 0.0};

  /// E_mn = pi^2 (m^2 + n^2) / 2.
  double energy() const noexcept;
};

/// 2 pi / E_11.
double box_period() noexcept;

/// Mode indices used for an M-mode superposition: the k x k block when
/// M = k^2, otherwise the M lowest energies (ties broken by m).
std::vector<std::pair<int, int>> default_mode_indices(std::size_t count);

class ModeSet2D {
 public:
  /// Throws unless m, n >= 1 and sum |c|^2 = 1 within 1e-12.
  explicit ModeSet2D(std::vector<Mode> modes);

  static ModeSet2D single(int m, int n);
  /// Equal amplitudes 1/sqrt(M) with the given phases (zero if empty).
  static ModeSet2D equal_superposition(const std::vector<std::pair<int, int>>& indices,
                                       std::span<const double> phases = {});
  /// default_mode_indices(count) with equal amplitudes and seeded phases.
  static ModeSet2D random_phases(std::size_t count, std::uint64_t seed);

  std::span<const Mode> modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return modes_.size(); }
  int max_index() const noexcept { return max_index_; }
  double norm() const;

  /// c_k exp(-i E_k t).
  std::vector<Complex> coefficients_at(double t) const;

 private:
  std::vector<Mode> modes_;
  int max_index_ = 1;
};

struct WaveSample {
  Complex psi;
  Complex dpsi_dx;
  Complex dpsi_dy;
};

/// psi(x, t) = sum_k c_k exp(-i E_k t) phi_k(x).
class WaveField {
 public:
  explicit WaveField(ModeSet2D modes);

  const ModeSet2D& modes() const noexcept { return modes_; }

  Complex operator()(double x, double y, double t) const;
  double density(double x, double y, double t) const { return std::norm((*this)(x, y, t)); }

  /// psi and its gradient given the time-evolved coefficients.
  WaveSample sample(double x, double y, std::span<const Complex> coefficients) const;
  WaveSample sample(double x, double y, double t) const;

 private:
  ModeSet2D modes_;
};

/// The unit square with reflecting walls.
StateSpace box_space();

/// mu(x, t) = |psi(x, t)|^2 as a time-dependent density of states.
DensityOfStates born_density_of_states(const ModeSet2D& modes);

/// |psi(., t)|^2 sampled on `grid`, normalized.
GridDensity born_density(const ModeSet2D& modes, const Grid& grid, double t);

struct CoefficientFlowCheck {
  /// Trace of the Jacobian of cdot = -i E c in (Re c, Im c) coordinates.
  double analytic_divergence = 0.0;
  /// Central-difference estimate of the same trace at the current point.
  double fd_divergence = 0.0;
  /// |sum |c(t)|^2 - 1| under exact phase evolution.
  double norm_drift = 0.0;
};

/// Treats (Re c_k, Im c_k) as 2M real coordinates moving under Schrodinger
/// evolution and checks that the flow is divergence free.
CoefficientFlowCheck coefficient_flow_divergence(const ModeSet2D& modes, double t = 0.0, double h = 1e-4);

/// Rates of change of the 2M real coordinates (Re c_0, Im c_0, Re c_1, ...).
std::vector<double> coefficient_velocity(std::span<const double> coordinates, std::span<const double> energies);

/// de Broglie-Bohm guidance v = Im(grad psi / psi). Throws
/// NodeProximityError if |psi| <= node_floor.
std::array<double, 2> guidance_velocity(const WaveField& field, double x, double y, double t,
                                        double node_floor = 1e-6);

/// guidance_velocity as a VelocityField (for integrate() and friends).
VelocityField guidance_field(const WaveField& field, double node_floor = 1e-6);

enum class InitialEnsemble { ground_state, born };

struct RelaxationConfig {
  std::size_t trajectories = 100000;
  /// Ten box periods.
  double t_final = 10.0 * 2.0 / 3.14159265358979323846;
  std::size_t snapshots = 20;
  double step = 2e-3;
  std::array<std::size_t, 2> fine_shape{64, 64};
  std::array<std::size_t, 2> coarse_shape{16, 16};
  InitialEnsemble initial = InitialEnsemble::ground_state;
  double node_floor = 1e-6;
  double min_step = 1e-6;
  double speed_cap = 1e3;
  /// Largest displacement per step before a step is split.
  double max_displacement = 0.03;
  std::uint64_t seed = 0;
  /// Lost fraction above which the run is flagged degraded.
  double degraded_fraction = 0.01;
};

struct RelaxationRow {
  double t = 0.0;
  double coarse_h = 0.0;
  double lost_fraction = 0.0;
};

struct RelaxationResult {
  std::vector<RelaxationRow> series;
  /// Flattened (x, y) pairs.
  std::vector<double> ensemble_initial;
  std::vector<double> ensemble_final;
  /// 1 for trajectories that needed the speed cap near a node.
  std::vector<std::uint8_t> lost;
  GridDensity born_final;
  std::size_t lost_count = 0;
  double lost_fraction = 0.0;
  bool degraded = false;
  std::string warning;
};

/// Coarse H-function sum rho_bar log(rho_bar / mu_bar) dV between the
/// histogram of the kept points and the coarse-grained Born density.
double coarse_h(std::span<const double> points, std::span<const std::uint8_t> lost, const GridDensity& mu_coarse);

/// Integrates an ensemble under the guidance law and records the coarse
/// H-function at evenly spaced snapshots (t = 0 included).
RelaxationResult relaxation_experiment(const ModeSet2D& modes, const RelaxationConfig& config,
                                       const Executor& executor = serial_executor());

}  // namespace infocons::quantum
