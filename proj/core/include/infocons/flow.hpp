#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "infocons/parallel.hpp"
#include "infocons/statespace.hpp"

namespace infocons {

/// A law of motion xdot = v(x, t).
class VelocityField {
 public:
  using Evaluator = std::function<void(std::span<const double> x, double t, std::span<double> v)>;

  VelocityField(std::size_t dim, Evaluator evaluator);

  static VelocityField zero(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }

  /// Evaluates v(x, t); throws infocons::Error on non-finite output.
  void operator()(std::span<const double> x, double t, std::span<double> v) const;
  std::vector<double> operator()(std::span<const double> x, double t) const;

 private:
  std::size_t dim_;
  Evaluator evaluator_;
};

namespace fields {
/// Rigid rotation about (cx, cy): v = omega (-(y - cy), x - cx).
VelocityField rotation(double omega = 1.0, double cx = 0.0, double cy = 0.0);
/// Uniform expansion v = rate * x in any dimension (compresses information).
VelocityField expansion(std::size_t dim, double rate = 1.0);
/// Planar shear v = (rate * y, 0).
VelocityField shear(double rate = 1.0);
}  // namespace fields

/// Planar stream function s(x, y) with its gradient.
struct StreamFunction {
  std::function<double(double, double)> value;
  std::function<std::array<double, 2>(double, double)> gradient;
};

namespace streams {
StreamFunction constant(double c = 0.0);
/// s = a (x^2 + y^2) / 2.
StreamFunction quadratic(double a = 1.0);
/// s = a * y.
StreamFunction linear_y(double a = 1.0);
/// s = a sin(2 pi kx x) sin(2 pi ky y) / (2 pi).
StreamFunction cellular(double a, int kx = 1, int ky = 1);
/// s = a sin(2 pi y) / (2 pi): a sheared band flow.
StreamFunction shear_wave(double a);
/// s = a sin(2 pi (x + y)) / (2 pi).
StreamFunction diagonal_wave(double a);
/// s = a (sin(2 pi x) + cos(2 pi y)) / (2 pi).
StreamFunction mixed_wave(double a);
}  // namespace streams

/// v = (1/mu) (ds/dy, -ds/dx); div(mu v) = 0 wherever s is C^2. Two
/// dimensions only. Throws SingularLawError where mu <= mu_floor.
VelocityField stream_field(const DensityOfStates& mu, StreamFunction s, double mu_floor = 1e-12);

/// Central-difference estimate of div(mu v) at (x, t). Periodic axes wrap
/// the stencil; on other axes x must lie at least h inside the box.
double mu_divergence(const VelocityField& v, const DensityOfStates& mu, const StateSpace& space,
                     std::span<const double> x, double t, double h);

struct StepControl {
  double step = 1e-3;
  bool adaptive = false;
  /// Per-step error bound (max norm) for adaptive stepping.
  double tolerance = 1e-10;
  double min_step = 1e-9;
  double speed_cap = std::numeric_limits<double>::infinity();
  /// Wrap periodic axes and reflect at reflecting walls after every step.
  /// When false only periodic axes are wrapped and the caller checks the end
  /// point (used for backward feet).
  bool confine = true;
  std::size_t record_every = 1;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> points;
  std::vector<double> start;
};

/// Classical fourth-order Runge-Kutta from t0 to t1 (t1 < t0 integrates
/// backward). Fixed steps divide the span evenly; adaptive steps use step
/// doubling.
/// Throws IntegrationAborted (velocity failure, with last good state),
/// StiffnessError (speed above cap) or BoundaryError (absorbing axis left).
Trajectory integrate(const VelocityField& v, const StateSpace& space, std::span<const double> x0, double t0,
                     double t1, const StepControl& control = {});

/// End point of integrate() without recording.
std::vector<double> flow_map(const VelocityField& v, const StateSpace& space, std::span<const double> x0, double t0,
                             double t1, const StepControl& control = {});

/// det(d x(t1) / d x(t0)) by central differences of the flow map. For a
/// mu-incompressible law this equals mu(x0) / mu(x(t1)).
double flow_jacobian_determinant(const VelocityField& v, const StateSpace& space, std::span<const double> x0,
                                 double t0, double t1, double h = 1e-5, const StepControl& control = {});

/// Starts integrated on a shared fixed-step time grid.
class TrajectoryEnsemble {
 public:
  TrajectoryEnsemble(StateSpace space, std::vector<std::vector<double>> starts, StepControl control);

  std::size_t size() const noexcept { return starts_.size(); }
  const StepControl& control() const noexcept { return control_; }

  std::vector<Trajectory> integrate(const VelocityField& v, double t0, double t1,
                                    const Executor& executor = serial_executor()) const;

 private:
  StateSpace space_;
  std::vector<std::vector<double>> starts_;
  StepControl control_;
};

struct EvolveResult {
  GridDensity density;
  /// |mass - 1| before renormalization.
  double normalization_drift;
};

/// Semi-Lagrangian evolution: every cell centre x is traced back to its foot
/// x0 at time 0 and rho(x, t) = mu(x, t) rho0(x0) / mu(x0, 0), with rho0 and
/// mu interpolated multilinearly at the foot. The result is renormalized and
/// the drift reported. Throws BoundaryError if a foot lies outside the box.
EvolveResult evolve_density(const GridDensity& rho0, const VelocityField& v, const DensityOfStates& mu, double t,
                            const StepControl& control = {}, const Executor& executor = serial_executor());

struct VolumeCheck {
  double n_before = 0.0;
  double n_after = 0.0;
  std::size_t samples = 0;
};

/// Monte-Carlo state counts of `region` at time 0 and of its image at time t.
/// Points are drawn from mu and traced back from t to 0; the image count is
/// the fraction whose foot lands in the region.
VolumeCheck liouville_volume_check(const VelocityField& v, const DensityOfStates& mu, const CellMask& region,
                                   double t, std::size_t n_samples, std::uint64_t seed,
                                   const StepControl& control = {}, const Executor& executor = serial_executor());

}  // namespace infocons
