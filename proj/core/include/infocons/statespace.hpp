#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace infocons {

inline constexpr double kDefaultNormalizationTolerance = 1e-8;

enum class Boundary { periodic, reflecting, absorbing_forbidden };

std::string_view to_string(Boundary b) noexcept;
Boundary parse_boundary(std::string_view text);

/// Rectangular state space [lo, hi] in R^n with a boundary rule per axis.
class StateSpace {
 public:
  StateSpace(std::vector<double> lo, std::vector<double> hi, std::vector<Boundary> boundary);
  StateSpace(std::vector<double> lo, std::vector<double> hi, Boundary boundary = Boundary::reflecting);

  static StateSpace unit_box(std::size_t dim, Boundary boundary = Boundary::reflecting);

  std::size_t dim() const noexcept { return lo_.size(); }
  double lo(std::size_t axis) const { return lo_[axis]; }
  double hi(std::size_t axis) const { return hi_[axis]; }
  double width(std::size_t axis) const { return hi_[axis] - lo_[axis]; }
  Boundary boundary(std::size_t axis) const { return boundary_[axis]; }
  std::span<const double> lower() const noexcept { return lo_; }
  std::span<const double> upper() const noexcept { return hi_; }
  double volume() const noexcept;

  /// Closed-box membership.
  bool contains(std::span<const double> x) const;

  /// Wraps periodic axes into [lo, hi) and mirrors across reflecting walls.
  /// Returns false if the point left the box through an absorbing-forbidden axis.
  bool apply_boundary(std::span<double> x) const;

  /// Throws BoundaryError if any axis is absorbing-forbidden.
  void require_supported() const;

  bool operator==(const StateSpace&) const = default;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<Boundary> boundary_;
};

/// Regular cell-centred grid over a StateSpace. Flat indices are row-major
/// (the last axis varies fastest).
class Grid {
 public:
  Grid(StateSpace space, std::vector<std::size_t> shape);

  const StateSpace& space() const noexcept { return space_; }
  std::size_t dim() const noexcept { return shape_.size(); }
  std::span<const std::size_t> shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return size_; }
  double spacing(std::size_t axis) const { return spacing_[axis]; }
  double cell_volume() const noexcept { return cell_volume_; }

  double center(std::size_t axis, std::size_t i) const {
    return space_.lo(axis) + (static_cast<double>(i) + 0.5) * spacing_[axis];
  }
  void center(std::size_t flat, std::span<double> out) const;
  std::vector<double> center(std::size_t flat) const;

  std::size_t flat_index(std::span<const std::size_t> idx) const;
  void unravel(std::size_t flat, std::span<std::size_t> idx) const;

  /// Cell containing x; points on the upper wall belong to the last cell.
  std::optional<std::size_t> locate(std::span<const double> x) const;

  /// Same space and shape.
  bool same_layout(const Grid& other) const { return shape_ == other.shape_ && space_ == other.space_; }

  /// Every axis split `factor` times finer.
  Grid refined(std::size_t factor) const;

 private:
  StateSpace space_;
  std::vector<std::size_t> shape_;
  std::vector<std::size_t> strides_;
  std::vector<double> spacing_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

/// Subset of grid cells.
class CellMask {
 public:
  explicit CellMask(Grid grid, bool value = false);

  static CellMask all(const Grid& grid) { return CellMask(grid, true); }
  static CellMask where(const Grid& grid, const std::function<bool(std::span<const double>)>& pred);
  /// Cells whose centres lie in the closed box [lo, hi].
  static CellMask box(const Grid& grid, std::span<const double> lo, std::span<const double> hi);
  static CellMask from_indices(const Grid& grid, std::span<const std::size_t> cells);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v = true) { bits_[i] = v ? 1 : 0; }
  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }

  CellMask complement() const;
  CellMask operator|(const CellMask& other) const;
  CellMask operator&(const CellMask& other) const;
  bool disjoint(const CellMask& other) const;

 private:
  void require_same(const CellMask& other) const;

  Grid grid_;
  std::vector<std::uint8_t> bits_;
};

/// Nonnegative, unit-mass density sampled at cell centres.
class GridDensity {
 public:
  /// Validates nonnegativity, finiteness and |mass - 1| <= tolerance.
  GridDensity(Grid grid, std::vector<double> values, double tolerance = kDefaultNormalizationTolerance);

  /// Validates nonnegativity and finiteness, then rescales to unit mass.
  static GridDensity normalized(Grid grid, std::vector<double> values);
  static GridDensity from_function(const Grid& grid,
                                   const std::function<double(std::span<const double>)>& f);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  /// Multilinear interpolation between cell centres.
  double interpolate(std::span<const double> x) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Deterministic pairwise summation of f(0..n-1).
template <class F>
double pairwise_reduce(std::size_t begin, std::size_t end, const F& f) {
  constexpr std::size_t kBlock = 128;
  if (end - begin <= kBlock) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += f(i);
    return s;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_reduce(begin, mid, f) + pairwise_reduce(mid, end, f);
}

double pairwise_sum(std::span<const double> values);

/// Multilinear interpolation of cell-centred samples at x. Periodic axes
/// wrap; other axes clamp to the outermost centres.
double interpolate(const Grid& grid, std::span<const double> values, std::span<const double> x);

/// Midpoint-rule integral of a field sampled at cell centres, optionally
/// restricted to a region.
double quadrature(const Grid& grid, std::span<const double> field, const CellMask* region = nullptr);
double quadrature(const GridDensity& density, const CellMask* region = nullptr);

/// Grid-sampled density of states at one time. `density` is normalized on the
/// grid; `raw_mass` is the midpoint integral of the evaluator before rescaling.
struct MuSnapshot {
  GridDensity density;
  double raw_mass;
  double t;
};

/// Density of states mu(x, t): nonnegative, unit mass at every t.
class DensityOfStates {
 public:
  using Evaluator = std::function<double(std::span<const double>, double)>;

  explicit DensityOfStates(Evaluator evaluator, bool time_dependent = false,
                           double tolerance = kDefaultNormalizationTolerance);

  /// Throws InvalidDensityError for negative or non-finite values.
  double operator()(std::span<const double> x, double t = 0.0) const;

  bool time_dependent() const noexcept { return time_dependent_; }
  double tolerance() const noexcept { return tolerance_; }

  /// Cached snapshot on `grid` at time t (t ignored for static mu).
  std::shared_ptr<const MuSnapshot> snapshot(const Grid& grid, double t = 0.0) const;

 private:
  struct Cache;

  Evaluator evaluator_;
  bool time_dependent_;
  double tolerance_;
  std::shared_ptr<Cache> cache_;
};

/// N_omega: number of states (proportion of all states) in `region`.
double state_count(const CellMask& region, const DensityOfStates& mu, double t = 0.0);

/// Density mu / N_omega on `region`, zero elsewhere.
GridDensity uniform_on(const CellMask& region, const DensityOfStates& mu, double t = 0.0);

/// One-dimensional normalized profile on an interval; `cdf` may be empty.
struct AxisProfile {
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
};

/// Product density mu(x) = prod_i f_i(x_i). Presets have closed-form or
/// numerically tabulated cumulative distributions so that box masses are
/// available independently of grid quadrature.
class SeparableDensity {
 public:
  SeparableDensity(StateSpace space, std::vector<AxisProfile> axes);

  const StateSpace& space() const noexcept { return space_; }
  double operator()(std::span<const double> x) const;
  /// Exact mass of the box [lo, hi] (intersected with the space).
  double box_mass(std::span<const double> lo, std::span<const double> hi) const;
  DensityOfStates density_of_states(double tolerance = kDefaultNormalizationTolerance) const;

 private:
  StateSpace space_;
  std::vector<AxisProfile> axes_;
};

namespace profiles {
AxisProfile uniform(double lo, double hi);
/// pdf proportional to exp(rate * x).
AxisProfile exponential_tilt(double lo, double hi, double rate);
/// Gaussian truncated to [lo, hi].
AxisProfile gaussian(double lo, double hi, double center, double sigma);
/// pdf proportional to (x - lo): the linear ramp.
AxisProfile ramp(double lo, double hi);
/// Periodic von Mises profile: pdf proportional to exp(kappa cos(2 pi (x - lo)/L - phase)).
AxisProfile von_mises(double lo, double hi, double kappa, double phase = 0.0);
}  // namespace profiles

/// CSV layout: line 1 names the header fields, line 2 holds
/// `dim,shape...,lo...,hi...`, then one line per grid row (leading indices
/// fixed, last axis varying along the line) in row-major order.
void write_grid_csv(std::ostream& out, const Grid& grid, std::span<const double> values);
GridDensity read_grid_density_csv(std::istream& in, Boundary boundary = Boundary::reflecting);

}  // namespace infocons
