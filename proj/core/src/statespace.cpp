#include "infocons/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>

#include "infocons/csv.hpp"
#include "infocons/errors.hpp"

namespace infocons {

std::string_view to_string(Boundary b) noexcept {
  switch (b) {
    case Boundary::periodic:
      return "periodic";
    case Boundary::reflecting:
      return "reflecting";
    case Boundary::absorbing_forbidden:
      return "absorbing-forbidden";
  }
  return "unknown";
}

Boundary parse_boundary(std::string_view text) {
  if (text == "periodic") return Boundary::periodic;
  if (text == "reflecting") return Boundary::reflecting;
  if (text == "absorbing-forbidden" || text == "absorbing") return Boundary::absorbing_forbidden;
  throw Error("unknown boundary '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// StateSpace

StateSpace::StateSpace(std::vector<double> lo, std::vector<double> hi, std::vector<Boundary> boundary)
    : lo_(std::move(lo)), hi_(std::move(hi)), boundary_(std::move(boundary)) {
  if (lo_.empty()) throw DimensionError("state space needs dim >= 1");
  if (lo_.size() != hi_.size() || lo_.size() != boundary_.size())
    throw DimensionError("state space bounds and boundary rules differ in length");
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!(std::isfinite(lo_[i]) && std::isfinite(hi_[i]) && lo_[i] < hi_[i]))
      throw DimensionError("state space axis " + std::to_string(i) + " needs finite lo < hi");
  }
}

StateSpace::StateSpace(std::vector<double> lo, std::vector<double> hi, Boundary boundary)
    : StateSpace(lo, std::move(hi), std::vector<Boundary>(lo.size(), boundary)) {}

StateSpace StateSpace::unit_box(std::size_t dim, Boundary boundary) {
  return StateSpace(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0), boundary);
}

double StateSpace::volume() const noexcept {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= width(i);
  return v;
}

bool StateSpace::contains(std::span<const double> x) const {
  if (x.size() != dim()) throw DimensionError("point dimension does not match state space");
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(x[i] >= lo_[i] && x[i] <= hi_[i])) return false;
  }
  return true;
}

bool StateSpace::apply_boundary(std::span<double> x) const {
  if (x.size() != dim()) throw DimensionError("point dimension does not match state space");
  for (std::size_t i = 0; i < dim(); ++i) {
    if (x[i] >= lo_[i] && x[i] <= hi_[i] && boundary_[i] != Boundary::periodic) continue;
    const double L = width(i);
    switch (boundary_[i]) {
      case Boundary::periodic: {
        double y = std::fmod(x[i] - lo_[i], L);
        if (y < 0) y += L;
        if (y >= L) y -= L;
        x[i] = lo_[i] + y;
        break;
      }
      case Boundary::reflecting: {
        double y = std::fmod(x[i] - lo_[i], 2.0 * L);
        if (y < 0) y += 2.0 * L;
        if (y > L) y = 2.0 * L - y;
        x[i] = lo_[i] + y;
        break;
      }
      case Boundary::absorbing_forbidden:
        return false;
    }
  }
  return true;
}

void StateSpace::require_supported() const {
  for (std::size_t i = 0; i < dim(); ++i) {
    if (boundary_[i] == Boundary::absorbing_forbidden)
      throw BoundaryError("axis " + std::to_string(i) +
                          " is absorbing-forbidden; only periodic and reflecting boxes are supported");
  }
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(StateSpace space, std::vector<std::size_t> shape)
    : space_(std::move(space)), shape_(std::move(shape)) {
  if (shape_.size() != space_.dim()) throw DimensionError("grid shape does not match state space dimension");
  strides_.assign(shape_.size(), 1);
  spacing_.resize(shape_.size());
  size_ = 1;
  cell_volume_ = 1.0;
  for (std::size_t a = shape_.size(); a-- > 0;) {
    if (shape_[a] == 0) throw DimensionError("grid shape must be positive on every axis");
    strides_[a] = size_;
    size_ *= shape_[a];
  }
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    spacing_[a] = space_.width(a) / static_cast<double>(shape_[a]);
    cell_volume_ *= spacing_[a];
  }
}

void Grid::center(std::size_t flat, std::span<double> out) const {
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    const std::size_t i = (flat / strides_[a]) % shape_[a];
    out[a] = center(a, i);
  }
}

std::vector<double> Grid::center(std::size_t flat) const {
  std::vector<double> x(dim());
  center(flat, x);
  return x;
}

std::size_t Grid::flat_index(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < shape_.size(); ++a) flat += idx[a] * strides_[a];
  return flat;
}

void Grid::unravel(std::size_t flat, std::span<std::size_t> idx) const {
  for (std::size_t a = 0; a < shape_.size(); ++a) idx[a] = (flat / strides_[a]) % shape_[a];
}

std::optional<std::size_t> Grid::locate(std::span<const double> x) const {
  if (x.size() != dim()) throw DimensionError("point dimension does not match grid");
  std::size_t flat = 0;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (!(x[a] >= space_.lo(a) && x[a] <= space_.hi(a))) return std::nullopt;
    auto i = static_cast<std::size_t>((x[a] - space_.lo(a)) / spacing_[a]);
    i = std::min(i, shape_[a] - 1);
    flat += i * strides_[a];
  }
  return flat;
}

Grid Grid::refined(std::size_t factor) const {
  std::vector<std::size_t> s = shape_;
  for (auto& n : s) n *= factor;
  return Grid(space_, std::move(s));
}

// ---------------------------------------------------------------------------
// CellMask

CellMask::CellMask(Grid grid, bool value) : grid_(std::move(grid)), bits_(grid_.size(), value ? 1 : 0) {}

CellMask CellMask::where(const Grid& grid, const std::function<bool(std::span<const double>)>& pred) {
  CellMask m(grid);
  std::vector<double> x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.center(i, x);
    m.bits_[i] = pred(x) ? 1 : 0;
  }
  return m;
}

CellMask CellMask::box(const Grid& grid, std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != grid.dim() || hi.size() != grid.dim()) throw DimensionError("box corner dimension mismatch");
  return where(grid, [&](std::span<const double> x) {
    for (std::size_t a = 0; a < x.size(); ++a)
      if (x[a] < lo[a] || x[a] > hi[a]) return false;
    return true;
  });
}

CellMask CellMask::from_indices(const Grid& grid, std::span<const std::size_t> cells) {
  CellMask m(grid);
  for (auto c : cells) {
    if (c >= grid.size()) throw DimensionError("cell index out of range");
    m.bits_[c] = 1;
  }
  return m;
}

std::size_t CellMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void CellMask::require_same(const CellMask& other) const {
  if (!grid_.same_layout(other.grid_)) throw DimensionError("masks live on different grids");
}

CellMask CellMask::complement() const {
  CellMask m(grid_);
  for (std::size_t i = 0; i < bits_.size(); ++i) m.bits_[i] = bits_[i] ? 0 : 1;
  return m;
}

CellMask CellMask::operator|(const CellMask& other) const {
  require_same(other);
  CellMask m(grid_);
  for (std::size_t i = 0; i < bits_.size(); ++i) m.bits_[i] = bits_[i] | other.bits_[i];
  return m;
}

CellMask CellMask::operator&(const CellMask& other) const {
  require_same(other);
  CellMask m(grid_);
  for (std::size_t i = 0; i < bits_.size(); ++i) m.bits_[i] = bits_[i] & other.bits_[i];
  return m;
}

bool CellMask::disjoint(const CellMask& other) const {
  require_same(other);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && other.bits_[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Sums, quadrature, interpolation

double pairwise_sum(std::span<const double> values) {
  return pairwise_reduce(0, values.size(), [&](std::size_t i) { return values[i]; });
}

double quadrature(const Grid& grid, std::span<const double> field, const CellMask* region) {
  if (field.size() != grid.size()) throw DimensionError("field size does not match grid");
  if (region == nullptr) return pairwise_sum(field) * grid.cell_volume();
  if (region->size() != grid.size() || !region->grid().same_layout(grid))
    throw DimensionError("region mask shape does not match grid");
  const CellMask& m = *region;
  return pairwise_reduce(0, field.size(), [&](std::size_t i) { return m[i] ? field[i] : 0.0; }) *
         grid.cell_volume();
}

double quadrature(const GridDensity& density, const CellMask* region) {
  return quadrature(density.grid(), density.values(), region);
}

double interpolate(const Grid& grid, std::span<const double> values, std::span<const double> x) {
  const std::size_t d = grid.dim();
  if (x.size() != d) throw DimensionError("interpolation point dimension mismatch");
  if (values.size() != grid.size()) throw DimensionError("interpolation field size mismatch");
  constexpr std::size_t kMaxDim = 8;
  if (d > kMaxDim) throw DimensionError("interpolation supports at most 8 axes");

  std::size_t lo_idx[kMaxDim];
  std::size_t hi_idx[kMaxDim];
  double frac[kMaxDim];
  const auto& space = grid.space();
  for (std::size_t a = 0; a < d; ++a) {
    const auto n = static_cast<long long>(grid.shape()[a]);
    const double u = (x[a] - space.lo(a)) / grid.spacing(a) - 0.5;
    auto i0 = static_cast<long long>(std::floor(u));
    double f = u - static_cast<double>(i0);
    long long i1 = i0 + 1;
    if (space.boundary(a) == Boundary::periodic) {
      i0 = ((i0 % n) + n) % n;
      i1 = ((i1 % n) + n) % n;
    } else if (i0 < 0) {
      i0 = i1 = 0;
      f = 0.0;
    } else if (i1 > n - 1) {
      i0 = i1 = n - 1;
      f = 0.0;
    }
    lo_idx[a] = static_cast<std::size_t>(i0);
    hi_idx[a] = static_cast<std::size_t>(i1);
    frac[a] = f;
  }

  std::size_t idx[kMaxDim];
  double result = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    double w = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      const bool upper = (corner >> a) & 1U;
      idx[a] = upper ? hi_idx[a] : lo_idx[a];
      w *= upper ? frac[a] : 1.0 - frac[a];
    }
    if (w == 0.0) continue;
    result += w * values[grid.flat_index(std::span<const std::size_t>(idx, d))];
  }
  return result;
}

// ---------------------------------------------------------------------------
// GridDensity

namespace {

void require_valid_samples(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidDensityError(std::string(what) + " contains non-finite samples");
    if (v < 0.0) throw InvalidDensityError(std::string(what) + " contains negative samples");
  }
}

}  // namespace

GridDensity::GridDensity(Grid grid, std::vector<double> values, double tolerance)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DimensionError("density size does not match grid");
  require_valid_samples(values_, "density");
  const double mass = quadrature(grid_, values_);
  if (!(std::abs(mass - 1.0) <= tolerance))
    throw InvalidDensityError("density mass " + csv::format_number(mass) + " is not 1 within tolerance");
}

GridDensity GridDensity::normalized(Grid grid, std::vector<double> values) {
  if (values.size() != grid.size()) throw DimensionError("density size does not match grid");
  require_valid_samples(values, "density");
  const double mass = quadrature(grid, values);
  if (!(mass > 0.0)) throw InvalidDensityError("density has zero mass");
  for (auto& v : values) v /= mass;
  return GridDensity(std::move(grid), std::move(values));
}

GridDensity GridDensity::from_function(const Grid& grid,
                                       const std::function<double(std::span<const double>)>& f) {
  std::vector<double> values(grid.size());
  std::vector<double> x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.center(i, x);
    values[i] = f(x);
  }
  return normalized(grid, std::move(values));
}

double GridDensity::interpolate(std::span<const double> x) const {
  return infocons::interpolate(grid_, values_, x);
}

// ---------------------------------------------------------------------------
// DensityOfStates

struct DensityOfStates::Cache {
  static constexpr std::size_t kCapacity = 16;
  std::mutex mutex;
  std::deque<std::shared_ptr<const MuSnapshot>> entries;
};

DensityOfStates::DensityOfStates(Evaluator evaluator, bool time_dependent, double tolerance)
    : evaluator_(std::move(evaluator)),
      time_dependent_(time_dependent),
      tolerance_(tolerance),
      cache_(std::make_shared<Cache>()) {
  if (!evaluator_) throw Error("density of states needs an evaluator");
  if (!(tolerance_ > 0.0)) throw Error("normalization tolerance must be positive");
}

double DensityOfStates::operator()(std::span<const double> x, double t) const {
  const double v = evaluator_(x, time_dependent_ ? t : 0.0);
  if (!std::isfinite(v) || v < 0.0)
    throw InvalidDensityError("density of states returned invalid value " + csv::format_number(v));
  return v;
}

std::shared_ptr<const MuSnapshot> DensityOfStates::snapshot(const Grid& grid, double t) const {
  if (!time_dependent_) t = 0.0;
  {
    std::lock_guard lock(cache_->mutex);
    for (const auto& e : cache_->entries)
      if (e->t == t && e->density.grid().same_layout(grid)) return e;
  }

  std::vector<double> raw(grid.size());
  std::vector<double> x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.center(i, x);
    raw[i] = (*this)(x, t);
  }
  const double raw_mass = quadrature(grid, raw);
  if (!(raw_mass > 0.0)) throw InvalidDensityError("density of states has zero mass on the grid");
  for (auto& v : raw) v /= raw_mass;
  auto snap = std::make_shared<const MuSnapshot>(MuSnapshot{GridDensity(grid, std::move(raw), tolerance_), raw_mass, t});

  std::lock_guard lock(cache_->mutex);
  cache_->entries.push_back(snap);
  if (cache_->entries.size() > Cache::kCapacity) cache_->entries.pop_front();
  return snap;
}

double state_count(const CellMask& region, const DensityOfStates& mu, double t) {
  const auto snap = mu.snapshot(region.grid(), t);
  return quadrature(snap->density, &region);
}

GridDensity uniform_on(const CellMask& region, const DensityOfStates& mu, double t) {
  const auto snap = mu.snapshot(region.grid(), t);
  const double n = quadrature(snap->density, &region);
  if (!(n > 0.0)) throw EmptySupportError("region contains no states (N = 0)");
  std::vector<double> values(region.size());
  const auto m = snap->density.values();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = region[i] ? m[i] / n : 0.0;
  return GridDensity(region.grid(), std::move(values), mu.tolerance());
}

// ---------------------------------------------------------------------------
// Separable presets

SeparableDensity::SeparableDensity(StateSpace space, std::vector<AxisProfile> axes)
    : space_(std::move(space)), axes_(std::move(axes)) {
  if (axes_.size() != space_.dim()) throw DimensionError("one axis profile per dimension required");
}

double SeparableDensity::operator()(std::span<const double> x) const {
  double v = 1.0;
  for (std::size_t a = 0; a < axes_.size(); ++a) v *= axes_[a].pdf(x[a]);
  return v;
}

double SeparableDensity::box_mass(std::span<const double> lo, std::span<const double> hi) const {
  double m = 1.0;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (!axes_[a].cdf) throw Error("axis profile has no cumulative distribution");
    const double l = std::clamp(lo[a], space_.lo(a), space_.hi(a));
    const double h = std::clamp(hi[a], space_.lo(a), space_.hi(a));
    if (h <= l) return 0.0;
    m *= axes_[a].cdf(h) - axes_[a].cdf(l);
  }
  return m;
}

DensityOfStates SeparableDensity::density_of_states(double tolerance) const {
  auto self = std::make_shared<const SeparableDensity>(*this);
  return DensityOfStates([self](std::span<const double> x, double) { return (*self)(x); }, false, tolerance);
}

namespace profiles {

AxisProfile uniform(double lo, double hi) {
  const double L = hi - lo;
  return {[L](double) { return 1.0 / L; }, [lo, L](double x) { return (x - lo) / L; }};
}

AxisProfile exponential_tilt(double lo, double hi, double rate) {
  if (rate == 0.0) return uniform(lo, hi);
  const double L = hi - lo;
  const double denom = std::expm1(rate * L);
  return {[=](double x) { return rate * std::exp(rate * (x - lo)) / denom; },
          [=](double x) { return std::expm1(rate * (x - lo)) / denom; }};
}

AxisProfile gaussian(double lo, double hi, double center, double sigma) {
  const double s2 = std::numbers::sqrt2 * sigma;
  auto phi = [=](double x) { return 0.5 * std::erf((x - center) / s2); };
  const double z = phi(hi) - phi(lo);
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi) * z);
  return {[=](double x) {
            const double u = (x - center) / sigma;
            return norm * std::exp(-0.5 * u * u);
          },
          [=](double x) { return (phi(x) - phi(lo)) / z; }};
}

AxisProfile ramp(double lo, double hi) {
  const double L = hi - lo;
  return {[=](double x) { return 2.0 * (x - lo) / (L * L); },
          [=](double x) {
            const double u = (x - lo) / L;
            return u * u;
          }};
}

AxisProfile von_mises(double lo, double hi, double kappa, double phase) {
  const double L = hi - lo;
  const double k = 2.0 * std::numbers::pi / L;
  const double norm = 1.0 / (L * std::cyl_bessel_i(0.0, kappa));
  auto pdf = [=](double x) { return norm * std::exp(kappa * std::cos(k * (x - lo) - phase)); };
  // Composite Simpson on [lo, x]; the integrand is smooth and periodic.
  auto cdf = [=](double x) {
    if (x <= lo) return 0.0;
    const double b = std::min(x, hi);
    constexpr int kPanels = 4096;
    const double h = (b - lo) / kPanels;
    double s = pdf(lo) + pdf(b);
    for (int i = 1; i < kPanels; ++i) s += (i % 2 ? 4.0 : 2.0) * pdf(lo + i * h);
    return s * h / 3.0;
  };
  return {pdf, cdf};
}

}  // namespace profiles

// ---------------------------------------------------------------------------
// CSV

void write_grid_csv(std::ostream& out, const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw DimensionError("field size does not match grid");
  const std::size_t d = grid.dim();
  out << "dim";
  for (std::size_t a = 0; a < d; ++a) out << ",shape_" << a;
  for (std::size_t a = 0; a < d; ++a) out << ",lo_" << a;
  for (std::size_t a = 0; a < d; ++a) out << ",hi_" << a;
  out << '\n' << d;
  for (std::size_t a = 0; a < d; ++a) out << ',' << grid.shape()[a];
  for (std::size_t a = 0; a < d; ++a) out << ',' << csv::format_number(grid.space().lo(a));
  for (std::size_t a = 0; a < d; ++a) out << ',' << csv::format_number(grid.space().hi(a));
  out << '\n';
  const std::size_t row = grid.shape()[d - 1];
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << csv::format_number(values[i]) << ((i + 1) % row == 0 ? '\n' : ',');
  }
}

GridDensity read_grid_density_csv(std::istream& in, Boundary boundary) {
  std::string header;
  if (!std::getline(in, header)) throw Error("grid csv: missing header");
  auto rows = csv::read_numeric_rows(in, "grid csv");
  if (rows.empty() || rows.front().empty()) throw Error("grid csv: missing layout line");
  const auto& layout = rows.front();
  const auto d = static_cast<std::size_t>(layout[0]);
  if (d == 0 || layout.size() != 1 + 3 * d) throw Error("grid csv: malformed layout line");
  std::vector<std::size_t> shape(d);
  std::vector<double> lo(d), hi(d);
  for (std::size_t a = 0; a < d; ++a) {
    shape[a] = static_cast<std::size_t>(layout[1 + a]);
    lo[a] = layout[1 + d + a];
    hi[a] = layout[1 + 2 * d + a];
  }
  Grid grid(StateSpace(lo, hi, boundary), shape);
  std::vector<double> values;
  values.reserve(grid.size());
  for (std::size_t r = 1; r < rows.size(); ++r) values.insert(values.end(), rows[r].begin(), rows[r].end());
  if (values.size() != grid.size())
    throw DimensionError("grid csv: expected " + std::to_string(grid.size()) + " values, found " +
                         std::to_string(values.size()));
  return GridDensity(std::move(grid), std::move(values));
}

}  // namespace infocons
