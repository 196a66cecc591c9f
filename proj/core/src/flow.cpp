#include "infocons/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "infocons/csv.hpp"
#include "infocons/errors.hpp"
#include "infocons/random.hpp"
#include "infocons/sampling.hpp"

namespace infocons {

// ---------------------------------------------------------------------------
// VelocityField and presets

VelocityField::VelocityField(std::size_t dim, Evaluator evaluator) : dim_(dim), evaluator_(std::move(evaluator)) {
  if (dim_ == 0) throw DimensionError("velocity field needs dim >= 1");
  if (!evaluator_) throw Error("velocity field needs an evaluator");
}

VelocityField VelocityField::zero(std::size_t dim) {
  return VelocityField(dim, [](std::span<const double>, double, std::span<double> v) {
    std::fill(v.begin(), v.end(), 0.0);
  });
}

void VelocityField::operator()(std::span<const double> x, double t, std::span<double> v) const {
  if (x.size() != dim_ || v.size() != dim_) throw DimensionError("velocity field dimension mismatch");
  evaluator_(x, t, v);
  for (double c : v)
    if (!std::isfinite(c)) throw Error("velocity field returned a non-finite component");
}

std::vector<double> VelocityField::operator()(std::span<const double> x, double t) const {
  std::vector<double> v(dim_);
  (*this)(x, t, v);
  return v;
}

namespace fields {

VelocityField rotation(double omega, double cx, double cy) {
  return VelocityField(2, [=](std::span<const double> x, double, std::span<double> v) {
    v[0] = -omega * (x[1] - cy);
    v[1] = omega * (x[0] - cx);
  });
}

VelocityField expansion(std::size_t dim, double rate) {
  return VelocityField(dim, [=](std::span<const double> x, double, std::span<double> v) {
    for (std::size_t a = 0; a < x.size(); ++a) v[a] = rate * x[a];
  });
}

VelocityField shear(double rate) {
  return VelocityField(2, [=](std::span<const double> x, double, std::span<double> v) {
    v[0] = rate * x[1];
    v[1] = 0.0;
  });
}

}  // namespace fields

namespace streams {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

StreamFunction constant(double c) {
  return {[c](double, double) { return c; }, [](double, double) { return std::array<double, 2>{0.0, 0.0}; }};
}

StreamFunction quadratic(double a) {
  return {[a](double x, double y) { return 0.5 * a * (x * x + y * y); },
          [a](double x, double y) { return std::array<double, 2>{a * x, a * y}; }};
}

StreamFunction linear_y(double a) {
  return {[a](double, double y) { return a * y; },
          [a](double, double) { return std::array<double, 2>{0.0, a}; }};
}

StreamFunction cellular(double a, int kx, int ky) {
  const double wx = kTwoPi * kx;
  const double wy = kTwoPi * ky;
  return {[=](double x, double y) { return a * std::sin(wx * x) * std::sin(wy * y) / kTwoPi; },
          [=](double x, double y) {
            return std::array<double, 2>{a * kx * std::cos(wx * x) * std::sin(wy * y),
                                         a * ky * std::sin(wx * x) * std::cos(wy * y)};
          }};
}

StreamFunction shear_wave(double a) {
  return {[=](double, double y) { return a * std::sin(kTwoPi * y) / kTwoPi; },
          [=](double, double y) { return std::array<double, 2>{0.0, a * std::cos(kTwoPi * y)}; }};
}

StreamFunction diagonal_wave(double a) {
  return {[=](double x, double y) { return a * std::sin(kTwoPi * (x + y)) / kTwoPi; },
          [=](double x, double y) {
            const double c = a * std::cos(kTwoPi * (x + y));
            return std::array<double, 2>{c, c};
          }};
}

StreamFunction mixed_wave(double a) {
  return {[=](double x, double y) { return a * (std::sin(kTwoPi * x) + std::cos(kTwoPi * y)) / kTwoPi; },
          [=](double x, double y) {
            return std::array<double, 2>{a * std::cos(kTwoPi * x), -a * std::sin(kTwoPi * y)};
          }};
}

}  // namespace streams

VelocityField stream_field(const DensityOfStates& mu, StreamFunction s, double mu_floor) {
  if (!s.gradient) throw Error("stream function needs a gradient");
  return VelocityField(2, [mu, s = std::move(s), mu_floor](std::span<const double> x, double t, std::span<double> v) {
    const double m = mu(x, t);
    if (!(m > mu_floor))
      throw SingularLawError("density of states " + csv::format_number(m) + " below floor at (" +
                             csv::format_number(x[0]) + ", " + csv::format_number(x[1]) + ")");
    const auto g = s.gradient(x[0], x[1]);
    v[0] = g[1] / m;
    v[1] = -g[0] / m;
  });
}

double mu_divergence(const VelocityField& v, const DensityOfStates& mu, const StateSpace& space,
                     std::span<const double> x, double t, double h) {
  const std::size_t d = space.dim();
  if (x.size() != d || v.dim() != d) throw DimensionError("mu_divergence dimension mismatch");
  if (!(h > 0.0)) throw StencilError("finite-difference step must be positive");
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> xm(x.begin(), x.end());
  std::vector<double> vp(d), vm(d);
  double div = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    xp[a] = x[a] + h;
    xm[a] = x[a] - h;
    if (space.boundary(a) == Boundary::periodic) {
      space.apply_boundary(xp);
      space.apply_boundary(xm);
    } else if (xm[a] < space.lo(a) || xp[a] > space.hi(a)) {
      throw StencilError("stencil at axis " + std::to_string(a) + " leaves the state space");
    }
    v(xp, t, vp);
    v(xm, t, vm);
    div += (mu(xp, t) * vp[a] - mu(xm, t) * vm[a]) / (2.0 * h);
    std::copy(x.begin(), x.end(), xp.begin());
    std::copy(x.begin(), x.end(), xm.begin());
  }
  return div;
}

// ---------------------------------------------------------------------------
// Integration

namespace {

enum class BoundaryMode { confine, wrap_periodic, none };

struct EvalFailure {
  std::string what;
};

class Rk4 {
 public:
  Rk4(const VelocityField& v, double speed_cap)
      : v_(v), cap_(speed_cap), d_(v.dim()), k1_(d_), k2_(d_), k3_(d_), k4_(d_), tmp_(d_) {}

  // Advances x in place by one step h from time t.
  void step(std::span<double> x, double t, double h) {
    eval(x, t, k1_);
    for (std::size_t a = 0; a < d_; ++a) tmp_[a] = x[a] + 0.5 * h * k1_[a];
    eval(tmp_, t + 0.5 * h, k2_);
    for (std::size_t a = 0; a < d_; ++a) tmp_[a] = x[a] + 0.5 * h * k2_[a];
    eval(tmp_, t + 0.5 * h, k3_);
    for (std::size_t a = 0; a < d_; ++a) tmp_[a] = x[a] + h * k3_[a];
    eval(tmp_, t + h, k4_);
    for (std::size_t a = 0; a < d_; ++a) x[a] += h / 6.0 * (k1_[a] + 2.0 * k2_[a] + 2.0 * k3_[a] + k4_[a]);
  }

 private:
  void eval(std::span<const double> x, double t, std::span<double> out) {
    try {
      v_(x, t, out);
    } catch (const std::exception& e) {
      throw EvalFailure{e.what()};
    }
    if (std::isfinite(cap_)) {
      double s2 = 0.0;
      for (double c : out) s2 += c * c;
      if (s2 > cap_ * cap_)
        throw StiffnessError("speed " + csv::format_number(std::sqrt(s2)) + " exceeds cap " +
                             csv::format_number(cap_));
    }
  }

  const VelocityField& v_;
  double cap_;
  std::size_t d_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

void settle(const StateSpace& space, std::span<double> x, BoundaryMode mode) {
  if (mode == BoundaryMode::none) return;
  if (mode == BoundaryMode::confine) {
    if (!space.apply_boundary(x)) throw BoundaryError("trajectory left the state space through an absorbing axis");
    return;
  }
  for (std::size_t a = 0; a < space.dim(); ++a) {
    if (space.boundary(a) != Boundary::periodic) continue;
    const double L = space.width(a);
    double y = std::fmod(x[a] - space.lo(a), L);
    if (y < 0) y += L;
    if (y >= L) y -= L;
    x[a] = space.lo(a) + y;
  }
}

// Integrates x in place; `record(t, x)` is called for every recorded state.
template <class Recorder>
void run(const VelocityField& v, const StateSpace& space, std::vector<double>& x, double t0, double t1,
         const StepControl& ctl, BoundaryMode mode, Recorder&& record) {
  if (x.size() != space.dim() || v.dim() != space.dim()) throw DimensionError("integration dimension mismatch");
  if (!(ctl.step > 0.0)) throw Error("integration step must be positive");
  const double span = t1 - t0;
  if (span == 0.0) return;
  const double dir = span > 0 ? 1.0 : -1.0;
  const std::size_t every = std::max<std::size_t>(1, ctl.record_every);
  Rk4 rk(v, ctl.speed_cap);
  double t = t0;

  try {
    if (!ctl.adaptive) {
      const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(span) / ctl.step - 1e-9)));
      const double h = span / static_cast<double>(n);
      for (std::size_t k = 1; k <= n; ++k) {
        rk.step(x, t, h);
        t = (k == n) ? t1 : t0 + static_cast<double>(k) * h;
        settle(space, x, mode);
        if (k % every == 0 || k == n) record(t, x);
      }
      return;
    }

    std::vector<double> big(x.size()), half(x.size());
    double h = dir * ctl.step;
    std::size_t accepted = 0;
    while (dir * (t1 - t) > 0.0) {
      bool last = false;
      if (std::abs(h) >= std::abs(t1 - t)) {
        h = t1 - t;
        last = true;
      }
      big = x;
      rk.step(big, t, h);
      half = x;
      rk.step(half, t, 0.5 * h);
      rk.step(half, t + 0.5 * h, 0.5 * h);
      double err = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) err = std::max(err, std::abs(half[a] - big[a]) / 15.0);
      if (err <= ctl.tolerance || std::abs(h) <= ctl.min_step) {
        for (std::size_t a = 0; a < x.size(); ++a) x[a] = half[a] + (half[a] - big[a]) / 15.0;
        t = last ? t1 : t + h;
        settle(space, x, mode);
        if (++accepted % every == 0 || last) record(t, x);
        const double grow = err > 0.0 ? 0.9 * std::pow(ctl.tolerance / err, 0.2) : 4.0;
        h *= std::clamp(grow, 0.2, 4.0);
      } else {
        h *= std::max(0.2, 0.9 * std::pow(ctl.tolerance / err, 0.25));
      }
      if (std::abs(h) < ctl.min_step) h = dir * ctl.min_step;
    }
  } catch (const EvalFailure& f) {
    throw IntegrationAborted("velocity evaluation failed at t=" + csv::format_number(t) + ": " + f.what, x, t);
  }
}

}  // namespace

Trajectory integrate(const VelocityField& v, const StateSpace& space, std::span<const double> x0, double t0,
                     double t1, const StepControl& control) {
  space.require_supported();
  Trajectory traj;
  traj.start.assign(x0.begin(), x0.end());
  traj.times.push_back(t0);
  traj.points.push_back(traj.start);
  std::vector<double> x = traj.start;
  run(v, space, x, t0, t1, control, control.confine ? BoundaryMode::confine : BoundaryMode::wrap_periodic,
      [&](double t, const std::vector<double>& p) {
        traj.times.push_back(t);
        traj.points.push_back(p);
      });
  return traj;
}

std::vector<double> flow_map(const VelocityField& v, const StateSpace& space, std::span<const double> x0, double t0,
                             double t1, const StepControl& control) {
  std::vector<double> x(x0.begin(), x0.end());
  run(v, space, x, t0, t1, control, control.confine ? BoundaryMode::confine : BoundaryMode::wrap_periodic,
      [](double, const std::vector<double>&) {});
  return x;
}

double flow_jacobian_determinant(const VelocityField& v, const StateSpace& space, std::span<const double> x0,
                                 double t0, double t1, double h, const StepControl& control) {
  const std::size_t d = space.dim();
  std::vector<double> J(d * d);
  std::vector<double> xp, xm;
  for (std::size_t b = 0; b < d; ++b) {
    xp.assign(x0.begin(), x0.end());
    xm.assign(x0.begin(), x0.end());
    xp[b] += h;
    xm[b] -= h;
    auto noop = [](double, const std::vector<double>&) {};
    run(v, space, xp, t0, t1, control, BoundaryMode::none, noop);
    run(v, space, xm, t0, t1, control, BoundaryMode::none, noop);
    for (std::size_t a = 0; a < d; ++a) J[a * d + b] = (xp[a] - xm[a]) / (2.0 * h);
  }
  // Gaussian elimination with partial pivoting.
  double det = 1.0;
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (std::abs(J[r * d + c]) > std::abs(J[piv * d + c])) piv = r;
    if (J[piv * d + c] == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t k = 0; k < d; ++k) std::swap(J[c * d + k], J[piv * d + k]);
      det = -det;
    }
    det *= J[c * d + c];
    for (std::size_t r = c + 1; r < d; ++r) {
      const double f = J[r * d + c] / J[c * d + c];
      for (std::size_t k = c; k < d; ++k) J[r * d + k] -= f * J[c * d + k];
    }
  }
  return det;
}

// ---------------------------------------------------------------------------
// Ensembles

TrajectoryEnsemble::TrajectoryEnsemble(StateSpace space, std::vector<std::vector<double>> starts, StepControl control)
    : space_(std::move(space)), starts_(std::move(starts)), control_(control) {
  if (control_.adaptive) throw Error("ensembles share a time grid and need fixed steps");
  for (const auto& s : starts_)
    if (s.size() != space_.dim()) throw DimensionError("ensemble start has wrong dimension");
}

std::vector<Trajectory> TrajectoryEnsemble::integrate(const VelocityField& v, double t0, double t1,
                                                      const Executor& executor) const {
  std::vector<Trajectory> out(starts_.size());
  executor.for_each(starts_.size(), [&](std::size_t i) {
    out[i] = infocons::integrate(v, space_, starts_[i], t0, t1, control_);
  }, 16);
  return out;
}

// ---------------------------------------------------------------------------
// Density evolution

EvolveResult evolve_density(const GridDensity& rho0, const VelocityField& v, const DensityOfStates& mu, double t,
                            const StepControl& control, const Executor& executor) {
  const Grid& grid = rho0.grid();
  const StateSpace& space = grid.space();
  space.require_supported();
  if (grid.dim() > 3) throw DimensionError("density evolution supports grids of at most 3 dimensions");
  if (v.dim() != grid.dim()) throw DimensionError("velocity field dimension does not match grid");

  const auto mu0 = mu.snapshot(grid, 0.0);
  const auto mut = mu.snapshot(grid, t);
  const auto mu0_values = mu0->density.values();
  const auto mut_values = mut->density.values();

  StepControl back = control;
  back.confine = false;

  std::vector<double> values(grid.size());
  executor.for_chunks(grid.size(), 64, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> x(grid.dim());
    for (std::size_t i = begin; i < end; ++i) {
      grid.center(i, x);
      auto foot = flow_map(v, space, x, t, 0.0, back);
      for (std::size_t a = 0; a < grid.dim(); ++a) {
        if (space.boundary(a) == Boundary::periodic) continue;
        const double slack = 1e-9 * space.width(a);
        if (foot[a] < space.lo(a) - slack || foot[a] > space.hi(a) + slack)
          throw BoundaryError("backward trajectory from cell " + std::to_string(i) + " leaves the state space");
        foot[a] = std::clamp(foot[a], space.lo(a), space.hi(a));
      }
      const double r = rho0.interpolate(foot);
      const double m0 = interpolate(grid, mu0_values, foot);
      values[i] = m0 > 0.0 ? mut_values[i] * r / m0 : 0.0;
    }
  });

  const double mass = quadrature(grid, values);
  if (!(mass > 0.0)) throw InvalidDensityError("evolved density has zero mass");
  for (auto& val : values) val /= mass;
  return {GridDensity(grid, std::move(values), mu.tolerance()), std::abs(mass - 1.0)};
}

// ---------------------------------------------------------------------------
// Liouville volume check

VolumeCheck liouville_volume_check(const VelocityField& v, const DensityOfStates& mu, const CellMask& region,
                                   double t, std::size_t n_samples, std::uint64_t seed, const StepControl& control,
                                   const Executor& executor) {
  const Grid& grid = region.grid();
  const StateSpace& space = grid.space();
  space.require_supported();
  if (region.empty()) throw EmptySupportError("volume check needs a non-empty region");
  if (n_samples == 0) throw SamplingError("volume check needs samples");

  const std::size_t d = space.dim();
  const auto probe = static_cast<std::size_t>(
      std::clamp(std::floor(std::pow(1e6, 1.0 / static_cast<double>(d))), 8.0, 256.0));

  auto sample_at = [&](double time, std::uint64_t s) {
    PointDensity f = [&mu, time](std::span<const double> x) { return mu(x, time); };
    return rejection_sample(f, space, n_samples, s, estimate_envelope(f, space, probe), executor);
  };
  const auto pts_t = sample_at(t, seed);
  const auto pts_0 = mu.time_dependent() ? sample_at(0.0, stream_seed(seed, 1)) : pts_t;

  auto in_region = [&](std::span<const double> x) {
    const auto cell = grid.locate(x);
    return cell.has_value() && region[*cell];
  };

  StepControl back = control;
  back.confine = false;
  const std::size_t chunks = Executor::chunk_count(n_samples, kSamplingChunk);
  std::vector<std::size_t> before(chunks, 0), after(chunks, 0);
  executor.for_chunks(n_samples, kSamplingChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const std::span<const double> x0(pts_0.data() + k * d, d);
      const std::span<const double> xt(pts_t.data() + k * d, d);
      before[c] += in_region(x0);
      if (t == 0.0) {
        after[c] += in_region(xt);
      } else {
        const auto foot = flow_map(v, space, xt, t, 0.0, back);
        after[c] += in_region(foot);
      }
    }
  });
  std::size_t nb = 0, na = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    nb += before[c];
    na += after[c];
  }
  const auto n = static_cast<double>(n_samples);
  return {static_cast<double>(nb) / n, static_cast<double>(na) / n, n_samples};
}

}  // namespace infocons
