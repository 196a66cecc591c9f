#include "infocons/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>

#include "infocons/coarse.hpp"
#include "infocons/csv.hpp"
#include "infocons/errors.hpp"
#include "infocons/random.hpp"
#include "infocons/sampling.hpp"

namespace infocons::quantum {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxIndex = 32;

}  // namespace

double Mode::energy() const noexcept { return 0.5 * kPi * kPi * static_cast<double>(m * m + n * n); }

double box_period() noexcept { return 2.0 * kPi / Mode{}.energy(); }

std::vector<std::pair<int, int>> default_mode_indices(std::size_t count) {
  std::vector<std::pair<int, int>> out;
  const auto k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
  if (static_cast<std::size_t>(k) * static_cast<std::size_t>(k) == count) {
    for (int m = 1; m <= k; ++m)
      for (int n = 1; n <= k; ++n) out.emplace_back(m, n);
    return out;
  }
  const int reach = static_cast<int>(count) + 1;
  for (int m = 1; m <= reach; ++m)
    for (int n = 1; n <= reach; ++n) out.emplace_back(m, n);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    const int ea = a.first * a.first + a.second * a.second;
    const int eb = b.first * b.first + b.second * b.second;
    return ea != eb ? ea < eb : a.first < b.first;
  });
  out.resize(count);
  return out;
}

// ---------------------------------------------------------------------------
// ModeSet2D

ModeSet2D::ModeSet2D(std::vector<Mode> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) throw Error("mode set needs at least one mode");
  double norm2 = 0.0;
  for (const auto& md : modes_) {
    if (md.m < 1 || md.n < 1) throw Error("mode indices must be positive");
    if (md.m > kMaxIndex || md.n > kMaxIndex) throw Error("mode index above supported maximum of 32");
    max_index_ = std::max({max_index_, md.m, md.n});
    norm2 += std::norm(md.amplitude);
  }
  if (std::abs(norm2 - 1.0) > 1e-12)
    throw InvalidDensityError("mode amplitudes must satisfy sum |c|^2 = 1 (got " + csv::format_number(norm2) + ")");
}

ModeSet2D ModeSet2D::single(int m, int n) { return ModeSet2D({Mode{m, n, Complex{1.0, 0.0}}}); }

ModeSet2D ModeSet2D::equal_superposition(const std::vector<std::pair<int, int>>& indices,
                                         std::span<const double> phases) {
  if (!phases.empty() && phases.size() != indices.size()) throw DimensionError("one phase per mode required");
  const double a = 1.0 / std::sqrt(static_cast<double>(indices.size()));
  std::vector<Mode> modes;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double phase = phases.empty() ? 0.0 : phases[k];
    modes.push_back(Mode{indices[k].first, indices[k].second, std::polar(a, phase)});
  }
  return ModeSet2D(std::move(modes));
}

ModeSet2D ModeSet2D::random_phases(std::size_t count, std::uint64_t seed) {
  Rng rng(seed, 0x9a5e);
  std::vector<double> phases(count);
  for (auto& p : phases) p = rng.uniform(0.0, 2.0 * kPi);
  return equal_superposition(default_mode_indices(count), phases);
}

double ModeSet2D::norm() const {
  double s = 0.0;
  for (const auto& md : modes_) s += std::norm(md.amplitude);
  return s;
}

std::vector<Complex> ModeSet2D::coefficients_at(double t) const {
  std::vector<Complex> c(modes_.size());
  for (std::size_t k = 0; k < modes_.size(); ++k)
    c[k] = modes_[k].amplitude * std::polar(1.0, -modes_[k].energy() * t);
  return c;
}

// ---------------------------------------------------------------------------
// WaveField

WaveField::WaveField(ModeSet2D modes) : modes_(std::move(modes)) {}

namespace {

// sin(k pi u), cos(k pi u) for k = 0..kmax by the Chebyshev recurrence.
void harmonics(double u, int kmax, double* s, double* c) {
  const double s1 = std::sin(kPi * u);
  const double c1 = std::cos(kPi * u);
  s[0] = 0.0;
  c[0] = 1.0;
  s[1] = s1;
  c[1] = c1;
  for (int k = 1; k < kmax; ++k) {
    s[k + 1] = 2.0 * c1 * s[k] - s[k - 1];
    c[k + 1] = 2.0 * c1 * c[k] - c[k - 1];
  }
}

}  // namespace

WaveSample WaveField::sample(double x, double y, std::span<const Complex> coefficients) const {
  const int kmax = modes_.max_index();
  double sx[kMaxIndex + 1], cx[kMaxIndex + 1], sy[kMaxIndex + 1], cy[kMaxIndex + 1];
  harmonics(x, kmax, sx, cx);
  harmonics(y, kmax, sy, cy);
  const auto modes = modes_.modes();
  double pr = 0.0, pi = 0.0, xr = 0.0, xi = 0.0, yr = 0.0, yi = 0.0;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const int m = modes[k].m;
    const int n = modes[k].n;
    const double ar = coefficients[k].real();
    const double ai = coefficients[k].imag();
    const double v = sx[m] * sy[n];
    const double gx = m * cx[m] * sy[n];
    const double gy = n * sx[m] * cy[n];
    pr += ar * v;
    pi += ai * v;
    xr += ar * gx;
    xi += ai * gx;
    yr += ar * gy;
    yi += ai * gy;
  }
  const Complex psi(2.0 * pr, 2.0 * pi);
  const Complex dx(2.0 * kPi * xr, 2.0 * kPi * xi);
  const Complex dy(2.0 * kPi * yr, 2.0 * kPi * yi);
  return {psi, dx, dy};
}

WaveSample WaveField::sample(double x, double y, double t) const {
  return sample(x, y, modes_.coefficients_at(t));
}

Complex WaveField::operator()(double x, double y, double t) const { return sample(x, y, t).psi; }

StateSpace box_space() { return StateSpace::unit_box(2, Boundary::reflecting); }

DensityOfStates born_density_of_states(const ModeSet2D& modes) {
  auto field = std::make_shared<const WaveField>(modes);
  return DensityOfStates([field](std::span<const double> x, double t) { return field->density(x[0], x[1], t); },
                         true);
}

GridDensity born_density(const ModeSet2D& modes, const Grid& grid, double t) {
  if (grid.dim() != 2) throw DimensionError("Born density lives on a 2D grid");
  const WaveField field(modes);
  const auto c = modes.coefficients_at(t);
  std::vector<double> values(grid.size());
  std::vector<double> x(2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.center(i, x);
    values[i] = std::norm(field.sample(x[0], x[1], c).psi);
  }
  return GridDensity::normalized(grid, std::move(values));
}

// ---------------------------------------------------------------------------
// Coefficient flow

std::vector<double> coefficient_velocity(std::span<const double> coordinates, std::span<const double> energies) {
  if (coordinates.size() != 2 * energies.size()) throw DimensionError("two coordinates per mode required");
  std::vector<double> rate(coordinates.size());
  for (std::size_t k = 0; k < energies.size(); ++k) {
    // d/dt (a + i b) = -i E (a + i b) = E b - i E a
    rate[2 * k] = energies[k] * coordinates[2 * k + 1];
    rate[2 * k + 1] = -energies[k] * coordinates[2 * k];
  }
  return rate;
}

CoefficientFlowCheck coefficient_flow_divergence(const ModeSet2D& modes, double t, double h) {
  const auto c = modes.coefficients_at(t);
  std::vector<double> energies;
  std::vector<double> z;
  for (std::size_t k = 0; k < c.size(); ++k) {
    energies.push_back(modes.modes()[k].energy());
    z.push_back(c[k].real());
    z.push_back(c[k].imag());
  }

  // d(E b)/da + d(-E a)/db vanishes mode by mode.
  CoefficientFlowCheck out;
  out.analytic_divergence = 0.0;

  double fd = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    auto zp = z;
    auto zm = z;
    zp[j] += h;
    zm[j] -= h;
    fd += (coefficient_velocity(zp, energies)[j] - coefficient_velocity(zm, energies)[j]) / (2.0 * h);
  }
  out.fd_divergence = fd;

  double norm2 = 0.0;
  for (const auto& ck : c) norm2 += std::norm(ck);
  out.norm_drift = std::abs(norm2 - 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// Guidance

std::array<double, 2> guidance_velocity(const WaveField& field, double x, double y, double t, double node_floor) {
  const WaveSample s = field.sample(x, y, t);
  const double n2 = std::norm(s.psi);
  if (!(n2 > node_floor * node_floor))
    throw NodeProximityError("|psi| below node floor at (" + csv::format_number(x) + ", " + csv::format_number(y) +
                             ")");
  return {(std::conj(s.psi) * s.dpsi_dx).imag() / n2, (std::conj(s.psi) * s.dpsi_dy).imag() / n2};
}

VelocityField guidance_field(const WaveField& field, double node_floor) {
  auto f = std::make_shared<const WaveField>(field);
  return VelocityField(2, [f, node_floor](std::span<const double> x, double t, std::span<double> v) {
    const auto g = guidance_velocity(*f, x[0], x[1], t, node_floor);
    v[0] = g[0];
    v[1] = g[1];
  });
}

// ---------------------------------------------------------------------------
// Relaxation

double coarse_h(std::span<const double> points, std::span<const std::uint8_t> lost, const GridDensity& mu_coarse) {
  const Grid& grid = mu_coarse.grid();
  if (grid.dim() != 2) throw DimensionError("coarse H needs a 2D grid");
  const std::size_t n = points.size() / 2;
  std::vector<double> counts(grid.size(), 0.0);
  std::size_t kept = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!lost.empty() && lost[k]) continue;
    const auto cell = grid.locate(points.subspan(2 * k, 2));
    if (!cell) continue;
    counts[*cell] += 1.0;
    ++kept;
  }
  if (kept == 0) throw SamplingError("no trajectories left to histogram");
  const double scale = 1.0 / (static_cast<double>(kept) * grid.cell_volume());
  for (auto& c : counts) c *= scale;
  const double h = pairwise_reduce(0, counts.size(), [&](std::size_t i) {
    const double r = counts[i];
    if (r <= 0.0) return 0.0;
    const double m = mu_coarse[i];
    return m > 0.0 ? r * std::log(r / m) : std::numeric_limits<double>::infinity();
  });
  return std::max(0.0, h * grid.cell_volume());
}

namespace {

// Im(conj(a) b) without the checked complex multiply.
inline double im_conj_product(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

struct Stage {
  bool ok;
  double vx, vy;
};

class Mover {
 public:
  static constexpr std::size_t kCachedPieces = 32;

  Mover(const WaveField& field, const RelaxationConfig& cfg, double h) : field_(field), cfg_(cfg), h_(h) {
    const auto modes = field.modes().modes();
    half_phase_.resize(kCachedPieces + 1);
    for (std::size_t p = 2; p <= kCachedPieces; ++p)
      for (const auto& md : modes) half_phase_[p].push_back(std::polar(1.0, -md.energy() * 0.5 * h / static_cast<double>(p)));
  }

  Stage velocity(double x, double y, std::span<const Complex> c) const {
    const WaveSample s = field_.sample(x, y, c);
    const double n2 = std::norm(s.psi);
    if (!(n2 > cfg_.node_floor * cfg_.node_floor)) return {false, 0.0, 0.0};
    return {true, im_conj_product(s.psi, s.dpsi_dx) / n2, im_conj_product(s.psi, s.dpsi_dy) / n2};
  }

  Stage capped(double x, double y, std::span<const Complex> c) const {
    const WaveSample s = field_.sample(x, y, c);
    const double n2 = std::norm(s.psi);
    if (!(n2 > 0.0)) return {true, 0.0, 0.0};
    double vx = im_conj_product(s.psi, s.dpsi_dx) / n2;
    double vy = im_conj_product(s.psi, s.dpsi_dy) / n2;
    const double speed = std::hypot(vx, vy);
    if (!std::isfinite(speed)) return {true, 0.0, 0.0};
    if (speed > cfg_.speed_cap) {
      vx *= cfg_.speed_cap / speed;
      vy *= cfg_.speed_cap / speed;
    }
    return {true, vx, vy};
  }

  // One RK4 step with precomputed coefficient sets. Returns false (leaving
  // x, y untouched) on a node hit or an oversized displacement.
  bool fast_step(double& x, double& y, double h, std::span<const Complex> c0, std::span<const Complex> ch,
                 std::span<const Complex> c1, double& max_speed) const {
    const Stage k1 = velocity(x, y, c0);
    if (!k1.ok) return false;
    const Stage k2 = velocity(x + 0.5 * h * k1.vx, y + 0.5 * h * k1.vy, ch);
    if (!k2.ok) return false;
    const Stage k3 = velocity(x + 0.5 * h * k2.vx, y + 0.5 * h * k2.vy, ch);
    if (!k3.ok) return false;
    const Stage k4 = velocity(x + h * k3.vx, y + h * k3.vy, c1);
    if (!k4.ok) return false;
    const double s2 = std::max({k1.vx * k1.vx + k1.vy * k1.vy, k2.vx * k2.vx + k2.vy * k2.vy,
                                k3.vx * k3.vx + k3.vy * k3.vy, k4.vx * k4.vx + k4.vy * k4.vy});
    const double reach = cfg_.max_displacement / std::abs(h);
    if (s2 > reach * reach) {
      max_speed = std::sqrt(s2);
      return false;
    }
    x += h / 6.0 * (k1.vx + 2.0 * k2.vx + 2.0 * k3.vx + k4.vx);
    y += h / 6.0 * (k1.vy + 2.0 * k2.vy + 2.0 * k3.vy + k4.vy);
    reflect(x, y);
    return true;
  }

  // Sub-stepped fallback over one macro step starting from coefficients c0.
  // Node hits halve a piece down to min_step, after which the capped law is
  // used and the trajectory is marked lost.
  void slow_step(double& x, double& y, double t, std::span<const Complex> c0, double max_speed, bool& lost) const {
    auto pieces = static_cast<std::size_t>(std::ceil(max_speed * std::abs(h_) / cfg_.max_displacement));
    pieces = std::clamp<std::size_t>(pieces, 2, static_cast<std::size_t>(std::max(2.0, std::abs(h_) / cfg_.min_step)));
    const double dh = h_ / static_cast<double>(pieces);
    if (pieces > kCachedPieces) {
      for (std::size_t p = 0; p < pieces; ++p) piece(x, y, t + static_cast<double>(p) * dh, dh, lost);
      return;
    }
    const auto& w = half_phase_[pieces];
    const std::size_t M = c0.size();
    Complex buf[3 * 64];
    std::vector<Complex> heap;
    Complex* ca = buf;
    if (M > 64) {
      heap.resize(3 * M);
      ca = heap.data();
    }
    Complex* cb = ca + M;
    Complex* cc = cb + M;
    std::copy(c0.begin(), c0.end(), ca);
    for (std::size_t p = 0; p < pieces; ++p) {
      for (std::size_t k = 0; k < M; ++k) {
        cb[k] = ca[k] * w[k];
        cc[k] = cb[k] * w[k];
      }
      double xs = x, ys = y;
      if (try_rk4(xs, ys, dh, {ca, M}, {cb, M}, {cc, M})) {
        x = xs;
        y = ys;
        reflect(x, y);
      } else {
        piece(x, y, t + static_cast<double>(p) * dh, dh, lost);
      }
      std::swap(ca, cc);
    }
  }

 private:
  void piece(double& x, double& y, double t, double h, bool& lost) const {
    const auto c0 = field_.modes().coefficients_at(t);
    const auto ch = field_.modes().coefficients_at(t + 0.5 * h);
    const auto c1 = field_.modes().coefficients_at(t + h);
    double xs = x, ys = y;
    const bool ok = try_rk4(xs, ys, h, c0, ch, c1);
    if (ok) {
      x = xs;
      y = ys;
      reflect(x, y);
      return;
    }
    if (std::abs(h) * 0.5 >= cfg_.min_step) {
      piece(x, y, t, 0.5 * h, lost);
      piece(x, y, t + 0.5 * h, 0.5 * h, lost);
      return;
    }
    lost = true;
    const Stage k1 = capped(x, y, c0);
    const Stage k2 = capped(x + 0.5 * h * k1.vx, y + 0.5 * h * k1.vy, ch);
    const Stage k3 = capped(x + 0.5 * h * k2.vx, y + 0.5 * h * k2.vy, ch);
    const Stage k4 = capped(x + h * k3.vx, y + h * k3.vy, c1);
    x += h / 6.0 * (k1.vx + 2.0 * k2.vx + 2.0 * k3.vx + k4.vx);
    y += h / 6.0 * (k1.vy + 2.0 * k2.vy + 2.0 * k3.vy + k4.vy);
    reflect(x, y);
  }

  bool try_rk4(double& x, double& y, double h, std::span<const Complex> c0, std::span<const Complex> ch,
               std::span<const Complex> c1) const {
    const Stage k1 = velocity(x, y, c0);
    if (!k1.ok) return false;
    const Stage k2 = velocity(x + 0.5 * h * k1.vx, y + 0.5 * h * k1.vy, ch);
    if (!k2.ok) return false;
    const Stage k3 = velocity(x + 0.5 * h * k2.vx, y + 0.5 * h * k2.vy, ch);
    if (!k3.ok) return false;
    const Stage k4 = velocity(x + h * k3.vx, y + h * k3.vy, c1);
    if (!k4.ok) return false;
    x += h / 6.0 * (k1.vx + 2.0 * k2.vx + 2.0 * k3.vx + k4.vx);
    y += h / 6.0 * (k1.vy + 2.0 * k2.vy + 2.0 * k3.vy + k4.vy);
    return std::isfinite(x) && std::isfinite(y);
  }

  static void reflect(double& x, double& y) {
    auto mirror = [](double u) {
      double w = std::fmod(u, 2.0);
      if (w < 0.0) w += 2.0;
      return w > 1.0 ? 2.0 - w : w;
    };
    if (x < 0.0 || x > 1.0) x = mirror(x);
    if (y < 0.0 || y > 1.0) y = mirror(y);
  }

  const WaveField& field_;
  const RelaxationConfig& cfg_;
  double h_;
  std::vector<std::vector<Complex>> half_phase_;
};

}  // namespace

RelaxationResult relaxation_experiment(const ModeSet2D& modes, const RelaxationConfig& cfg,
                                       const Executor& executor) {
  if (cfg.trajectories == 0) throw SamplingError("relaxation needs trajectories");
  if (cfg.snapshots == 0) throw Error("relaxation needs at least one snapshot interval");
  if (!(cfg.t_final > 0.0) || !(cfg.step > 0.0)) throw Error("relaxation needs positive t_final and step");
  const std::size_t N = cfg.trajectories;
  const StateSpace space = box_space();
  const WaveField field(modes);

  const Grid fine(space, {cfg.fine_shape[0], cfg.fine_shape[1]});
  if (cfg.fine_shape[0] % cfg.coarse_shape[0] != 0 || cfg.fine_shape[1] % cfg.coarse_shape[1] != 0)
    throw DimensionError("coarse shape must divide the fine shape");
  const CoarseGraining cg(fine, {cfg.fine_shape[0] / cfg.coarse_shape[0], cfg.fine_shape[1] / cfg.coarse_shape[1]});

  // Initial ensemble.
  PointDensity initial;
  double envelope = 0.0;
  if (cfg.initial == InitialEnsemble::ground_state) {
    initial = [](std::span<const double> p) {
      const double s = std::sin(kPi * p[0]) * std::sin(kPi * p[1]);
      return 4.0 * s * s;
    };
    envelope = 4.0 * (1.0 + 1e-12);
  } else {
    initial = [&field](std::span<const double> p) { return field.density(p[0], p[1], 0.0); };
    envelope = estimate_envelope(initial, space, 256, 1.5);
  }
  std::vector<double> pts = rejection_sample(initial, space, N, stream_seed(cfg.seed, 0xe45e), envelope, executor);

  RelaxationResult result{{}, pts, {}, std::vector<std::uint8_t>(N, 0), born_density(modes, fine, cfg.t_final), 0, 0.0,
                          false, {}};

  const double interval = cfg.t_final / static_cast<double>(cfg.snapshots);
  const auto steps_per_interval = static_cast<std::size_t>(std::max(1.0, std::ceil(interval / cfg.step - 1e-9)));
  const double h = interval / static_cast<double>(steps_per_interval);
  const std::size_t M = modes.size();

  auto record = [&](double t) {
    const GridDensity mu_bar = coarse_grain(born_density(modes, fine, t), cg);
    std::size_t lost = 0;
    for (auto f : result.lost) lost += f;
    result.series.push_back({t, coarse_h(pts, result.lost, mu_bar), static_cast<double>(lost) / static_cast<double>(N)});
  };
  record(0.0);

  const Mover mover(field, cfg, h);
  std::vector<Complex> table((2 * steps_per_interval + 1) * M);
  for (std::size_t s = 0; s < cfg.snapshots; ++s) {
    const double t_start = interval * static_cast<double>(s);
    for (std::size_t j = 0; j <= 2 * steps_per_interval; ++j) {
      const auto c = modes.coefficients_at(t_start + 0.5 * h * static_cast<double>(j));
      std::copy(c.begin(), c.end(), table.begin() + static_cast<std::ptrdiff_t>(j * M));
    }
    executor.for_chunks(N, kSamplingChunk, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        double x = pts[2 * k];
        double y = pts[2 * k + 1];
        bool lost = result.lost[k] != 0;
        for (std::size_t j = 0; j < steps_per_interval; ++j) {
          const std::span<const Complex> c0(table.data() + 2 * j * M, M);
          const std::span<const Complex> ch(table.data() + (2 * j + 1) * M, M);
          const std::span<const Complex> c1(table.data() + (2 * j + 2) * M, M);
          double speed = 0.0;
          if (!mover.fast_step(x, y, h, c0, ch, c1, speed)) {
            mover.slow_step(x, y, t_start + h * static_cast<double>(j), c0, speed, lost);
          }
        }
        pts[2 * k] = x;
        pts[2 * k + 1] = y;
        result.lost[k] = lost ? 1 : 0;
      }
    });
    record(s + 1 == cfg.snapshots ? cfg.t_final : interval * static_cast<double>(s + 1));
  }

  result.ensemble_final = pts;
  for (auto f : result.lost) result.lost_count += f;
  result.lost_fraction = static_cast<double>(result.lost_count) / static_cast<double>(N);
  if (result.lost_fraction > cfg.degraded_fraction) {
    result.degraded = true;
    result.warning = "degraded run: " + csv::format_number(100.0 * result.lost_fraction) +
                     "% of trajectories needed the node speed cap";
  }
  return result;
}

}  // namespace infocons::quantum
