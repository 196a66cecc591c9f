#include "infocons/discrete.hpp"

#include <algorithm>
#include <cmath>

#include "infocons/csv.hpp"
#include "infocons/entropy.hpp"
#include "infocons/errors.hpp"
#include "infocons/random.hpp"

namespace infocons {

DiscreteStateSpace::DiscreteStateSpace(std::vector<double> mu) : mu_(std::move(mu)) {
  if (mu_.empty()) throw DimensionError("discrete state space needs at least one state");
  double sum = 0.0;
  for (double m : mu_) {
    if (!std::isfinite(m) || m <= 0.0) throw InvalidDensityError("every state weight must be positive");
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidDensityError("state weights must sum to 1");
}

DiscreteStateSpace DiscreteStateSpace::uniform(std::size_t n) {
  return DiscreteStateSpace(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DiscretePropagator::DiscretePropagator(std::size_t n, std::vector<double> entries, double tolerance)
    : n_(n), entries_(std::move(entries)) {
  if (n_ == 0) throw InvalidStochasticMatrix("propagator needs at least one state");
  if (entries_.size() != n_ * n_) throw InvalidStochasticMatrix("propagator must be square");
  for (std::size_t j = 0; j < n_; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double v = entries_[i * n_ + j];
      if (!std::isfinite(v) || v < -tolerance || v > 1.0 + tolerance)
        throw InvalidStochasticMatrix("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") is outside [0, 1]");
      col += v;
    }
    if (std::abs(col - 1.0) > tolerance)
      throw InvalidStochasticMatrix("column " + std::to_string(j) + " sums to " + csv::format_number(col));
  }
}

DiscretePropagator DiscretePropagator::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  std::vector<double> e;
  e.reserve(n * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw InvalidStochasticMatrix("propagator rows must all have n entries");
    e.insert(e.end(), r.begin(), r.end());
  }
  return DiscretePropagator(n, std::move(e));
}

DiscretePropagator DiscretePropagator::identity(std::size_t n) {
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
  return DiscretePropagator(n, std::move(e));
}

DiscretePropagator DiscretePropagator::mixing(std::size_t n) {
  return DiscretePropagator(n, std::vector<double>(n * n, 1.0 / static_cast<double>(n)));
}

DiscretePropagator DiscretePropagator::permutation(std::span<const std::size_t> target) {
  const std::size_t n = target.size();
  std::vector<double> e(n * n, 0.0);
  std::vector<bool> hit(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (target[j] >= n || hit[target[j]]) throw InvalidStochasticMatrix("target is not a permutation");
    hit[target[j]] = true;
    e[target[j] * n + j] = 1.0;
  }
  return DiscretePropagator(n, std::move(e));
}

std::vector<double> propagate(const DiscretePropagator& T, std::span<const double> p) {
  const std::size_t n = T.size();
  if (p.size() != n) throw DimensionError("distribution length does not match propagator");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += T(i, j) * p[j];
    out[i] = s;
  }
  return out;
}

std::vector<double> mask(const DiscretePropagator& T, std::span<const std::size_t> region,
                         std::span<const double> mu) {
  const std::size_t n = T.size();
  if (mu.size() != n) throw DimensionError("state weights do not match propagator");
  if (region.empty()) throw EmptySupportError("mask needs a non-empty region");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j : region) {
      if (j >= n) throw DimensionError("region state out of range");
      s += T(i, j) * mu[j];
    }
    out[i] = s;
  }
  return out;
}

double discrete_info(std::span<const double> p, std::span<const double> mu) { return relative_info(p, mu); }

double entropy_production(const DiscretePropagator& T, std::span<const double> p, std::span<const double> mu) {
  const auto q = propagate(T, p);
  return discrete_info(q, mu) - discrete_info(p, mu);
}

namespace {

std::optional<Witness> distribution_witness(const DiscretePropagator& T, std::span<const double> mu,
                                            std::span<const double> p, double threshold, const char* reason) {
  const double before = discrete_info(p, mu);
  const double after = discrete_info(propagate(T, p), mu);
  if (!(std::abs(after - before) > threshold)) return std::nullopt;
  Witness w;
  w.kind = Witness::Kind::distribution;
  w.reason = reason;
  w.distribution.assign(p.begin(), p.end());
  w.info_before = before;
  w.info_after = after;
  return w;
}

std::optional<Witness> mask_witness(const DiscretePropagator& T, std::span<const double> mu,
                                    std::vector<std::size_t> region, double tol) {
  const auto u = mask(T, region, mu);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double dev = std::min(std::abs(u[i]), std::abs(u[i] - mu[i]));
    if (dev > tol) {
      Witness w;
      w.kind = Witness::Kind::mask;
      w.reason = "mask takes a value other than mu or 0";
      w.region = std::move(region);
      w.row = i;
      w.mask_value = u[i];
      w.mu_value = mu[i];
      return w;
    }
  }
  return std::nullopt;
}

Witness find_witness(const DiscretePropagator& T, std::span<const double> mu, const CertifyOptions& opt) {
  const std::size_t n = T.size();
  std::vector<double> p(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(p.begin(), p.end(), 0.0);
    p[j] = 1.0;
    if (auto w = distribution_witness(T, mu, p, opt.witness_threshold, "information of a basis state changes"))
      return *w;
  }
  Rng rng(opt.seed, 0);
  for (std::size_t k = 0; k < opt.random_trials; ++k) {
    double s = 0.0;
    for (auto& v : p) {
      double u = rng.uniform();
      while (u <= 0.0) u = rng.uniform();
      v = -std::log(u);
      s += v;
    }
    for (auto& v : p) v /= s;
    if (auto w = distribution_witness(T, mu, p, opt.witness_threshold,
                                      "information of a random distribution changes"))
      return *w;
  }
  for (std::size_t a = 0; a < n; ++a)
    if (auto w = mask_witness(T, mu, {a}, opt.tolerance)) return *w;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (auto w = mask_witness(T, mu, {a, b}, opt.tolerance)) return *w;

  // Nothing exceeds the thresholds; report the largest dichotomy deviation.
  Witness best;
  best.kind = Witness::Kind::mask;
  best.reason = "violation below witness thresholds";
  double worst = -1.0;
  for (std::size_t a = 0; a < n; ++a) {
    const std::vector<std::size_t> region{a};
    const auto u = mask(T, region, mu);
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = std::min(std::abs(u[i]), std::abs(u[i] - mu[i]));
      if (dev > worst) {
        worst = dev;
        best.region = region;
        best.row = i;
        best.mask_value = u[i];
        best.mu_value = mu[i];
      }
    }
  }
  return best;
}

}  // namespace

Certificate certify_information_conserving(const DiscretePropagator& T, const DiscreteStateSpace& space,
                                           const CertifyOptions& opt) {
  const std::size_t n = T.size();
  if (space.size() != n) throw DimensionError("state weights do not match propagator");
  const auto mu = space.mu();

  Certificate cert;
  auto violate = [&](const std::string& reason) {
    cert.conserving = false;
    cert.permutation.clear();
    Witness w = find_witness(T, mu, opt);
    w.reason = reason + "; " + w.reason;
    cert.witness = std::move(w);
    return cert;
  };

  // One-to-many: a column spreading mass over two targets.
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t big = 0;
    for (std::size_t i = 0; i < n; ++i) big += T(i, j) > opt.tolerance;
    if (big > 1) return violate("one-to-many: state " + std::to_string(j) + " maps to several states");
  }
  // Many-to-one: a row receiving mass from two sources.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t big = 0;
    for (std::size_t j = 0; j < n; ++j) big += T(i, j) > opt.tolerance;
    if (big > 1) return violate("many-to-one: several states map to state " + std::to_string(i));
  }

  std::vector<std::size_t> target(n, n);
  std::vector<bool> hit(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double nearest = T(i, j) > 0.5 ? 1.0 : 0.0;
      if (std::abs(T(i, j) - nearest) >= opt.tolerance)
        return violate("entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not within tolerance of 0 or 1");
      if (nearest == 1.0) target[j] = i;
    }
    if (target[j] == n || hit[target[j]]) return violate("matrix is not a permutation");
    hit[target[j]] = true;
  }

  const double mu_scale = *std::max_element(mu.begin(), mu.end());
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(mu[target[j]] - mu[j]) > opt.mu_relative_tolerance * mu_scale)
      return violate("permutation moves state " + std::to_string(j) + " onto a state of different weight");
  }

  cert.conserving = true;
  cert.permutation = std::move(target);
  return cert;
}

DiscretePropagator load_propagator_csv(const std::filesystem::path& path) {
  return DiscretePropagator::from_rows(csv::read_numeric_file(path));
}

std::vector<double> load_weights_csv(const std::filesystem::path& path) {
  std::vector<double> w;
  for (const auto& row : csv::read_numeric_file(path)) w.insert(w.end(), row.begin(), row.end());
  return w;
}

}  // namespace infocons
