#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace infocons {

/// Finite state space with positive state weights mu summing to one.
class DiscreteStateSpace {
 public:
  explicit DiscreteStateSpace(std::vector<double> mu);
  static DiscreteStateSpace uniform(std::size_t n);

  std::size_t size() const noexcept { return mu_.size(); }
  std::span<const double> mu() const noexcept { return mu_; }

 private:
  std::vector<double> mu_;
};

/// Column-stochastic matrix. Entry (i, j) is the probability of the
/// transition j -> i, so that propagation is p' = T p: the source index is
/// summed over, as in the continuous propagator integral over x'.
class DiscretePropagator {
 public:
  /// `entries` is row-major. Throws InvalidStochasticMatrix unless every entry
  /// lies in [0, 1] and every column sums to one within `tolerance`.
  DiscretePropagator(std::size_t n, std::vector<double> entries, double tolerance = 1e-12);

  static DiscretePropagator from_rows(const std::vector<std::vector<double>>& rows);
  static DiscretePropagator identity(std::size_t n);
  /// All entries 1/n.
  static DiscretePropagator mixing(std::size_t n);
  /// State j moves to state target[j]; `target` must be a permutation.
  static DiscretePropagator permutation(std::span<const std::size_t> target);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  std::span<const double> entries() const noexcept { return entries_; }

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

std::vector<double> propagate(const DiscretePropagator& T, std::span<const double> p);

/// U_region = sum over j in region of T(., j) mu[j].
std::vector<double> mask(const DiscretePropagator& T, std::span<const std::size_t> region,
                         std::span<const double> mu);

/// Info(q) = sum_i q_i log(q_i / mu_i).
double discrete_info(std::span<const double> p, std::span<const double> mu);

/// Info(T p) - Info(p).
double entropy_production(const DiscretePropagator& T, std::span<const double> p, std::span<const double> mu);

struct CertifyOptions {
  /// Entry-wise distance from the nearest 0/1 matrix.
  double tolerance = 1e-9;
  /// Relative tolerance for mu[target[j]] == mu[j].
  double mu_relative_tolerance = 1e-9;
  /// Smallest information change accepted as a distribution witness.
  double witness_threshold = 1e-10;
  std::size_t random_trials = 500;
  std::uint64_t seed = 0;
};

struct Witness {
  enum class Kind { distribution, mask };

  Kind kind = Kind::distribution;
  std::string reason;
  // Kind::distribution: a p whose information changes under propagation.
  std::vector<double> distribution;
  double info_before = 0.0;
  double info_after = 0.0;
  // Kind::mask: a region whose mask is neither mu[row] nor 0 at `row`.
  std::vector<std::size_t> region;
  std::size_t row = 0;
  double mask_value = 0.0;
  double mu_value = 0.0;
};

struct Certificate {
  bool conserving = false;
  /// target[j] for the recovered permutation (conserving verdicts only).
  std::vector<std::size_t> permutation;
  std::optional<Witness> witness;
};

/// Decides whether T conserves information for every distribution, which
/// holds exactly when T is (within tolerance) a permutation that maps each
/// state onto a state of equal weight. Violating verdicts carry a witness:
/// basis vectors are tried first, then seeded random distributions, then
/// singleton and pair masks.
Certificate certify_information_conserving(const DiscretePropagator& T, const DiscreteStateSpace& space,
                                           const CertifyOptions& options = {});

/// n rows of n comma-separated reals.
DiscretePropagator load_propagator_csv(const std::filesystem::path& path);
/// State weights, comma- or newline-separated.
std::vector<double> load_weights_csv(const std::filesystem::path& path);

}  // namespace infocons
