#pragma once

#include <cstdint>
#include <random>

namespace infocons {

/// Derives an independent 64-bit seed for `stream` from a master seed
/// (splitmix64 finalizer over seed and stream counter).
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) noexcept;

/// Deterministic generator for one stream. Uniform draws are built from raw
/// engine bits so they are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, std::uint64_t stream) : engine_(stream_seed(master, stream)) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller on uniform().
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace infocons
