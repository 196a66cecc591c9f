#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "infocons/parallel.hpp"
#include "infocons/statespace.hpp"

namespace infocons {

/// Samples per RNG stream; fixed so results do not depend on thread count.
inline constexpr std::size_t kSamplingChunk = 1024;

using PointDensity = std::function<double(std::span<const double>)>;

/// Upper bound for rejection sampling: `safety` times the largest value seen
/// on a `probe_per_axis`^dim lattice of cell centres.
double estimate_envelope(const PointDensity& density, const StateSpace& space,
                         std::size_t probe_per_axis = 128, double safety = 1.5);

/// Draws n points from an (unnormalized) density on the box by rejection
/// against a uniform proposal. Returns the points flattened (n x dim).
/// Throws SamplingError if a proposal exceeds `envelope` or if a chunk
/// exhausts `max_attempts_per_sample` proposals per requested point.
std::vector<double> rejection_sample(const PointDensity& density, const StateSpace& space, std::size_t n,
                                     std::uint64_t seed, double envelope, const Executor& executor = serial_executor(),
                                     std::size_t max_attempts_per_sample = 100000);

}  // namespace infocons
