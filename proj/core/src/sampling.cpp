#include "infocons/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "infocons/errors.hpp"
#include "infocons/random.hpp"

namespace infocons {

double estimate_envelope(const PointDensity& density, const StateSpace& space, std::size_t probe_per_axis,
                         double safety) {
  const Grid probe(space, std::vector<std::size_t>(space.dim(), probe_per_axis));
  std::vector<double> x(space.dim());
  double peak = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    probe.center(i, x);
    peak = std::max(peak, density(x));
  }
  if (!(peak > 0.0)) throw SamplingError("density vanishes on the probe lattice");
  return safety * peak;
}

std::vector<double> rejection_sample(const PointDensity& density, const StateSpace& space, std::size_t n,
                                     std::uint64_t seed, double envelope, const Executor& executor,
                                     std::size_t max_attempts_per_sample) {
  const std::size_t d = space.dim();
  if (!(envelope > 0.0)) throw SamplingError("rejection envelope must be positive");
  std::vector<double> points(n * d);
  executor.for_chunks(n, kSamplingChunk, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Rng rng(seed, chunk);
    std::vector<double> x(d);
    const std::size_t budget = max_attempts_per_sample * (end - begin);
    std::size_t attempts = 0;
    for (std::size_t k = begin; k < end; ++k) {
      for (;;) {
        if (++attempts > budget)
          throw SamplingError("rejection sampling starved after " + std::to_string(budget) + " proposals");
        for (std::size_t a = 0; a < d; ++a) x[a] = rng.uniform(space.lo(a), space.hi(a));
        const double f = density(x);
        if (f > envelope) throw SamplingError("density exceeds the rejection envelope");
        if (rng.uniform() * envelope < f) break;
      }
      std::copy(x.begin(), x.end(), points.begin() + static_cast<std::ptrdiff_t>(k * d));
    }
  });
  return points;
}

}  // namespace infocons
