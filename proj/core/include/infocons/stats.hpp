#pragma once

#include <cstddef>
#include <span>

namespace infocons {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  /// Standard error of the slope under the usual homoscedastic model.
  double slope_stderr = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = a + b x. Needs at least three points with
/// distinct x values.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Slope of log(err) against log(h), the observed convergence order.
double convergence_order(double h_coarse, double err_coarse, double h_fine, double err_fine);

}  // namespace infocons
