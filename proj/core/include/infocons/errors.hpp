#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace infocons {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or dimensions of two operands disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A density contains negative or non-finite samples, or fails normalization.
class InvalidDensityError : public Error {
 public:
  using Error::Error;
};

/// A region carries no states (N = 0), so no uniform distribution exists on it.
class EmptySupportError : public Error {
 public:
  using Error::Error;
};

/// A column-stochastic matrix failed validation.
class InvalidStochasticMatrix : public Error {
 public:
  using Error::Error;
};

/// Unsupported boundary configuration (absorbing-forbidden axes).
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// A finite-difference stencil would leave the state space.
class StencilError : public Error {
 public:
  using Error::Error;
};

/// 1/mu singularity while building a velocity field from a stream function.
class SingularLawError : public Error {
 public:
  using Error::Error;
};

/// Velocity evaluation failed mid-integration; carries the last good state.
class IntegrationAborted : public Error {
 public:
  IntegrationAborted(const std::string& what, std::vector<double> last_state, double last_time)
      : Error(what), last_state_(std::move(last_state)), last_time_(last_time) {}

  const std::vector<double>& last_state() const noexcept { return last_state_; }
  double last_time() const noexcept { return last_time_; }

 private:
  std::vector<double> last_state_;
  double last_time_;
};

/// Speed exceeded the configured cap.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

/// Guidance velocity requested where |psi| is below the node floor.
class NodeProximityError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling could not produce the requested samples.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace infocons
