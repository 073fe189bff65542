#pragma once

#include <stdexcept>
#include <string>

namespace torusns {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An operation requiring a zero-mean input was handed one with mean.
struct NonZeroMeanError : Error {
  using Error::Error;
};

/// A field carries too much energy above the dealias band for the
/// requested operation to be meaningful.
struct ResolutionError : Error {
  using Error::Error;
};

/// Time step violates the advective stability bound.
struct CflError : Error {
  using Error::Error;
};

/// Transported density dipped below the configured negativity tolerance.
struct NegativeDensityError : Error {
  using Error::Error;
};

/// Adaptive quadrature failed to reach its tolerance.
struct QuadratureError : Error {
  using Error::Error;
};

/// An iterative stage failed to converge (used where the spec calls for a
/// hard failure; solvers that report instead return a report struct).
struct ConvergenceError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace torusns
