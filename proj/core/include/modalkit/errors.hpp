#pragma once

#include <stdexcept>
#include <string>

namespace modalkit {

//! Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! Non-finite or otherwise out-of-domain argument.
struct DomainError : Error {
  using Error::Error;
};

//! Requested kernel order is not an even integer in the supported range.
struct InvalidOrderError : Error {
  using Error::Error;
};

//! A numeric procedure failed (singular system, non-convergent integral, ...).
struct NumericError : Error {
  using Error::Error;
};

//! Vector/matrix dimensions do not agree.
struct ShapeError : Error {
  using Error::Error;
};

//! Kernel has a vanishing leading moment; the criterion is undefined.
struct DegenerateKernelError : Error {
  using Error::Error;
};

//! A kernel fails a required moment condition; carries the failing index.
struct InadmissibleKernelError : Error {
  InadmissibleKernelError(const std::string& msg, int index)
    : Error(msg), failing_index(index) {}
  int failing_index;
};

//! The asymptotic bias vanishes, so the optimal bandwidth diverges.
struct DegenerateBiasError : Error {
  using Error::Error;
};

//! No search start converged to a valid optimum.
struct SearchFailureError : Error {
  using Error::Error;
};

//! Density or density estimate does not have the expected mode structure.
struct TopologyError : Error {
  using Error::Error;
};

//! Regression design matrix is rank deficient.
struct DesignError : Error {
  using Error::Error;
};

//! A statistical test is undefined for the given inputs.
struct UndefinedTestError : Error {
  using Error::Error;
};

} // namespace modalkit
