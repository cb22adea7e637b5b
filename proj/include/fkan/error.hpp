#pragma once

#include <stdexcept>
#include <string>

namespace fkan {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the input (sizes, divisibility, ranges) does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An enumeration or combinatorial budget would be exceeded.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Event geometry does not fit the graph it is evaluated on.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Base for failures that are numerical rather than structural.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The complex partition function (or phi_p[alpha_z^|omega|]) vanishes at p + z.
class ZeroDenominator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// p + z is too close to the pole at 1.
class PoleProximity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A polymer partition function vanishes.
class ZeroXi : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Coupling from the past did not coalesce within the horizon cap.
class CoalescenceCap : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fkan
