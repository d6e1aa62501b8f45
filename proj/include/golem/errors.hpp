#pragma once

#include <stdexcept>

namespace golem {

// Base for all library failures so callers can catch one type at the boundary.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericOverflowError : Error {
  using Error::Error;
};

struct SingularMatrixError : Error {
  using Error::Error;
};

struct DegenerateResidualError : Error {
  using Error::Error;
};

struct UndefinedMetricError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace golem
