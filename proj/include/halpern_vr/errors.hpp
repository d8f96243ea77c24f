#pragma once

#include <stdexcept>
#include <string>

namespace hvr {

/// Raised for precondition violations on public entry points.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// An iterate became nonfinite or the residual blew past the divergence
/// threshold.
class NumericalDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hvr
