#pragma once

#include <stdexcept>

namespace pinstop {

// Numerical failures (as opposed to invalid configuration, which throws
// std::invalid_argument).  The CLI maps these to distinct exit codes.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridTooCoarse : NumericalError {
  using NumericalError::NumericalError;
};

struct NoConvergence : NumericalError {
  NoConvergence(const std::string& what, double last_change_)
      : NumericalError(what), last_change(last_change_) {}
  double last_change;
};

}  // namespace pinstop
