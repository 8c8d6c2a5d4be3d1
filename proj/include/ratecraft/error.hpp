#pragma once

#include <stdexcept>
#include <string>

namespace ratecraft {

/// Bad input: malformed design, out-of-range probability, schema violation.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A bisection or simplex loop ran out of iterations or failed its
/// post-hoc residual check.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ratecraft
