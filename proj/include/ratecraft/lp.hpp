#pragma once

// Small dense two-phase simplex for min c'x s.t. Ax = b, x >= 0.
// Bland's rule (lowest-index entering column, lowest-index leaving basic
// variable on ratio ties) keeps pivoting deterministic and cycle-free.

#include <cstddef>
#include <vector>

#include "ratecraft/error.hpp"

namespace ratecraft::lp {

struct Problem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // row-major rows x cols
  std::vector<double> b;
  std::vector<double> c;
};

struct Solution {
  std::vector<double> x;
  double objective = 0.0;
  int pivots = 0;
};

class InfeasibleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnboundedError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

Solution minimize(const Problem& problem, int max_pivots = 100000);

}  // namespace ratecraft::lp
