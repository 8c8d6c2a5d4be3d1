#include "ratecraft/lp.hpp"

#include <cmath>
#include <limits>

namespace ratecraft::lp {

namespace {

constexpr double kEps = 1e-11;

// Tableau with one objective row at the bottom; the last column is the
// right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), cells_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

  double& at(std::size_t r, std::size_t c) { return cells_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return cells_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double& cost(std::size_t c) { return at(rows_, c); }
  double value() const { return -at(rows_, cols_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    for (std::size_t c = 0; c <= cols_; ++c) at(row, c) /= p;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == row) continue;
      const double f = at(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(row, c);
    }
    basis_[row] = col;
  }

  // Runs simplex over columns [0, allowed). Returns pivot count.
  int run(std::size_t allowed, int max_pivots, int pivots) {
    while (true) {
      std::size_t entering = allowed;
      for (std::size_t c = 0; c < allowed; ++c) {
        if (cost(c) < -kEps) {
          entering = c;
          break;
        }
      }
      if (entering == allowed) return pivots;

      std::size_t leaving = rows_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double coef = at(r, entering);
        if (coef <= kEps) continue;
        const double ratio = rhs(r) / coef;
        if (ratio < best_ratio - kEps ||
            (std::abs(ratio - best_ratio) <= kEps && basis_[r] < basis_[leaving])) {
          best_ratio = ratio;
          leaving = r;
        }
      }
      if (leaving == rows_) throw UnboundedError("linear program is unbounded");
      if (++pivots > max_pivots) throw ConvergenceError("simplex exceeded its pivot cap");
      pivot(leaving, entering);
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> cells_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Solution minimize(const Problem& problem, int max_pivots) {
  const std::size_t m = problem.rows;
  const std::size_t n = problem.cols;
  if (problem.a.size() != m * n || problem.b.size() != m || problem.c.size() != n) {
    throw ValidationError("linear program dimensions are inconsistent");
  }

  // Phase one: artificial variable per row, b made nonnegative.
  Tableau tab(m, n + m);
  for (std::size_t r = 0; r < m; ++r) {
    const double sign = problem.b[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < n; ++c) tab.at(r, c) = sign * problem.a[r * n + c];
    tab.at(r, n + r) = 1.0;
    tab.rhs(r) = sign * problem.b[r];
    tab.basis()[r] = n + r;
  }
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) tab.cost(c) -= tab.at(r, c);
    tab.rhs(m) -= tab.rhs(r);
  }
  int pivots = tab.run(n + m, max_pivots, 0);
  if (tab.value() > 1e-9) throw InfeasibleError("linear program is infeasible");

  // Drive remaining artificials out of the basis; a row with no usable
  // column is redundant and stays pinned at zero.
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis()[r] < n) continue;
    for (std::size_t c = 0; c < n; ++c) {
      if (std::abs(tab.at(r, c)) > kEps) {
        tab.pivot(r, c);
        ++pivots;
        break;
      }
    }
  }

  // Phase two: original costs expressed in the current basis.
  for (std::size_t c = 0; c <= n + m; ++c) tab.at(m, c) = 0.0;
  for (std::size_t c = 0; c < n; ++c) tab.cost(c) = problem.c[c];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t bc = tab.basis()[r];
    if (bc >= n) continue;
    const double f = tab.cost(bc);
    if (f == 0.0) continue;
    for (std::size_t c = 0; c <= n + m; ++c) tab.at(m, c) -= f * tab.at(r, c);
  }
  pivots = tab.run(n, max_pivots, pivots);

  Solution solution;
  solution.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t bc = tab.basis()[r];
    if (bc < n) solution.x[bc] = tab.rhs(r);
  }
  solution.objective = 0.0;
  for (std::size_t c = 0; c < n; ++c) solution.objective += problem.c[c] * solution.x[c];
  solution.pivots = pivots;
  return solution;
}

}  // namespace ratecraft::lp
