#include "ratecraft/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ratecraft {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-12;

// Within-interval weight mass for intervals made of whole grid cells, O(1)
// per query from a 2-D prefix sum over cell-pair masses.
class CellMasses {
 public:
  CellMasses(const WeightSpec& w, std::size_t grid)
      : grid_(grid), prefix_((grid + 1) * (grid + 1), 0.0), diagonal_(grid + 1, 0.0) {
    const PairFunction f = [&w](double hi, double lo) { return w(hi, lo); };
    const double h = 1.0 / static_cast<double>(grid);
    const auto edge = [&](std::size_t i) { return i == grid ? 1.0 : h * static_cast<double>(i); };
    std::vector<double> row(grid + 1, 0.0);
    for (std::size_t i = 0; i < grid; ++i) {
      // row[b] = Σ_{j<b} mass(cell i, cell j), zero for j >= i.
      row[0] = 0.0;
      for (std::size_t j = 0; j < grid; ++j) {
        const double m =
            j < i ? rectangle_integral(f, edge(i), edge(i + 1), edge(j), edge(j + 1)) : 0.0;
        row[j + 1] = row[j] + m;
      }
      for (std::size_t b = 0; b <= grid; ++b) at(i + 1, b) = at(i, b) + row[b];
      diagonal_[i + 1] = diagonal_[i] + triangle_integral(f, edge(i), edge(i + 1), 1);
    }
  }

  double within(std::size_t p, std::size_t q) const {
    return at(q, q) - at(p, q) - at(q, p) + at(p, p) + diagonal_[q] - diagonal_[p];
  }

 private:
  double& at(std::size_t a, std::size_t b) { return prefix_[a * (grid_ + 1) + b]; }
  double at(std::size_t a, std::size_t b) const { return prefix_[a * (grid_ + 1) + b]; }

  std::size_t grid_;
  std::vector<double> prefix_;
  std::vector<double> diagonal_;
};

// The within-interval cost satisfies the quadrangle inequality (the excess is
// the weight mass of a rectangle, which is nonnegative), so the leftmost
// optimal split is monotone in p and divide-and-conquer applies.
void solve_layer(const CellMasses& cells, const std::vector<double>& next, std::vector<double>& out,
                 std::size_t grid, std::size_t remaining, std::size_t p_lo, std::size_t p_hi,
                 std::size_t q_lo, std::size_t q_hi) {
  if (p_lo > p_hi) return;
  const std::size_t p = p_lo + (p_hi - p_lo) / 2;
  const std::size_t first = std::max(q_lo, p + 1);
  const std::size_t last = std::min(q_hi, grid - remaining);
  double best = kInf;
  std::size_t best_q = first;
  for (std::size_t q = first; q <= last; ++q) {
    const double v = cells.within(p, q) + next[q];
    if (v < best) {
      best = v;
      best_q = q;
    }
  }
  out[p] = best;
  if (p > p_lo) solve_layer(cells, next, out, grid, remaining, p_lo, p - 1, q_lo, best_q);
  solve_layer(cells, next, out, grid, remaining, p + 1, p_hi, best_q, q_hi);
}

}  // namespace

Partition make_partition(std::vector<double> breakpoints) {
  if (breakpoints.size() < 2) throw ValidationError("partition needs at least two breakpoints");
  if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0) {
    throw ValidationError("partition must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) {
      std::ostringstream out;
      out << "s[" << i << "] is not strictly increasing";
      throw ValidationError(out.str());
    }
  }
  return Partition{std::move(breakpoints), std::nullopt};
}

Partition equispaced_partition(std::size_t intervals) {
  if (intervals < 2) throw ValidationError("need at least two intervals");
  return Partition{equispaced_breakpoints(intervals), std::nullopt};
}

double within_mass(const WeightSpec& w, double a, double b) {
  const auto cells = static_cast<std::size_t>(std::max(4.0, std::ceil((b - a) * 256.0)));
  return triangle_integral([&w](double hi, double lo) { return w(hi, lo); }, a, b, cells);
}

double asymptotic_value(const Partition& partition, const WeightSpec& w) {
  double within = 0.0;
  for (std::size_t i = 0; i + 1 < partition.breakpoints.size(); ++i) {
    within += within_mass(w, partition.breakpoints[i], partition.breakpoints[i + 1]);
  }
  return std::clamp(1.0 - within, 0.0, 1.0);
}

Partition optimize_partition(const WeightSpec& w, std::size_t intervals, std::size_t grid) {
  if (intervals < 2) throw ValidationError("need at least two intervals");
  if (grid < 10 * intervals) {
    std::ostringstream out;
    out << "grid " << grid << " is too small for " << intervals << " intervals (need >= "
        << 10 * intervals << ")";
    throw ValidationError(out.str());
  }

  const CellMasses cells(w, grid);

  // best[m][p]: minimal within mass splitting cells [p, grid) into m intervals.
  std::vector<std::vector<double>> best(intervals + 1, std::vector<double>(grid + 1, kInf));
  best[0][grid] = 0.0;
  for (std::size_t p = 0; p < grid; ++p) best[1][p] = cells.within(p, grid);
  for (std::size_t m = 2; m <= intervals; ++m) {
    solve_layer(cells, best[m - 1], best[m], grid, m - 1, 0, grid - m, 1, grid);
  }

  // Greedy reconstruction from the left picks the smallest feasible
  // breakpoint at each position, which yields the lexicographic minimum.
  std::vector<double> s{0.0};
  std::size_t p = 0;
  for (std::size_t m = intervals; m >= 2; --m) {
    const double target = best[m][p];
    std::size_t chosen = grid;
    for (std::size_t q = p + 1; q + (m - 1) <= grid; ++q) {
      if (cells.within(p, q) + best[m - 1][q] <= target + kTieTolerance) {
        chosen = q;
        break;
      }
    }
    s.push_back(static_cast<double>(chosen) / static_cast<double>(grid));
    p = chosen;
  }
  s.push_back(1.0);

  Partition result = make_partition(std::move(s));
  result.value = std::clamp(1.0 - best[intervals][0], 0.0, 1.0);
  return result;
}

}  // namespace ratecraft
