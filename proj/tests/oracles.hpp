#pragma once

// Slow reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "ratecraft/core.hpp"
#include "ratecraft/rates.hpp"

namespace oracle {

inline double simpson(const std::function<double(double)>& g, double a, double b, int n) {
  if (b <= a) return 0.0;
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += g(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Simpson at n, 2n and 4n combined by two Richardson steps; exact for
// polynomials up to degree 7.
inline double romberg(const std::function<double(double)>& g, double a, double b, int n) {
  const double s1 = simpson(g, a, b, n), s2 = simpson(g, a, b, 2 * n), s4 = simpson(g, a, b, 4 * n);
  const double b1 = (16.0 * s2 - s1) / 15.0, b2 = (16.0 * s4 - s2) / 15.0;
  return (64.0 * b2 - b1) / 63.0;
}

// ∫∫ w over {a <= lo < hi <= b}, iterated extrapolated Simpson.
inline double triangle_mass(const ratecraft::WeightSpec& w, double a, double b, int n = 4) {
  return romberg([&](double hi) { return romberg([&](double lo) { return w(hi, lo); }, a, hi, n); },
                 a, b, n);
}

struct Enumerated {
  std::vector<int> cuts;  // interior breakpoints as grid indices
  double within = std::numeric_limits<double>::infinity();
  double runner_up = std::numeric_limits<double>::infinity();
};

// Exhaustive search over interior grid breakpoints minimizing within-interval
// mass. First minimum in lexicographic order wins.
inline Enumerated enumerate_partitions(const ratecraft::WeightSpec& w, int intervals, int grid) {
  std::vector<double> mass((grid + 1) * (grid + 1), 0.0);
  for (int a = 0; a <= grid; ++a) {
    for (int b = a + 1; b <= grid; ++b) {
      mass[a * (grid + 1) + b] = triangle_mass(w, double(a) / grid, double(b) / grid);
    }
  }
  Enumerated best;
  std::vector<int> cuts(intervals - 1);
  std::function<void(int, int, double)> rec = [&](int depth, int start, double acc) {
    if (depth == intervals - 1) {
      const int last = cuts.empty() ? 0 : cuts.back();
      const double value = acc + mass[last * (grid + 1) + grid];
      if (value < best.within - 1e-13) {
        best.runner_up = best.within;
        best.within = value;
        best.cuts = cuts;
      } else if (value < best.runner_up) {
        best.runner_up = value;
      }
      return;
    }
    const int prev = depth == 0 ? 0 : cuts[depth - 1];
    for (int c = start; c <= grid - (intervals - 1 - depth); ++c) {
      cuts[depth] = c;
      rec(depth + 1, c + 1, acc + mass[prev * (grid + 1) + c]);
    }
  };
  rec(0, 1, 0.0);
  return best;
}

// Grid search over interior levels with a local refinement pass; returns the
// best overall rate found.
inline double brute_force_rate(int levels, const std::vector<double>& g, double step, double fine) {
  const int interior = levels - 2;
  std::vector<double> t(levels);
  t.front() = 0.0;
  t.back() = 1.0;
  auto eval = [&](const std::vector<double>& x) {
    for (int i = 0; i < interior; ++i) t[i + 1] = x[i];
    for (int i = 0; i + 1 < levels; ++i) {
      if (!(t[i] < t[i + 1])) return 0.0;
    }
    return ratecraft::overall_rate(t, g);
  };
  std::vector<double> best_x(interior, 0.0);
  double best = -1.0;
  const int n = static_cast<int>(std::lround(1.0 / step));
  std::vector<double> x(interior);
  std::function<void(int)> coarse = [&](int d) {
    if (d == interior) {
      const double r = eval(x);
      if (r > best) {
        best = r;
        best_x = x;
      }
      return;
    }
    for (int i = 1; i < n; ++i) {
      x[d] = i * step;
      coarse(d + 1);
    }
  };
  coarse(0);
  // Local refinement around the coarse optimum.
  const int m = static_cast<int>(std::lround(2.0 * step / fine));
  const std::vector<double> centre = best_x;
  std::function<void(int)> local = [&](int d) {
    if (d == interior) {
      const double r = eval(x);
      if (r > best) best = r;
      return;
    }
    for (int i = -m / 2; i <= m / 2; ++i) {
      x[d] = std::clamp(centre[d] + i * fine, 0.0, 1.0);
      local(d + 1);
    }
  };
  local(0);
  return best;
}

}  // namespace oracle
