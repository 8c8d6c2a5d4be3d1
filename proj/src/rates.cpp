#include "ratecraft/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ratecraft {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream out;
    out << name << " = " << p << " is outside [0,1]";
    throw ValidationError(out.str());
  }
}

void check_pair(double t_lo, double t_hi, double g_lo, double g_hi) {
  check_probability(t_lo, "t_lo");
  check_probability(t_hi, "t_hi");
  if (t_lo > t_hi) throw ValidationError("t_lo exceeds t_hi");
  if (!(g_lo > 0.0) || !(g_hi > 0.0) || !std::isfinite(g_lo) || !std::isfinite(g_hi)) {
    throw ValidationError("match rates must be positive");
  }
}

// a log(a/t) with 0 log 0 = 0; t = 0 < a is infinite.
double xlogx_over(double a, double t) {
  if (a == 0.0) return 0.0;
  if (t == 0.0) return kInf;
  return a * std::log(a / t);
}

double kl_sum(double a, double t_lo, double t_hi, double g_lo, double g_hi) {
  return g_lo * kl_bernoulli(a, t_lo) + g_hi * kl_bernoulli(a, t_hi);
}

}  // namespace

double kl_bernoulli(double a, double t) {
  check_probability(a, "a");
  check_probability(t, "t");
  if (a == t) return 0.0;
  return xlogx_over(a, t) + xlogx_over(1.0 - a, 1.0 - t);
}

double inf_point(double t_lo, double t_hi, double g_lo, double g_hi) {
  check_pair(t_lo, t_hi, g_lo, g_hi);
  if (t_lo == t_hi) return t_lo;
  if (t_lo == 0.0 && t_hi == 1.0) return 0.5;  // objective is infinite everywhere
  if (t_lo == 0.0) return 0.0;
  if (t_hi == 1.0) return 1.0;
  const auto logit = [](double t) { return std::log(t) - std::log1p(-t); };
  const double log_c = (g_lo * logit(t_lo) + g_hi * logit(t_hi)) / (g_lo + g_hi);
  const double a = 1.0 / (1.0 + std::exp(-log_c));
  return std::clamp(a, t_lo, t_hi);
}

double pairwise_rate(double t_lo, double t_hi, double g_lo, double g_hi) {
  check_pair(t_lo, t_hi, g_lo, g_hi);
  if (t_lo == t_hi) return 0.0;
  if (t_lo == 0.0 && t_hi == 1.0) return kInf;
  if (t_lo == 0.0) return -g_hi * std::log1p(-t_hi);
  if (t_hi == 1.0) return -g_lo * std::log(t_lo);
  const double total = g_lo + g_hi;
  const double p = g_lo / total;
  const double q = g_hi / total;
  const double fail = std::exp(p * std::log1p(-t_lo) + q * std::log1p(-t_hi));
  const double pass = std::exp(p * std::log(t_lo) + q * std::log(t_hi));
  return std::max(0.0, -total * std::log(fail + pass));
}

PairRate pair_rate(double t_lo, double t_hi, double g_lo, double g_hi) {
  return PairRate{t_lo, t_hi, g_lo, g_hi, inf_point(t_lo, t_hi, g_lo, g_hi),
                  pairwise_rate(t_lo, t_hi, g_lo, g_hi)};
}

double numeric_pairwise_rate(double t_lo, double t_hi, double g_lo, double g_hi,
                             std::size_t grid) {
  check_pair(t_lo, t_hi, g_lo, g_hi);
  if (grid < 100) throw ValidationError("numeric rate grid must be at least 100");
  if (t_lo == t_hi) return 0.0;

  const auto n = static_cast<double>(grid);
  double best = kInf;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i <= grid; ++i) {
    const double v = kl_sum(static_cast<double>(i) / n, t_lo, t_hi, g_lo, g_hi);
    if (v < best) {
      best = v;
      best_index = i;
    }
  }

  // The objective is convex in a, so the minimizer lies in the two cells
  // around the best grid point.
  double left = static_cast<double>(best_index == 0 ? 0 : best_index - 1) / n;
  double right = static_cast<double>(std::min(grid, best_index + 1)) / n;
  for (int iter = 0; iter < 200 && right - left > 1e-15; ++iter) {
    const double m1 = left + (right - left) / 3.0;
    const double m2 = right - (right - left) / 3.0;
    if (kl_sum(m1, t_lo, t_hi, g_lo, g_hi) < kl_sum(m2, t_lo, t_hi, g_lo, g_hi)) {
      right = m2;
    } else {
      left = m1;
    }
  }
  const double refined = kl_sum(0.5 * (left + right), t_lo, t_hi, g_lo, g_hi);
  return std::min(best, refined);
}

double overall_rate(std::span<const double> levels, std::span<const double> g) {
  if (levels.size() != g.size()) {
    std::ostringstream out;
    out << "design has " << levels.size() << " levels but match profile has " << g.size();
    throw ValidationError(out.str());
  }
  if (levels.size() < 2) throw ValidationError("need at least two levels");
  double rate = kInf;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    rate = std::min(rate, pairwise_rate(levels[i], levels[i + 1], g[i], g[i + 1]));
  }
  return rate;
}

double overall_rate(const StepBeta& beta, const MatchProfile& g) {
  return overall_rate(beta.levels(), g.values());
}

}  // namespace ratecraft
