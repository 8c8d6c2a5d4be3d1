#include "ratecraft/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ratecraft/rates.hpp"

namespace ratecraft {

namespace {

double allowed_spread(double residual_tol, std::span<const double> rates) {
  double scale = 1.0;
  for (double r : rates) {
    if (std::isfinite(r)) scale = std::max(scale, r);
  }
  return residual_tol * scale;
}

double spread_of(std::span<const double> rates) {
  if (rates.size() < 2) return 0.0;
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  return *hi - *lo;
}

class ChainSolver {
 public:
  ChainSolver(double lo, double hi, std::size_t count, std::span<const double> g,
              const SolverConfig& cfg)
      : lo_(lo), hi_(hi), g_(g), cfg_(cfg), chain_(count + 2) {
    chain_.front() = lo;
    chain_.back() = hi;
  }

  // Fixes the top interior level and propagates the equal-rate chain down.
  // Returns the target rate (top pair).
  double fill(double top) {
    const std::size_t count = chain_.size() - 2;
    chain_[count] = top;
    const double target = pairwise_rate(top, hi_, g_[count], g_[count + 1]);
    for (std::size_t m = count - 1; m >= 1; --m) {
      chain_[m] = bisect_next(chain_[m + 1], target, g_[m], g_[m + 1]);
    }
    return target;
  }

  double bottom_rate() const { return pairwise_rate(lo_, chain_[1], g_[0], g_[1]); }

  const std::vector<double>& chain() const { return chain_; }

 private:
  // Smallest level below `upper` whose rate to `upper` does not exceed the
  // target: the right end of the final bisection interval.
  double bisect_next(double upper, double target, double g_lo, double g_hi) const {
    double left = lo_;
    double right = upper - cfg_.tol;
    if (right <= left) return left;
    int iterations = 0;
    while (right - left > cfg_.tol / 2) {
      if (++iterations > cfg_.max_inner) {
        throw ConvergenceError("inner bisection exceeded its iteration cap");
      }
      const double mid = 0.5 * (left + right);
      if (pairwise_rate(mid, upper, g_lo, g_hi) <= target) {
        right = mid;
      } else {
        left = mid;
      }
    }
    return right;
  }

  double lo_;
  double hi_;
  std::span<const double> g_;
  const SolverConfig& cfg_;
  std::vector<double> chain_;
};

}  // namespace

void validate(const SolverConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw ValidationError("solver tolerance must be positive");
  if (!(cfg.residual_tol > 0.0)) throw ValidationError("residual tolerance must be positive");
  if (cfg.max_outer <= 0 || cfg.max_inner <= 0) {
    throw ValidationError("iteration caps must be positive");
  }
}

std::vector<double> equalize_chain(double lo, double hi, std::size_t count,
                                   std::span<const double> g, const SolverConfig& cfg,
                                   std::optional<double> top_lower_bound) {
  validate(cfg);
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
    throw ValidationError("equalize_chain needs 0 <= lo < hi <= 1");
  }
  if (count < 1) throw ValidationError("equalize_chain needs at least one interior level");
  if (g.size() != count + 2) {
    std::ostringstream out;
    out << "equalize_chain with " << count << " interior levels needs " << count + 2
        << " match rates, got " << g.size();
    throw ValidationError(out.str());
  }
  for (double v : g) {
    if (!(v > 0.0)) throw ValidationError("match rates must be positive");
  }

  ChainSolver solver(lo, hi, count, g, cfg);
  double left = std::clamp(top_lower_bound.value_or(lo), lo, hi);
  double right = hi - cfg.tol;
  if (right < left) left = right;
  int iterations = 0;
  while (right - left > cfg.tol / 2) {
    if (++iterations > cfg.max_outer) {
      throw ConvergenceError("outer bisection exceeded its iteration cap");
    }
    const double guess = 0.5 * (left + right);
    const double target = solver.fill(guess);
    if (solver.bottom_rate() < target) {
      left = guess;
    } else {
      right = guess;
    }
  }
  solver.fill(right);

  const auto& chain = solver.chain();
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (!(chain[i] > chain[i - 1])) {
      throw ConvergenceError("bisection collapsed two adjacent levels; tolerance too coarse");
    }
  }
  std::vector<double> rates(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    rates[i] = pairwise_rate(chain[i], chain[i + 1], g[i], g[i + 1]);
  }
  const double spread = spread_of(rates);
  if (spread > allowed_spread(cfg.residual_tol, rates)) {
    std::ostringstream out;
    out << "equal-rate chain did not converge: spread " << spread << " exceeds tolerance";
    throw ConvergenceError(out.str());
  }
  return {chain.begin() + 1, chain.end() - 1};
}

LevelSolution nested_bisection(std::size_t levels, const MatchProfile& g,
                               const SolverConfig& cfg) {
  if (levels < 2) throw ValidationError("need at least two levels");
  if (g.size() != levels) {
    std::ostringstream out;
    out << "match profile has " << g.size() << " entries for " << levels << " levels";
    throw ValidationError(out.str());
  }
  validate(cfg);
  const auto s = equispaced_breakpoints(levels);
  if (levels == 2) {
    return LevelSolution{StepBeta(s, {0.0, 1.0}), pairwise_rate(0.0, 1.0, g[0], g[1]), 0.0, true};
  }

  std::optional<double> bracket;
  if (g.nondecreasing()) bracket = 1.0 - 1.0 / static_cast<double>(levels - 1);
  const auto interior = equalize_chain(0.0, 1.0, levels - 2, g.values(), cfg, bracket);

  std::vector<double> t{0.0};
  t.insert(t.end(), interior.begin(), interior.end());
  t.push_back(1.0);
  StepBeta beta(s, std::move(t));
  const auto report = verify_equalization(beta, g, cfg.residual_tol);
  const double rate = overall_rate(beta.levels(), g.values());
  return LevelSolution{std::move(beta), rate, report.spread, false};
}

StepBeta with_breakpoints(const StepBeta& beta, const Partition& partition) {
  return StepBeta(partition.breakpoints, beta.levels());
}

StepBeta double_levels(const StepBeta& beta, const MatchProfile& g) {
  if (g.size() != beta.size()) throw ValidationError("match profile does not match design size");
  const auto& values = g.values();
  if (std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) != values.end()) {
    throw ValidationError("level doubling is only valid under uniform matching");
  }
  return double_levels(beta);
}

StepBeta double_levels(const StepBeta& beta) {
  const auto& t = beta.levels();
  const std::size_t m = t.size();
  if (m < 2 || t.front() != 0.0 || t.back() != 1.0) {
    throw ValidationError("level doubling needs an optimal design with t_0 = 0 and t_{M-1} = 1");
  }
  const std::size_t n = 2 * m - 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < m; ++i) out[2 * i] = t[i];
  out[1] = 0.5 * (1.0 - std::sqrt(1.0 - t[1]));
  if (m >= 3) {
    out[n - 2] = 0.5 * (1.0 + std::sqrt(t[m - 2]));
    for (std::size_t k = 3; k + 2 < n; k += 2) {
      const double below = out[k - 1];
      const double above = out[k + 1];
      const double ratio =
          (std::sqrt(1.0 - above) - std::sqrt(1.0 - below)) / (std::sqrt(below) - std::sqrt(above));
      const double c = ratio * ratio;
      out[k] = c / (1.0 + c);
    }
  }
  return StepBeta(equispaced_breakpoints(n), std::move(out));
}

EqualizationReport verify_equalization(const StepBeta& beta, const MatchProfile& g,
                                       double residual_tol) {
  if (g.size() != beta.size()) throw ValidationError("match profile does not match design size");
  const auto& t = beta.levels();
  EqualizationReport report;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    report.rates.push_back(pairwise_rate(t[i], t[i + 1], g[i], g[i + 1]));
  }
  report.spread = spread_of(report.rates);
  report.pass = report.spread <= allowed_spread(residual_tol, report.rates);
  return report;
}

}  // namespace ratecraft
