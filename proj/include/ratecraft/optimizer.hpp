#pragma once

// Optimal rating levels t*: the equal-rate chain solved by nested bisection,
// the closed-form doubling transform for uniform matching, and checks on the
// result.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ratecraft/core.hpp"
#include "ratecraft/partition.hpp"

namespace ratecraft {

struct SolverConfig {
  double tol = 1e-12;  // bisection grid width δ
  int max_outer = 200;
  int max_inner = 200;
  // Allowed spread among adjacent rates, relative to max(1, rate).
  double residual_tol = 1e-9;
};

void validate(const SolverConfig& cfg);

/// Interior levels lo < t_1 < ... < t_count < hi making all count+1 adjacent
/// pairwise rates equal. `g` holds count+2 match rates, low to high.
///
/// Outer bisection on t_count; for each guess the rate against `hi` is the
/// target and every lower level is bisected to the smallest value whose rate
/// to its upper neighbour does not exceed it. The rate of the bottom pair
/// decides which half of the bracket to keep.
///
/// `top_lower_bound` narrows the initial bracket for t_count (defaults to lo).
std::vector<double> equalize_chain(double lo, double hi, std::size_t count,
                                   std::span<const double> g, const SolverConfig& cfg = {},
                                   std::optional<double> top_lower_bound = std::nullopt);

struct LevelSolution {
  StepBeta beta;  // equispaced breakpoints; see with_breakpoints()
  double rate;    // overall rate; +inf for the degenerate M = 2 design
  double residual_spread;
  bool degenerate;  // M = 2: rate is infinite and must not be compared
};

/// Optimal levels with t_0 = 0, t_{M-1} = 1. For nondecreasing g the outer
/// bracket starts at 1 - 1/(M-1).
LevelSolution nested_bisection(std::size_t levels, const MatchProfile& g,
                               const SolverConfig& cfg = {});

/// Same levels on a different partition (the pair S*, t* of a design).
StepBeta with_breakpoints(const StepBeta& beta, const Partition& partition);

/// Optimal (2M-1)-level design from an optimal M-level one under uniform
/// matching: even levels are copied and odd levels filled in closed form.
StepBeta double_levels(const StepBeta& beta, const MatchProfile& g);
StepBeta double_levels(const StepBeta& beta);

struct EqualizationReport {
  std::vector<double> rates;
  double spread = 0.0;
  bool pass = false;
};

EqualizationReport verify_equalization(const StepBeta& beta, const MatchProfile& g,
                                       double residual_tol = SolverConfig{}.residual_tol);

}  // namespace ratecraft
