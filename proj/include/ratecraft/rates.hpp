#pragma once

// Bernoulli KL divergence and the large-deviations rates built from it.
// All rates are in nats per time step.

#include <cstddef>
#include <span>

#include "ratecraft/core.hpp"

namespace ratecraft {

/// KL(a || t) for Bernoulli success probabilities. Infinite when t ∈ {0,1}
/// and a != t; 0·log 0 = 0.
double kl_bernoulli(double a, double t);

/// Rate at which two adjacent levels are separated, with the minimizing
/// point of g_lo·KL(a||t_lo) + g_hi·KL(a||t_hi).
struct PairRate {
  double t_lo;
  double t_hi;
  double g_lo;
  double g_hi;
  double a_star;
  double rate;
};

/// a* = c/(1+c), c = [(t_lo/(1-t_lo))^g_lo (t_hi/(1-t_hi))^g_hi]^(1/(g_lo+g_hi)).
double inf_point(double t_lo, double t_hi, double g_lo, double g_hi);

/// Closed form -(g_lo+g_hi) log[(1-t_lo)^p (1-t_hi)^q + t_lo^p t_hi^q],
/// p = g_lo/(g_lo+g_hi), q = g_hi/(g_lo+g_hi). The ends use their exact
/// forms r(0,t) = -g_hi log(1-t) and r(t,1) = -g_lo log t; r(0,1) = +inf.
double pairwise_rate(double t_lo, double t_hi, double g_lo, double g_hi);

PairRate pair_rate(double t_lo, double t_hi, double g_lo, double g_hi);

/// Brute-force oracle: grid minimum over a ∈ {0, 1/grid, ..., 1}, refined by
/// ternary search on the bracketing cells.
double numeric_pairwise_rate(double t_lo, double t_hi, double g_lo, double g_hi,
                             std::size_t grid = 10000);

/// min over adjacent pairs of pairwise_rate(t_i, t_{i+1}, g_i, g_{i+1}).
/// Accepts non-strict level vectors; equal neighbours give 0.
double overall_rate(std::span<const double> levels, std::span<const double> g);
double overall_rate(const StepBeta& beta, const MatchProfile& g);

}  // namespace ratecraft
