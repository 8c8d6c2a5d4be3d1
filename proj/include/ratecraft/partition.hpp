#pragma once

// Optimal quality intervals S* for a pairwise weight w, and the limiting
// objective value W of a partition.

#include <cstddef>
#include <optional>
#include <vector>

#include "ratecraft/core.hpp"

namespace ratecraft {

struct Partition {
  std::vector<double> breakpoints;  // s_0 = 0 < ... < s_M = 1
  std::optional<double> value;      // asymptotic W, when computed for some w

  std::size_t intervals() const { return breakpoints.size() - 1; }
};

Partition make_partition(std::vector<double> breakpoints);

/// s_i = i/M; optimal for kendall and spearman weights.
Partition equispaced_partition(std::size_t intervals);

inline constexpr std::size_t kDefaultPartitionGrid = 2000;

/// Grid dynamic program minimizing the total within-interval weight mass
/// (equivalently maximizing the cross-interval mass). Requires grid >= 10*M.
/// Among optimal breakpoint vectors the lexicographically smallest is
/// returned.
Partition optimize_partition(const WeightSpec& w, std::size_t intervals,
                             std::size_t grid = kDefaultPartitionGrid);

/// Σ_{i<j} ∫_{θ2∈S_i, θ1∈S_j} w = 1 − Σ_i ∫∫_{S_i×S_i, θ1>θ2} w.
double asymptotic_value(const Partition& partition, const WeightSpec& w);

/// Weight mass of {a <= θ2 < θ1 < b}.
double within_mass(const WeightSpec& w, double a, double b);

}  // namespace ratecraft
