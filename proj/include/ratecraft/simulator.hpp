#pragma once

// Finite-market Monte Carlo: items with i.i.d. uniform quality are matched to
// buyers by observed rank, rated through a design (a direct β or a question
// distribution over an interpolated ψ), and scored by positive fraction.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "ratecraft/core.hpp"
#include "ratecraft/psi.hpp"

namespace ratecraft {

enum class Matching { uniform, linear };

std::string_view to_string(Matching m);
Matching parse_matching(std::string_view name);

/// Ratings drawn by showing question y ~ H and answering with ψ(θ, y).
struct QuestionDesign {
  QuestionDistribution h;
  PsiInterpolator psi;
};

using RatingDesign = std::variant<StepBeta, QuestionDesign>;

struct SimConfig {
  std::size_t n_items = 500;
  std::size_t n_buyers = 100;
  std::size_t steps = 1000;
  double death_prob = 0.0;
  Matching matching = Matching::uniform;
  RatingDesign design = StepBeta({0.0, 0.5, 1.0}, {0.0, 1.0});
  std::vector<WeightKind> metrics{WeightKind::kendall};
  std::uint64_t seed = 0;
  std::size_t replicates = 1;
  // Recording: every step up to dense_until, then every stride steps; the
  // final step is always recorded. Nothing before burn_in.
  std::size_t dense_until = 100;
  std::size_t stride = 10;
  std::size_t burn_in = 0;
  std::size_t jobs = 1;
};

void validate(const SimConfig& cfg);

std::vector<std::size_t> recording_schedule(const SimConfig& cfg);

/// Seed of replicate i, derived from the master seed by a splitmix64 mix.
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t below(std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
  }

 private:
  std::mt19937_64 engine_;
};

struct MarketState {
  std::vector<double> quality;
  std::vector<long long> positives;
  std::vector<long long> totals;
  std::vector<std::uint64_t> ids;
  std::uint64_t next_id = 0;
  // Per item: β(θ) for a direct design, ψ(θ, ·) for a question design.
  std::vector<double> response_probs;
  std::size_t probs_per_item = 1;

  std::size_t size() const { return quality.size(); }
  double score(std::size_t i) const {
    return totals[i] == 0 ? 0.0
                          : static_cast<double>(positives[i]) / static_cast<double>(totals[i]);
  }
  long long total_ratings() const;
};

MarketState init_market(const SimConfig& cfg, Rng& rng);
MarketState init_market(const SimConfig& cfg, std::uint64_t seed);

/// One period: match n_buyers times by observed rank, rate, update scores,
/// then replace each item with probability death_prob.
void step_market(MarketState& state, const SimConfig& cfg, Rng& rng);

/// Observed rank quantiles (rank − ½)/n by score, ties by item id.
std::vector<double> rank_quantiles(const MarketState& state);

/// Finite-sample objective: weighted fraction of correctly minus incorrectly
/// ordered pairs; ties count zero. In [−1, 1].
double empirical_objective(const MarketState& state, const WeightSpec& w);

struct SeriesPoint {
  std::size_t replicate;
  std::size_t k;
  WeightKind metric;
  double value;
};

struct SummaryPoint {
  std::size_t k;
  WeightKind metric;
  double mean;
  double std_error;
  std::size_t replicates;
};

struct SimResult {
  std::vector<SeriesPoint> series;  // ordered by replicate, then k, then metric
  std::vector<SummaryPoint> summary;

  /// Per-replicate values of `metric` at step k, indexed by replicate.
  std::vector<double> values_at(WeightKind metric, std::size_t k) const;
};

SimResult run_simulation(const SimConfig& cfg);

struct RateEstimate {
  double slope = 0.0;
  double std_error = 0.0;
  std::size_t k_first = 0;
  std::size_t k_last = 0;
  std::vector<double> error_mass;  // index k - 1
};

/// Monte Carlo large-deviations rate of the pairwise error mass for two items
/// with rating probabilities t1 > t2 and match rates g1, g2: least-squares
/// slope of −log P̄_k over the k where P̄_k ∈ [10/reps, 0.1]. P̄_k is
/// Pr(x1 < x2) + ½ Pr(x1 = x2).
RateEstimate estimate_pk_rate(double t1, double t2, double g1, double g2, std::size_t k_max,
                              std::size_t reps, std::uint64_t seed);

}  // namespace ratecraft
