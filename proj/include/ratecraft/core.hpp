#pragma once

// Domain types shared by every module: stepwise rating functions, match
// profiles, pairwise objective weights, and empirical question banks.
//
// Quality θ is always an item's quantile in [0,1].

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ratecraft/error.hpp"

namespace ratecraft {

/// Stepwise increasing rating function: β(θ) = t_i for θ ∈ [s_i, s_{i+1}).
///
/// Breakpoints s_0 = 0 < s_1 < ... < s_M = 1 and levels t_0 < ... < t_{M-1},
/// all in [0,1]. θ = 1 maps to the last level.
class StepBeta {
 public:
  StepBeta(std::vector<double> breakpoints, std::vector<double> levels);

  std::size_t size() const { return levels_.size(); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& levels() const { return levels_; }

  std::size_t interval_of(double theta) const;
  double operator()(double theta) const { return levels_[interval_of(theta)]; }

  friend bool operator==(const StepBeta&, const StepBeta&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> levels_;
};

/// Validated constructor; the error message names the offending index.
StepBeta make_step_beta(std::vector<double> breakpoints, std::vector<double> levels);

/// Breakpoints i/M, i = 0..M.
std::vector<double> equispaced_breakpoints(std::size_t intervals);

enum class MatchKind { uniform, linear, table };

std::string_view to_string(MatchKind kind);
MatchKind parse_match_kind(std::string_view name);

/// The "linear search" match function (1 + 10θ)/11.
inline double linear_match(double theta) { return (1.0 + 10.0 * theta) / 11.0; }

/// Per-interval match rates g_i = inf over S_i of g(θ).
///
/// Function-backed kinds are sampled at interval left endpoints, which is the
/// infimum for nondecreasing g.
class MatchProfile {
 public:
  static MatchProfile uniform(std::size_t intervals);
  static MatchProfile linear(std::span<const double> breakpoints);
  static MatchProfile table(std::vector<double> values);

  MatchKind kind() const { return kind_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  bool nondecreasing() const;

 private:
  MatchProfile(MatchKind kind, std::vector<double> values);

  MatchKind kind_;
  std::vector<double> values_;
};

/// Builds the profile of `kind` for the given breakpoints. `table_values`
/// is only consulted for MatchKind::table.
MatchProfile make_match_profile(MatchKind kind, std::span<const double> breakpoints,
                                std::span<const double> table_values = {});

enum class WeightKind { kendall, spearman, top, bottom, extremes, custom };

std::string_view to_string(WeightKind kind);
WeightKind parse_weight_kind(std::string_view name);

/// Pairwise objective weight w(θ1, θ2), θ1 > θ2, scaled so that its integral
/// over the triangle {θ1 > θ2} is one.
class WeightSpec {
 public:
  WeightKind kind() const { return kind_; }
  double scale() const { return scale_; }

  /// Unscaled weight.
  double raw(double hi, double lo) const;
  double operator()(double hi, double lo) const { return scale_ * raw(hi, lo); }

  /// Custom weights are tabulated on an n x n grid of cells; entry
  /// (i, j) holds w for θ1 in cell i and θ2 in cell j.
  std::size_t table_size() const { return table_n_; }
  const std::vector<double>& table() const { return table_; }

 private:
  friend WeightSpec normalize_weight(WeightKind, std::size_t);
  friend WeightSpec normalize_weight(std::vector<double>, std::size_t, std::size_t);

  WeightKind kind_ = WeightKind::kendall;
  double scale_ = 1.0;
  std::vector<double> table_;
  std::size_t table_n_ = 0;
};

inline constexpr std::size_t kDefaultQuadratureGrid = 1000;

/// Named kinds use their closed-form constants (2, 6, 30, 30, 672).
WeightSpec normalize_weight(WeightKind kind, std::size_t grid = kDefaultQuadratureGrid);

/// Custom tabulated weight, row-major n x n. Entries on or below the diagonal
/// (θ1 cell >= θ2 cell) must be positive.
WeightSpec normalize_weight(std::vector<double> raw_table, std::size_t n,
                            std::size_t grid = kDefaultQuadratureGrid);

using PairFunction = std::function<double(double, double)>;

/// ∫∫ f(θ1, θ2) over {lo <= θ2 < θ1 < hi}, composite rule on `cells` cells per
/// side: 3x3 Gauss-Legendre on off-diagonal squares and a degree-5 seven-point
/// rule on the diagonal half-cells. Exact for the polynomial named weights.
double triangle_integral(const PairFunction& f, double lo, double hi, std::size_t cells);

/// ∫∫ f over the rectangle θ1 ∈ [a1,b1), θ2 ∈ [a2,b2), 3x3 Gauss-Legendre.
double rectangle_integral(const PairFunction& f, double a1, double b1, double a2, double b2);

/// Empirical positive-response probabilities ψ̂(θ, y) on representative
/// qualities Θ (strictly increasing, inside (0,1)) and questions 𝒴.
class QuestionBank {
 public:
  struct Counts {
    std::vector<long long> positives;
    std::vector<long long> totals;
  };

  QuestionBank(std::vector<double> qualities, std::vector<std::string> questions,
               std::vector<double> psi, std::optional<Counts> counts = std::nullopt);

  /// Builds ψ̂ = positives/total per cell.
  static QuestionBank from_counts(std::vector<double> qualities,
                                  std::vector<std::string> questions,
                                  std::vector<long long> positives,
                                  std::vector<long long> totals);

  const std::vector<double>& qualities() const { return qualities_; }
  const std::vector<std::string>& questions() const { return questions_; }
  const std::optional<Counts>& counts() const { return counts_; }

  std::size_t rows() const { return qualities_.size(); }
  std::size_t cols() const { return questions_.size(); }
  double psi(std::size_t row, std::size_t col) const { return psi_[row * cols() + col]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(psi_).subspan(r * cols(), cols());
  }
  const std::vector<double>& data() const { return psi_; }

 private:
  std::vector<double> qualities_;
  std::vector<std::string> questions_;
  std::vector<double> psi_;
  std::optional<Counts> counts_;
};

/// A distribution H over the questions of a bank, with the L1 objective of
/// the fit that produced it.
struct QuestionDistribution {
  std::vector<std::string> questions;
  std::vector<double> probabilities;
  double objective = 0.0;
};

/// Validates simplex constraints (sum 1 within 1e-12, nonnegative).
void validate_distribution(const QuestionDistribution& h);

QuestionDistribution uniform_distribution(std::vector<std::string> questions);

}  // namespace ratecraft
