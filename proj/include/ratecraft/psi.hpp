#pragma once

// Estimating ψ̂(θ, y) from binary rating data, and interpolating it over
// the whole quality range for simulation.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ratecraft/core.hpp"

namespace ratecraft {

/// One binary answer: item `item` was shown question `question`.
struct Rating {
  std::string item;
  std::string question;
  int response = 0;  // 0 or 1
};

/// Piecewise-linear in θ between anchor qualities, constant outside them.
class PsiInterpolator {
 public:
  explicit PsiInterpolator(QuestionBank bank);

  const QuestionBank& bank() const { return bank_; }
  std::size_t questions() const { return bank_.cols(); }

  double operator()(double theta, std::size_t question) const;

  /// ψ(θ, ·) for every question.
  std::vector<double> row(double theta) const;

 private:
  QuestionBank bank_;
};

/// ψ(θ, ·) as a fresh vector; blend of the two bracketing anchors.
std::vector<double> interpolate(const QuestionBank& bank, double theta);

/// Known-quality experiment: ψ̂ = positives/total per (quality, question)
/// cell. Items sharing a quality are pooled into one row. Questions are
/// ordered lexicographically unless `question_order` is given.
QuestionBank estimate_known(std::span<const Rating> ratings,
                            const std::map<std::string, double>& qualities,
                            std::span<const std::string> question_order = {});

/// Unknown-quality experiment: items are ranked by their overall positive
/// fraction (ties by item id) and the rank-i item (1-based) stands for
/// quantile (i - 1/2)/L. Every item must have exactly `per_item` responses.
QuestionBank estimate_unknown(std::span<const Rating> ratings, std::size_t items,
                              std::size_t per_item,
                              std::span<const std::string> question_order = {});

}  // namespace ratecraft
