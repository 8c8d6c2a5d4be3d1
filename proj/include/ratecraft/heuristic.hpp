#pragma once

// Fitting a question distribution H so the induced positive-rating
// probability β̃(θ) = Σ_y ψ(θ,y) H(y) tracks a target β in L1 on the
// representative qualities.

#include <functional>
#include <span>

#include "ratecraft/core.hpp"
#include "ratecraft/psi.hpp"

namespace ratecraft {

enum class HConstraint { free, single_question };

struct FitOptions {
  HConstraint constraint = HConstraint::free;
  // Optional per-quality weights on the L1 terms; empty means all ones.
  std::vector<double> theta_weights;
};

/// Exact L1 fit via linear programming. Under single_question, H is the point
/// mass on the best question (ties go to the lowest index).
QuestionDistribution fit_h(const StepBeta& beta, const QuestionBank& bank,
                           const FitOptions& options = {});

/// Σ_θ |β(θ) − Σ_y ψ̂(θ,y) H(y)| over the bank's qualities.
double l1_gap(const StepBeta& beta, const QuestionDistribution& h, const QuestionBank& bank,
              std::span<const double> theta_weights = {});

/// β̃ over [0,1] using the interpolated ψ.
class InducedBeta {
 public:
  InducedBeta(QuestionDistribution h, PsiInterpolator psi);

  double operator()(double theta) const;
  const QuestionDistribution& distribution() const { return h_; }

 private:
  QuestionDistribution h_;
  PsiInterpolator psi_;
};

InducedBeta induced_beta(const QuestionDistribution& h, const QuestionBank& bank,
                         const PsiInterpolator& psi);

}  // namespace ratecraft
