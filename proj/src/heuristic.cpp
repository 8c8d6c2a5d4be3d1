#include "ratecraft/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ratecraft/lp.hpp"

namespace ratecraft {

namespace {

std::vector<double> resolve_weights(std::span<const double> weights, std::size_t rows) {
  if (weights.empty()) return std::vector<double>(rows, 1.0);
  if (weights.size() != rows) throw ValidationError("theta weights do not match the bank");
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("theta weights must be nonnegative");
  }
  return {weights.begin(), weights.end()};
}

std::vector<double> targets(const StepBeta& beta, const QuestionBank& bank) {
  std::vector<double> out;
  out.reserve(bank.rows());
  for (double theta : bank.qualities()) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("beta is undefined at a bank quality");
    out.push_back(beta(theta));
  }
  return out;
}

double gap_for(std::span<const double> target, std::span<const double> h, const QuestionBank& bank,
               std::span<const double> weights) {
  double total = 0.0;
  for (std::size_t r = 0; r < bank.rows(); ++r) {
    const auto row = bank.row(r);
    const double induced = std::inner_product(row.begin(), row.end(), h.begin(), 0.0);
    total += weights[r] * std::abs(target[r] - induced);
  }
  return total;
}

// Clamp solver noise and renormalize onto the simplex.
std::vector<double> clean_simplex(std::vector<double> h) {
  for (double& v : h) {
    if (v < 0.0) v = 0.0;
  }
  const double sum = std::accumulate(h.begin(), h.end(), 0.0);
  for (double& v : h) v /= sum;
  // Fold the residual into the largest entry so the sum is 1 to an ulp.
  const auto largest = std::max_element(h.begin(), h.end());
  const double rest = std::accumulate(h.begin(), h.end(), 0.0) - *largest;
  *largest = 1.0 - rest;
  return h;
}

}  // namespace

QuestionDistribution fit_h(const StepBeta& beta, const QuestionBank& bank,
                           const FitOptions& options) {
  const std::size_t rows = bank.rows();
  const std::size_t ny = bank.cols();
  const auto target = targets(beta, bank);
  const auto weights = resolve_weights(options.theta_weights, rows);

  QuestionDistribution result;
  result.questions = bank.questions();

  if (options.constraint == HConstraint::single_question) {
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    std::vector<double> point(ny, 0.0);
    for (std::size_t y = 0; y < ny; ++y) {
      std::fill(point.begin(), point.end(), 0.0);
      point[y] = 1.0;
      const double g = gap_for(target, point, bank, weights);
      if (g < best_gap) {
        best_gap = g;
        best = y;
      }
    }
    result.probabilities.assign(ny, 0.0);
    result.probabilities[best] = 1.0;
    result.objective = best_gap;
    return result;
  }

  // Variables [H (ny) | u (rows) | v (rows)]:
  //   Σ_y ψ(θ,y) H(y) + u_θ − v_θ = β(θ),   Σ_y H(y) = 1,   all >= 0,
  // minimizing Σ_θ weight_θ (u_θ + v_θ).
  lp::Problem p;
  p.rows = rows + 1;
  p.cols = ny + 2 * rows;
  p.a.assign(p.rows * p.cols, 0.0);
  p.b.assign(p.rows, 0.0);
  p.c.assign(p.cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t y = 0; y < ny; ++y) p.a[r * p.cols + y] = bank.psi(r, y);
    p.a[r * p.cols + ny + r] = 1.0;
    p.a[r * p.cols + ny + rows + r] = -1.0;
    p.b[r] = target[r];
    p.c[ny + r] = weights[r];
    p.c[ny + rows + r] = weights[r];
  }
  for (std::size_t y = 0; y < ny; ++y) p.a[rows * p.cols + y] = 1.0;
  p.b[rows] = 1.0;

  const auto solution = lp::minimize(p);
  result.probabilities =
      clean_simplex({solution.x.begin(), solution.x.begin() + static_cast<std::ptrdiff_t>(ny)});
  result.objective = gap_for(target, result.probabilities, bank, weights);
  return result;
}

double l1_gap(const StepBeta& beta, const QuestionDistribution& h, const QuestionBank& bank,
              std::span<const double> theta_weights) {
  if (h.questions != bank.questions()) {
    throw ValidationError("question distribution and bank have different questions");
  }
  validate_distribution(h);
  const auto weights = resolve_weights(theta_weights, bank.rows());
  return gap_for(targets(beta, bank), h.probabilities, bank, weights);
}

InducedBeta::InducedBeta(QuestionDistribution h, PsiInterpolator psi)
    : h_(std::move(h)), psi_(std::move(psi)) {
  if (h_.questions != psi_.bank().questions()) {
    throw ValidationError("question distribution and bank have different questions");
  }
  validate_distribution(h_);
}

double InducedBeta::operator()(double theta) const {
  double total = 0.0;
  for (std::size_t y = 0; y < h_.probabilities.size(); ++y) {
    total += psi_(theta, y) * h_.probabilities[y];
  }
  return std::clamp(total, 0.0, 1.0);
}

InducedBeta induced_beta(const QuestionDistribution& h, const QuestionBank& bank,
                         const PsiInterpolator& psi) {
  if (h.questions != bank.questions() || psi.bank().questions() != bank.questions()) {
    throw ValidationError("question distribution and bank have different questions");
  }
  return InducedBeta(h, psi);
}

}  // namespace ratecraft
