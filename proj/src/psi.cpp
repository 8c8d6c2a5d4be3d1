#include "ratecraft/psi.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ratecraft {

namespace {

std::vector<std::string> resolve_questions(std::span<const Rating> ratings,
                                           std::span<const std::string> order) {
  if (order.empty()) {
    std::set<std::string> seen;
    for (const auto& r : ratings) seen.insert(r.question);
    return {seen.begin(), seen.end()};
  }
  std::vector<std::string> questions(order.begin(), order.end());
  for (const auto& r : ratings) {
    if (std::find(questions.begin(), questions.end(), r.question) == questions.end()) {
      throw ValidationError("rating refers to unknown question '" + r.question + "'");
    }
  }
  return questions;
}

std::size_t question_index(const std::vector<std::string>& questions, const std::string& q) {
  return static_cast<std::size_t>(std::find(questions.begin(), questions.end(), q) -
                                  questions.begin());
}

void check_response(const Rating& r, std::size_t row) {
  if (r.response != 0 && r.response != 1) {
    std::ostringstream out;
    out << "rating " << row << ": response must be 0 or 1, got " << r.response;
    throw ValidationError(out.str());
  }
}

struct CellCounts {
  std::vector<long long> positives;
  std::vector<long long> totals;
};

QuestionBank finish(std::vector<double> qualities, std::vector<std::string> questions,
                    CellCounts counts, const std::vector<std::string>& row_labels) {
  const std::size_t cols = questions.size();
  for (std::size_t k = 0; k < counts.totals.size(); ++k) {
    if (counts.totals[k] == 0) {
      std::ostringstream out;
      out << "no observations for " << row_labels[k / cols] << ", question '"
          << questions[k % cols] << "'";
      throw ValidationError(out.str());
    }
  }
  return QuestionBank::from_counts(std::move(qualities), std::move(questions),
                                   std::move(counts.positives), std::move(counts.totals));
}

}  // namespace

PsiInterpolator::PsiInterpolator(QuestionBank bank) : bank_(std::move(bank)) {}

double PsiInterpolator::operator()(double theta, std::size_t question) const {
  const auto& q = bank_.qualities();
  if (theta <= q.front()) return bank_.psi(0, question);
  if (theta >= q.back()) return bank_.psi(q.size() - 1, question);
  const auto upper = static_cast<std::size_t>(std::upper_bound(q.begin(), q.end(), theta) - q.begin());
  const std::size_t lower = upper - 1;
  const double alpha = (q[upper] - theta) / (q[upper] - q[lower]);
  const double v = alpha * bank_.psi(lower, question) + (1.0 - alpha) * bank_.psi(upper, question);
  return std::clamp(v, 0.0, 1.0);
}

std::vector<double> PsiInterpolator::row(double theta) const {
  std::vector<double> out(bank_.cols());
  for (std::size_t y = 0; y < out.size(); ++y) out[y] = (*this)(theta, y);
  return out;
}

std::vector<double> interpolate(const QuestionBank& bank, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("theta is outside [0,1]");
  return PsiInterpolator(bank).row(theta);
}

QuestionBank estimate_known(std::span<const Rating> ratings,
                            const std::map<std::string, double>& qualities,
                            std::span<const std::string> question_order) {
  if (ratings.empty()) throw ValidationError("no ratings");
  auto questions = resolve_questions(ratings, question_order);

  std::set<double> distinct;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    check_response(ratings[i], i);
    auto it = qualities.find(ratings[i].item);
    if (it == qualities.end()) {
      throw ValidationError("rating " + std::to_string(i) + " refers to unknown item '" +
                            ratings[i].item + "'");
    }
    distinct.insert(it->second);
  }
  std::vector<double> thetas(distinct.begin(), distinct.end());

  const std::size_t cols = questions.size();
  CellCounts counts{std::vector<long long>(thetas.size() * cols, 0),
                    std::vector<long long>(thetas.size() * cols, 0)};
  for (const auto& r : ratings) {
    const double theta = qualities.at(r.item);
    const auto row = static_cast<std::size_t>(
        std::lower_bound(thetas.begin(), thetas.end(), theta) - thetas.begin());
    const std::size_t k = row * cols + question_index(questions, r.question);
    counts.positives[k] += r.response;
    counts.totals[k] += 1;
  }
  std::vector<std::string> labels;
  for (double t : thetas) labels.push_back("theta " + std::to_string(t));
  return finish(std::move(thetas), std::move(questions), std::move(counts), labels);
}

QuestionBank estimate_unknown(std::span<const Rating> ratings, std::size_t items,
                              std::size_t per_item,
                              std::span<const std::string> question_order) {
  if (ratings.empty()) throw ValidationError("no ratings");
  if (items == 0 || per_item == 0) throw ValidationError("item and sample counts must be positive");
  auto questions = resolve_questions(ratings, question_order);

  struct ItemTally {
    long long positives = 0;
    long long total = 0;
  };
  std::map<std::string, ItemTally> tally;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    check_response(ratings[i], i);
    auto& t = tally[ratings[i].item];
    t.positives += ratings[i].response;
    t.total += 1;
  }
  if (tally.size() != items) {
    std::ostringstream out;
    out << "expected " << items << " items, found " << tally.size();
    throw ValidationError(out.str());
  }
  for (const auto& [id, t] : tally) {
    if (t.total != static_cast<long long>(per_item)) {
      std::ostringstream out;
      out << "item '" << id << "' has " << t.total << " responses, expected " << per_item;
      throw ValidationError(out.str());
    }
  }

  // Equal denominators: comparing positive counts compares fractions exactly.
  std::vector<std::string> ranked;
  for (const auto& [id, t] : tally) ranked.push_back(id);
  std::stable_sort(ranked.begin(), ranked.end(), [&](const std::string& a, const std::string& b) {
    return tally.at(a).positives < tally.at(b).positives;
  });
  std::map<std::string, std::size_t> rank_of;
  for (std::size_t i = 0; i < ranked.size(); ++i) rank_of[ranked[i]] = i;

  const std::size_t cols = questions.size();
  CellCounts counts{std::vector<long long>(items * cols, 0), std::vector<long long>(items * cols, 0)};
  for (const auto& r : ratings) {
    const std::size_t k = rank_of.at(r.item) * cols + question_index(questions, r.question);
    counts.positives[k] += r.response;
    counts.totals[k] += 1;
  }
  std::vector<double> thetas(items);
  for (std::size_t i = 0; i < items; ++i) {
    thetas[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(items);
  }
  std::vector<std::string> labels;
  for (const auto& id : ranked) labels.push_back("item '" + id + "'");
  return finish(std::move(thetas), std::move(questions), std::move(counts), labels);
}

}  // namespace ratecraft
