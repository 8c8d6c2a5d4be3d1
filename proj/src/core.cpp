#include "ratecraft/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ratecraft {

namespace {

std::string index_message(std::string_view what, std::size_t index, std::string_view why) {
  std::ostringstream out;
  out << what << '[' << index << "] " << why;
  return out.str();
}

// 3-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 3> kGaussNodes = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGaussWeights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// Radon's seven-point degree-5 rule on a triangle: barycentric (a, a, b)
// orbits plus the centroid, weights summing to one.
struct TrianglePoint {
  double l1, l2, l3, weight;
};

std::array<TrianglePoint, 7> radon_points() {
  const double r15 = std::sqrt(15.0);
  const double a1 = (6.0 - r15) / 21.0;
  const double b1 = (9.0 + 2.0 * r15) / 21.0;
  const double w1 = (155.0 - r15) / 1200.0;
  const double a2 = (6.0 + r15) / 21.0;
  const double b2 = (9.0 - 2.0 * r15) / 21.0;
  const double w2 = (155.0 + r15) / 1200.0;
  return {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
           {a1, a1, b1, w1},
           {a1, b1, a1, w1},
           {b1, a1, a1, w1},
           {a2, a2, b2, w2},
           {a2, b2, a2, w2},
           {b2, a2, a2, w2}}};
}

// Lower half {θ2 < θ1} of the diagonal cell [a, b)^2 in (θ1, θ2) coordinates:
// vertices (a, a), (b, a), (b, b).
double diagonal_cell_integral(const PairFunction& f, double a, double b) {
  static const auto points = radon_points();
  double sum = 0.0;
  for (const auto& p : points) {
    const double hi = p.l1 * a + p.l2 * b + p.l3 * b;
    const double lo = p.l1 * a + p.l2 * a + p.l3 * b;
    sum += p.weight * f(hi, lo);
  }
  const double h = b - a;
  return sum * 0.5 * h * h;
}

}  // namespace

// ---------------------------------------------------------------- StepBeta

StepBeta::StepBeta(std::vector<double> breakpoints, std::vector<double> levels)
    : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)) {
  if (levels_.size() < 2) throw ValidationError("StepBeta needs at least two levels");
  if (breakpoints_.size() != levels_.size() + 1) {
    std::ostringstream out;
    out << "StepBeta has " << levels_.size() << " levels but " << breakpoints_.size()
        << " breakpoints (expected " << levels_.size() + 1 << ")";
    throw ValidationError(out.str());
  }
  if (breakpoints_.front() != 0.0) throw ValidationError(index_message("s", 0, "must be 0"));
  if (breakpoints_.back() != 1.0) {
    throw ValidationError(index_message("s", breakpoints_.size() - 1, "must be 1"));
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1])) {
      throw ValidationError(index_message("s", i, "is not strictly increasing"));
    }
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!(levels_[i] >= 0.0 && levels_[i] <= 1.0)) {
      throw ValidationError(index_message("t", i, "is outside [0,1]"));
    }
    if (i > 0 && !(levels_[i] > levels_[i - 1])) {
      throw ValidationError(index_message("t", i, "is not strictly increasing"));
    }
  }
}

std::size_t StepBeta::interval_of(double theta) const {
  if (theta <= 0.0) return 0;
  if (theta >= 1.0) return levels_.size() - 1;
  // First breakpoint strictly greater than θ closes θ's interval.
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), theta);
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

StepBeta make_step_beta(std::vector<double> breakpoints, std::vector<double> levels) {
  return StepBeta(std::move(breakpoints), std::move(levels));
}

std::vector<double> equispaced_breakpoints(std::size_t intervals) {
  if (intervals == 0) throw ValidationError("need at least one interval");
  std::vector<double> s(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    s[i] = static_cast<double>(i) / static_cast<double>(intervals);
  }
  s.back() = 1.0;
  return s;
}

// ------------------------------------------------------------ MatchProfile

std::string_view to_string(MatchKind kind) {
  switch (kind) {
    case MatchKind::uniform: return "uniform";
    case MatchKind::linear: return "linear";
    case MatchKind::table: return "table";
  }
  return "unknown";
}

MatchKind parse_match_kind(std::string_view name) {
  if (name == "uniform") return MatchKind::uniform;
  if (name == "linear") return MatchKind::linear;
  if (name == "table") return MatchKind::table;
  throw ValidationError("unknown match kind '" + std::string(name) + "'");
}

MatchProfile::MatchProfile(MatchKind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("match profile is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0 && values_[i] <= 1.0)) {
      throw ValidationError(index_message("g", i, "must lie in (0, 1]"));
    }
  }
}

MatchProfile MatchProfile::uniform(std::size_t intervals) {
  return MatchProfile(MatchKind::uniform, std::vector<double>(intervals, 1.0));
}

MatchProfile MatchProfile::linear(std::span<const double> breakpoints) {
  if (breakpoints.size() < 2) throw ValidationError("need at least two breakpoints");
  std::vector<double> g(breakpoints.size() - 1);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = linear_match(breakpoints[i]);
  return MatchProfile(MatchKind::linear, std::move(g));
}

MatchProfile MatchProfile::table(std::vector<double> values) {
  return MatchProfile(MatchKind::table, std::move(values));
}

bool MatchProfile::nondecreasing() const {
  return std::is_sorted(values_.begin(), values_.end());
}

MatchProfile make_match_profile(MatchKind kind, std::span<const double> breakpoints,
                                std::span<const double> table_values) {
  switch (kind) {
    case MatchKind::uniform: return MatchProfile::uniform(breakpoints.size() - 1);
    case MatchKind::linear: return MatchProfile::linear(breakpoints);
    case MatchKind::table:
      if (table_values.size() + 1 != breakpoints.size()) {
        throw ValidationError("match table length does not match the number of intervals");
      }
      return MatchProfile::table({table_values.begin(), table_values.end()});
  }
  throw ValidationError("unknown match kind");
}

// -------------------------------------------------------------- WeightSpec

std::string_view to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::kendall: return "kendall";
    case WeightKind::spearman: return "spearman";
    case WeightKind::top: return "top";
    case WeightKind::bottom: return "bottom";
    case WeightKind::extremes: return "extremes";
    case WeightKind::custom: return "custom";
  }
  return "unknown";
}

WeightKind parse_weight_kind(std::string_view name) {
  if (name == "kendall" || name == "uniform") return WeightKind::kendall;
  if (name == "spearman") return WeightKind::spearman;
  if (name == "top") return WeightKind::top;
  if (name == "bottom") return WeightKind::bottom;
  if (name == "extremes") return WeightKind::extremes;
  if (name == "custom") return WeightKind::custom;
  throw ValidationError("unknown weight kind '" + std::string(name) + "'");
}

double WeightSpec::raw(double hi, double lo) const {
  switch (kind_) {
    case WeightKind::kendall: return 1.0;
    case WeightKind::spearman: return hi - lo;
    case WeightKind::top: return hi * lo * (hi - lo);
    case WeightKind::bottom: return (1.0 - hi) * (1.0 - lo) * (hi - lo);
    case WeightKind::extremes: {
      const double a = 0.5 - hi;
      const double b = 0.5 - lo;
      return a * a * b * b * (hi - lo);
    }
    case WeightKind::custom: {
      const auto n = static_cast<double>(table_n_);
      const auto cell = [&](double theta) {
        return std::min(table_n_ - 1, static_cast<std::size_t>(std::max(0.0, theta * n)));
      };
      return table_[cell(hi) * table_n_ + cell(lo)];
    }
  }
  return 0.0;
}

WeightSpec normalize_weight(WeightKind kind, std::size_t grid) {
  if (kind == WeightKind::custom) {
    throw ValidationError("custom weights need a raw table");
  }
  if (grid == 0) throw ValidationError("quadrature grid must be positive");
  WeightSpec w;
  w.kind_ = kind;
  switch (kind) {
    case WeightKind::kendall: w.scale_ = 2.0; break;
    case WeightKind::spearman: w.scale_ = 6.0; break;
    case WeightKind::top:
    case WeightKind::bottom: w.scale_ = 30.0; break;
    case WeightKind::extremes: w.scale_ = 672.0; break;
    case WeightKind::custom: break;
  }
  return w;
}

WeightSpec normalize_weight(std::vector<double> raw_table, std::size_t n, std::size_t grid) {
  if (n == 0 || raw_table.size() != n * n) {
    throw ValidationError("custom weight table must be n x n");
  }
  if (grid == 0) throw ValidationError("quadrature grid must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = raw_table[i * n + j];
      if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream out;
        out << "custom weight is not positive at cell (" << i << ", " << j << ")";
        throw ValidationError(out.str());
      }
    }
  }
  WeightSpec w;
  w.kind_ = WeightKind::custom;
  w.table_ = std::move(raw_table);
  w.table_n_ = n;
  const double mass =
      triangle_integral([&w](double hi, double lo) { return w.raw(hi, lo); }, 0.0, 1.0, grid);
  w.scale_ = 1.0 / mass;
  return w;
}

double rectangle_integral(const PairFunction& f, double a1, double b1, double a2, double b2) {
  const double c1 = 0.5 * (a1 + b1), h1 = 0.5 * (b1 - a1);
  const double c2 = 0.5 * (a2 + b2), h2 = 0.5 * (b2 - a2);
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      sum += kGaussWeights[i] * kGaussWeights[j] *
             f(c1 + h1 * kGaussNodes[i], c2 + h2 * kGaussNodes[j]);
    }
  }
  return sum * h1 * h2;
}

double triangle_integral(const PairFunction& f, double lo, double hi, std::size_t cells) {
  if (cells == 0 || !(hi > lo)) return 0.0;
  const double h = (hi - lo) / static_cast<double>(cells);
  const auto edge = [&](std::size_t i) {
    return i == cells ? hi : lo + h * static_cast<double>(i);
  };
  double total = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    double row = diagonal_cell_integral(f, edge(i), edge(i + 1));
    for (std::size_t j = 0; j < i; ++j) {
      row += rectangle_integral(f, edge(i), edge(i + 1), edge(j), edge(j + 1));
    }
    total += row;
  }
  return total;
}

// ------------------------------------------------------------ QuestionBank

QuestionBank::QuestionBank(std::vector<double> qualities, std::vector<std::string> questions,
                           std::vector<double> psi, std::optional<Counts> counts)
    : qualities_(std::move(qualities)),
      questions_(std::move(questions)),
      psi_(std::move(psi)),
      counts_(std::move(counts)) {
  if (qualities_.empty() || questions_.empty()) {
    throw ValidationError("question bank must have at least one quality and one question");
  }
  if (psi_.size() != qualities_.size() * questions_.size()) {
    throw ValidationError("psi matrix size does not match qualities x questions");
  }
  for (std::size_t i = 0; i < qualities_.size(); ++i) {
    if (!(qualities_[i] >= 0.0 && qualities_[i] <= 1.0)) {
      throw ValidationError(index_message("theta", i, "is outside [0,1]"));
    }
    if (i > 0 && !(qualities_[i] > qualities_[i - 1])) {
      throw ValidationError(index_message("theta", i, "is not strictly increasing"));
    }
  }
  for (std::size_t i = 0; i < questions_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (questions_[i] == questions_[j]) {
        throw ValidationError("duplicate question '" + questions_[i] + "'");
      }
    }
  }
  for (std::size_t k = 0; k < psi_.size(); ++k) {
    if (!(psi_[k] >= 0.0 && psi_[k] <= 1.0)) {
      throw ValidationError(index_message("psi", k, "is outside [0,1]"));
    }
  }
  if (counts_) {
    if (counts_->positives.size() != psi_.size() || counts_->totals.size() != psi_.size()) {
      throw ValidationError("count matrices do not match the psi matrix");
    }
    for (std::size_t k = 0; k < psi_.size(); ++k) {
      const auto pos = counts_->positives[k];
      const auto tot = counts_->totals[k];
      if (tot <= 0 || pos < 0 || pos > tot) {
        throw ValidationError(index_message("counts", k, "need 0 <= positives <= total, total > 0"));
      }
      if (psi_[k] != static_cast<double>(pos) / static_cast<double>(tot)) {
        throw ValidationError(index_message("psi", k, "differs from positives/total"));
      }
    }
  }
}

QuestionBank QuestionBank::from_counts(std::vector<double> qualities,
                                       std::vector<std::string> questions,
                                       std::vector<long long> positives,
                                       std::vector<long long> totals) {
  if (positives.size() != totals.size()) {
    throw ValidationError("count matrices differ in size");
  }
  std::vector<double> psi(positives.size());
  for (std::size_t k = 0; k < psi.size(); ++k) {
    if (totals[k] <= 0) throw ValidationError(index_message("counts", k, "has no observations"));
    psi[k] = static_cast<double>(positives[k]) / static_cast<double>(totals[k]);
  }
  return QuestionBank(std::move(qualities), std::move(questions), std::move(psi),
                      Counts{std::move(positives), std::move(totals)});
}

void validate_distribution(const QuestionDistribution& h) {
  if (h.questions.size() != h.probabilities.size()) {
    throw ValidationError("question distribution has mismatched lengths");
  }
  if (h.probabilities.empty()) throw ValidationError("question distribution is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < h.probabilities.size(); ++i) {
    if (!(h.probabilities[i] >= 0.0)) {
      throw ValidationError(index_message("H", i, "is negative"));
    }
    sum += h.probabilities[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError("question probabilities do not sum to 1");
  }
}

QuestionDistribution uniform_distribution(std::vector<std::string> questions) {
  if (questions.empty()) throw ValidationError("no questions");
  const auto n = questions.size();
  QuestionDistribution h;
  h.probabilities.assign(n, 1.0 / static_cast<double>(n));
  h.questions = std::move(questions);
  // Push rounding into the last entry so the sum is exact to an ulp.
  const double head = std::accumulate(h.probabilities.begin(), h.probabilities.end() - 1, 0.0);
  h.probabilities.back() = 1.0 - head;
  return h;
}

}  // namespace ratecraft
