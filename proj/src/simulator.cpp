#include "ratecraft/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace ratecraft {

namespace {

void fill_response_probs(MarketState& state, std::size_t i, const SimConfig& cfg) {
  const double theta = state.quality[i];
  double* out = state.response_probs.data() + i * state.probs_per_item;
  if (const auto* beta = std::get_if<StepBeta>(&cfg.design)) {
    out[0] = (*beta)(theta);
  } else {
    const auto& design = std::get<QuestionDesign>(cfg.design);
    for (std::size_t y = 0; y < state.probs_per_item; ++y) out[y] = design.psi(theta, y);
  }
}

// Cumulative H for drawing the shown question.
std::vector<double> question_cdf(const SimConfig& cfg) {
  const auto* design = std::get_if<QuestionDesign>(&cfg.design);
  if (design == nullptr) return {};
  std::vector<double> cdf(design->h.probabilities.size());
  std::partial_sum(design->h.probabilities.begin(), design->h.probabilities.end(), cdf.begin());
  cdf.back() = 1.0;
  return cdf;
}

std::size_t draw_index(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(cdf.size() - 1, static_cast<std::size_t>(it - cdf.begin()));
}

bool draw_rating(const MarketState& state, std::size_t item, const std::vector<double>& h_cdf,
                 Rng& rng) {
  const double* probs = state.response_probs.data() + item * state.probs_per_item;
  if (h_cdf.empty()) return rng.bernoulli(probs[0]);
  const std::size_t y = draw_index(h_cdf, rng.uniform());
  return rng.bernoulli(probs[y]);
}

void replace_item(MarketState& state, std::size_t i, const SimConfig& cfg, Rng& rng) {
  state.quality[i] = rng.uniform();
  state.positives[i] = 0;
  state.totals[i] = 0;
  state.ids[i] = state.next_id++;
  fill_response_probs(state, i, cfg);
}

std::vector<std::size_t> observed_order(const MarketState& state) {
  std::vector<std::size_t> order(state.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&state](std::size_t a, std::size_t b) {
    const double sa = state.score(a);
    const double sb = state.score(b);
    if (sa != sb) return sa < sb;
    return state.ids[a] < state.ids[b];
  });
  return order;
}

}  // namespace

std::string_view to_string(Matching m) {
  return m == Matching::uniform ? "uniform" : "linear";
}

Matching parse_matching(std::string_view name) {
  if (name == "uniform") return Matching::uniform;
  if (name == "linear") return Matching::linear;
  throw ValidationError("unknown matching '" + std::string(name) + "'");
}

void validate(const SimConfig& cfg) {
  if (cfg.n_items < 2) throw ValidationError("simulation needs at least two items");
  if (cfg.n_buyers == 0) throw ValidationError("simulation needs at least one buyer");
  if (!(cfg.death_prob >= 0.0 && cfg.death_prob < 1.0)) {
    throw ValidationError("death probability must lie in [0, 1)");
  }
  if (cfg.replicates == 0) throw ValidationError("need at least one replicate");
  if (cfg.stride == 0) throw ValidationError("recording stride must be positive");
  if (cfg.metrics.empty()) throw ValidationError("no metrics requested");
  for (auto m : cfg.metrics) {
    if (m == WeightKind::custom) throw ValidationError("custom weights are not a named metric");
  }
  if (const auto* design = std::get_if<QuestionDesign>(&cfg.design)) {
    validate_distribution(design->h);
    if (design->h.questions != design->psi.bank().questions()) {
      throw ValidationError("question distribution and psi bank have different questions");
    }
  }
}

std::vector<std::size_t> recording_schedule(const SimConfig& cfg) {
  std::vector<std::size_t> ks;
  for (std::size_t k = 1; k <= cfg.steps; ++k) {
    const bool due = k <= cfg.dense_until || (k - cfg.dense_until) % cfg.stride == 0 || k == cfg.steps;
    if (due && k >= cfg.burn_in) ks.push_back(k);
  }
  return ks;
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate) {
  // splitmix64 finalizer over a combination of both inputs.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (replicate + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

long long MarketState::total_ratings() const {
  return std::accumulate(totals.begin(), totals.end(), 0LL);
}

MarketState init_market(const SimConfig& cfg, Rng& rng) {
  validate(cfg);
  MarketState state;
  const std::size_t n = cfg.n_items;
  state.quality.resize(n);
  for (auto& q : state.quality) q = rng.uniform();
  state.positives.assign(n, 0);
  state.totals.assign(n, 0);
  state.ids.resize(n);
  std::iota(state.ids.begin(), state.ids.end(), std::uint64_t{0});
  state.next_id = n;
  if (const auto* design = std::get_if<QuestionDesign>(&cfg.design)) {
    state.probs_per_item = design->h.probabilities.size();
  }
  state.response_probs.assign(n * state.probs_per_item, 0.0);
  for (std::size_t i = 0; i < n; ++i) fill_response_probs(state, i, cfg);
  return state;
}

MarketState init_market(const SimConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  return init_market(cfg, rng);
}

std::vector<double> rank_quantiles(const MarketState& state) {
  const auto order = observed_order(state);
  const auto n = static_cast<double>(state.size());
  std::vector<double> q(state.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    q[order[r]] = (static_cast<double>(r) + 0.5) / n;
  }
  return q;
}

void step_market(MarketState& state, const SimConfig& cfg, Rng& rng) {
  const std::size_t n = state.size();
  std::vector<std::size_t> matched(cfg.n_buyers);
  if (cfg.matching == Matching::uniform) {
    for (auto& m : matched) m = rng.below(n);
  } else {
    const auto order = observed_order(state);
    std::vector<double> cdf(n);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      total += linear_match((static_cast<double>(r) + 0.5) / static_cast<double>(n));
      cdf[r] = total;
    }
    for (auto& c : cdf) c /= total;
    cdf.back() = 1.0;
    for (auto& m : matched) m = order[draw_index(cdf, rng.uniform())];
  }

  const auto h_cdf = question_cdf(cfg);
  for (std::size_t item : matched) {
    if (draw_rating(state, item, h_cdf, rng)) ++state.positives[item];
    ++state.totals[item];
  }

  if (cfg.death_prob > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.bernoulli(cfg.death_prob)) replace_item(state, i, cfg, rng);
    }
  }
}

double empirical_objective(const MarketState& state, const WeightSpec& w) {
  const std::size_t n = state.size();
  if (n < 2) throw ValidationError("objective needs at least two items");
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) score[i] = state.score(i);
  double signed_mass = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool i_higher = state.quality[i] > state.quality[j];
      const std::size_t hi = i_higher ? i : j;
      const std::size_t lo = i_higher ? j : i;
      if (state.quality[hi] == state.quality[lo]) continue;
      const double weight = w(state.quality[hi], state.quality[lo]);
      mass += weight;
      if (score[hi] > score[lo]) {
        signed_mass += weight;
      } else if (score[hi] < score[lo]) {
        signed_mass -= weight;
      }
    }
  }
  return mass > 0.0 ? signed_mass / mass : 0.0;
}

std::vector<double> SimResult::values_at(WeightKind metric, std::size_t k) const {
  std::vector<double> out;
  for (const auto& p : series) {
    if (p.metric == metric && p.k == k) out.push_back(p.value);
  }
  return out;
}

SimResult run_simulation(const SimConfig& cfg) {
  validate(cfg);
  const auto schedule = recording_schedule(cfg);
  std::vector<WeightSpec> weights;
  for (auto m : cfg.metrics) weights.push_back(normalize_weight(m));

  // Each replicate owns its generator and state; results land by index.
  std::vector<std::vector<SeriesPoint>> per_replicate(cfg.replicates);
  auto run_one = [&](std::size_t r) {
    Rng rng(replicate_seed(cfg.seed, r));
    MarketState state = init_market(cfg, rng);
    std::vector<SeriesPoint> points;
    std::size_t next = 0;
    for (std::size_t k = 1; k <= cfg.steps && next < schedule.size(); ++k) {
      step_market(state, cfg, rng);
      if (schedule[next] != k) continue;
      for (std::size_t m = 0; m < weights.size(); ++m) {
        points.push_back({r, k, cfg.metrics[m], empirical_objective(state, weights[m])});
      }
      ++next;
    }
    per_replicate[r] = std::move(points);
  };

  const std::size_t workers = std::clamp<std::size_t>(cfg.jobs, 1, cfg.replicates);
  if (workers == 1) {
    for (std::size_t r = 0; r < cfg.replicates; ++r) run_one(r);
  } else {
    std::atomic<std::size_t> next_replicate{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r; (r = next_replicate.fetch_add(1)) < cfg.replicates;) {
          try {
            run_one(r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  SimResult result;
  for (auto& points : per_replicate) {
    result.series.insert(result.series.end(), points.begin(), points.end());
  }
  const auto reps = static_cast<double>(cfg.replicates);
  for (std::size_t idx = 0; idx < schedule.size(); ++idx) {
    for (std::size_t m = 0; m < cfg.metrics.size(); ++m) {
      double sum = 0.0;
      double sum_sq = 0.0;
      for (const auto& points : per_replicate) {
        const double v = points[idx * cfg.metrics.size() + m].value;
        sum += v;
        sum_sq += v * v;
      }
      const double mean = sum / reps;
      double se = 0.0;
      if (cfg.replicates > 1) {
        const double var = std::max(0.0, (sum_sq - reps * mean * mean) / (reps - 1.0));
        se = std::sqrt(var / reps);
      }
      result.summary.push_back({schedule[idx], cfg.metrics[m], mean, se, cfg.replicates});
    }
  }
  return result;
}

RateEstimate estimate_pk_rate(double t1, double t2, double g1, double g2, std::size_t k_max,
                              std::size_t reps, std::uint64_t seed) {
  if (!(t1 >= 0.0 && t1 <= 1.0 && t2 >= 0.0 && t2 <= 1.0)) {
    throw ValidationError("rating probabilities must lie in [0,1]");
  }
  if (t1 < t2) throw ValidationError("need t1 >= t2 (item 1 is the better item)");
  if (!(g1 > 0.0) || !(g2 > 0.0)) throw ValidationError("match rates must be positive");
  if (reps < 100000) throw ValidationError("need at least 1e5 replicates");
  if (k_max < 3) throw ValidationError("need k_max >= 3");

  std::vector<long long> less(k_max, 0);
  std::vector<long long> ties(k_max, 0);
  Rng rng(seed);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    long long pos1 = 0, pos2 = 0, n1 = 0, n2 = 0;
    for (std::size_t k = 1; k <= k_max; ++k) {
      const auto target1 = static_cast<long long>(std::floor(static_cast<double>(k) * g1));
      const auto target2 = static_cast<long long>(std::floor(static_cast<double>(k) * g2));
      for (; n1 < target1; ++n1) pos1 += rng.bernoulli(t1) ? 1 : 0;
      for (; n2 < target2; ++n2) pos2 += rng.bernoulli(t2) ? 1 : 0;
      // Compare x1 = pos1/n1 with x2 = pos2/n2 exactly; x = 0 with no ratings.
      const long long lhs = n1 == 0 ? 0 : pos1 * (n2 == 0 ? 1 : n2);
      const long long rhs = n2 == 0 ? 0 : pos2 * (n1 == 0 ? 1 : n1);
      if (lhs < rhs) {
        ++less[k - 1];
      } else if (lhs == rhs) {
        ++ties[k - 1];
      }
    }
  }

  RateEstimate est;
  est.error_mass.resize(k_max);
  const auto n = static_cast<double>(reps);
  for (std::size_t k = 0; k < k_max; ++k) {
    est.error_mass[k] = (static_cast<double>(less[k]) + 0.5 * static_cast<double>(ties[k])) / n;
  }

  const double floor_mass = 10.0 / n;
  std::vector<double> xs, ys;
  bool decayed = false;
  for (std::size_t k = 0; k < k_max; ++k) {
    const double p = est.error_mass[k];
    if (p <= 0.1) decayed = true;
    if (p >= floor_mass && p <= 0.1) {
      xs.push_back(static_cast<double>(k + 1));
      ys.push_back(-std::log(p));
    }
  }
  if (!decayed) {
    // No decay into the window (e.g. t1 == t2): fit the whole horizon.
    for (std::size_t k = 0; k < k_max; ++k) {
      if (est.error_mass[k] > 0.0) {
        xs.push_back(static_cast<double>(k + 1));
        ys.push_back(-std::log(est.error_mass[k]));
      }
    }
  }
  if (xs.size() < 3) {
    std::ostringstream out;
    out << "only " << xs.size() << " steps have error mass in [" << floor_mass
        << ", 0.1]; increase replicates or shorten k_max";
    throw ValidationError(out.str());
  }

  const auto count = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  est.slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double resid = ys[i] - (my + est.slope * (xs[i] - mx));
    ssr += resid * resid;
  }
  est.std_error = std::sqrt(ssr / (count - 2.0) / sxx);
  est.k_first = static_cast<std::size_t>(xs.front());
  est.k_last = static_cast<std::size_t>(xs.back());
  return est;
}

}  // namespace ratecraft
