#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ratecraft/heuristic.hpp"
#include "ratecraft/io.hpp"
#include "ratecraft/optimizer.hpp"
#include "ratecraft/partition.hpp"
#include "ratecraft/psi.hpp"
#include "ratecraft/rates.hpp"
#include "ratecraft/simulator.hpp"

using namespace ratecraft;
using io::format_double;

namespace {

// Fills options of `cmd` that were not given on the command line from a flat
// JSON object keyed by long flag names.
void apply_json_config(CLI::App* cmd, const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ValidationError(path + ": top level must be an object");
  for (const auto& [key, value] : j.items()) {
    auto* opt = key == "config" ? nullptr : cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) throw ValidationError(path + ": unknown key '" + key + "'");
    if (opt->count() > 0 || value.is_null()) continue;
    const auto scalar = [&](const nlohmann::json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
      if (v.is_number()) return format_double(v.get<double>());
      throw ValidationError(path + ": key '" + key + "' must hold strings or numbers");
    };
    if (value.is_array()) {
      for (const auto& v : value) opt->add_result(scalar(v));
    } else {
      opt->add_result(scalar(value));
    }
    try {
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw ValidationError(path + ": key '" + key + "': " + e.what());
    }
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_text(path, text);
  }
}

std::uint64_t resolve_seed(std::uint64_t flag) {
  const char* env = std::getenv("RATECRAFT_SEED");
  if (env == nullptr || *env == '\0') return flag;
  std::uint64_t seed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, seed);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError(std::string("RATECRAFT_SEED is not an unsigned integer: '") + env + "'");
  }
  return seed;
}

struct WeightArgs {
  std::string kind = "kendall";
  std::string table;

  void add(CLI::App* app) {
    app->add_option("--w", kind, "objective weight: kendall, spearman, top, bottom, extremes, custom")
        ->capture_default_str();
    app->add_option("--w-table", table,
                    "CSV with columns hi_cell,lo_cell,value for the lower triangle of an n x n "
                    "grid (required for --w custom)");
  }

  WeightSpec build() const {
    const auto k = parse_weight_kind(kind);
    if (k != WeightKind::custom) {
      if (!table.empty()) throw ValidationError("--w-table is only used with --w custom");
      return normalize_weight(k);
    }
    if (table.empty()) throw ValidationError("--w custom needs --w-table");
    const auto csv = io::read_csv_file(table);
    const auto hi_col = io::column(csv, "hi_cell", table);
    const auto lo_col = io::column(csv, "lo_cell", table);
    const auto v_col = io::column(csv, "value", table);
    long long n = 0;
    std::vector<std::tuple<long long, long long, double>> cells;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
      const auto hi = io::parse_int_field(csv.rows[r][hi_col], r + 1, "hi_cell");
      const auto lo = io::parse_int_field(csv.rows[r][lo_col], r + 1, "lo_cell");
      const auto v = io::parse_double_field(csv.rows[r][v_col], r + 1, "value");
      if (lo < 0 || lo > hi) {
        throw ValidationError(table + ": row " + std::to_string(r + 1) +
                              ", field 'lo_cell': need 0 <= lo_cell <= hi_cell");
      }
      n = std::max(n, hi + 1);
      cells.emplace_back(hi, lo, v);
    }
    if (cells.size() != static_cast<std::size_t>(n * (n + 1) / 2)) {
      throw ValidationError(table + ": expected " + std::to_string(n * (n + 1) / 2) +
                            " lower-triangle cells for n = " + std::to_string(n) + ", got " +
                            std::to_string(cells.size()));
    }
    const auto un = static_cast<std::size_t>(n);
    std::vector<double> raw(un * un, 0.0);
    std::vector<bool> seen(un * un, false);
    for (const auto& [hi, lo, v] : cells) {
      const auto idx = static_cast<std::size_t>(hi) * un + static_cast<std::size_t>(lo);
      if (seen[idx]) {
        throw ValidationError(table + ": duplicate cell (" + std::to_string(hi) + ", " +
                              std::to_string(lo) + ")");
      }
      seen[idx] = true;
      raw[idx] = v;
    }
    return normalize_weight(std::move(raw), un);
  }
};

struct MatchArgs {
  std::string kind = "uniform";
  std::vector<double> table;

  void add(CLI::App* app) {
    app->add_option("--g", kind, "matching profile: uniform, linear, table")->capture_default_str();
    app->add_option("--g-table", table, "per-interval matching rates for --g table")->delimiter(',');
  }

  MatchProfile build(std::span<const double> breakpoints) const {
    const auto k = parse_match_kind(kind);
    if (k != MatchKind::table && !table.empty()) {
      throw ValidationError("--g-table is only used with --g table");
    }
    return make_match_profile(k, breakpoints, table);
  }
};

struct SolverArgs {
  SolverConfig cfg;

  void add(CLI::App* app) {
    app->add_option("--tol", cfg.tol, "bisection width")->capture_default_str();
    app->add_option("--max-outer", cfg.max_outer, "outer bisection cap")->capture_default_str();
    app->add_option("--max-inner", cfg.max_inner, "inner bisection cap")->capture_default_str();
    app->add_option("--residual-tol", cfg.residual_tol,
                    "allowed spread of adjacent pair rates, relative to max(1, rate)")
        ->capture_default_str();
  }
};

struct OptimalDesign {
  Partition partition;
  io::DesignFile file;
  EqualizationReport report;
};

OptimalDesign optimal_design(std::size_t m, const WeightSpec& w, const MatchArgs& g_args,
                             std::size_t grid, const SolverConfig& cfg) {
  auto partition = optimize_partition(w, m, grid);
  const auto g = g_args.build(partition.breakpoints);
  const auto sol = nested_bisection(m, g, cfg);
  const auto beta = with_breakpoints(sol.beta, partition);
  auto report = verify_equalization(beta, g, cfg.residual_tol);
  if (!sol.degenerate && !report.pass) {
    throw ConvergenceError("equalization check failed: spread " + format_double(report.spread));
  }
  io::DesignFile file{beta, g, w.kind(), std::nullopt, std::nullopt};
  if (!sol.degenerate) {
    file.rate = sol.rate;
    file.residual = report.spread;
  }
  return {std::move(partition), std::move(file), std::move(report)};
}

std::string rate_text(const std::optional<double>& rate) {
  return rate ? format_double(*rate) : std::string("inf");
}

// ------------------------------------------------------------ subcommands

void add_optimize_beta(CLI::App& app) {
  auto* cmd = app.add_subcommand("optimize-beta", "optimal step design for an objective and matching");
  struct Args {
    std::size_t m = 200;
    std::size_t grid = kDefaultPartitionGrid;
    WeightArgs w;
    MatchArgs g;
    SolverArgs solver;
    std::string out;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--M", args->m, "number of levels (>= 2)")->capture_default_str();
  cmd->add_option("--grid", args->grid, "partition grid cells")->capture_default_str();
  args->w.add(cmd);
  args->g.add(cmd);
  args->solver.add(cmd);
  cmd->add_option("--out", args->out, "design JSON (default stdout)");
  cmd->callback([args] {
    const auto d = optimal_design(args->m, args->w.build(), args->g, args->grid, args->solver.cfg);
    emit(args->out, io::design_to_json(d.file));
    std::cerr << "M=" << args->m << " rate=" << rate_text(d.file.rate)
              << " spread=" << format_double(d.report.spread) << "\n";
  });
}

void add_fit_h(CLI::App& app) {
  auto* cmd = app.add_subcommand("fit-h", "question distribution whose induced design tracks a target");
  struct Args {
    std::string beta, psi, constraint = "free", out;
    std::vector<double> theta_weights;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--beta", args->beta, "target design JSON")->required();
  cmd->add_option("--psi", args->psi, "question bank CSV")->required();
  cmd->add_option("--constraint", args->constraint, "free or single")
      ->check(CLI::IsMember({"free", "single"}))
      ->capture_default_str();
  cmd->add_option("--theta-weights", args->theta_weights, "per-quality weights, one per bank row")
      ->delimiter(',');
  cmd->add_option("--out", args->out, "H JSON (default stdout)");
  cmd->callback([args] {
    const auto design = io::read_design(args->beta);
    const auto bank = io::read_bank(args->psi);
    FitOptions opts;
    opts.constraint = args->constraint == "single" ? HConstraint::single_question : HConstraint::free;
    opts.theta_weights = args->theta_weights;
    const auto h = fit_h(design.beta, bank, opts);
    emit(args->out, io::distribution_to_json(h));
    std::cerr << "objective=" << format_double(h.objective) << "\n";
  });
}

void add_estimate_psi(CLI::App& app) {
  auto* cmd = app.add_subcommand("estimate-psi", "estimate the question bank from raw ratings");
  cmd->require_subcommand(1);
  cmd->footer(
      "Ratings CSV: item_id,question,response (response 0 or 1).\n"
      "Output CSV: theta,question,positives,total (psi is positives / total).");

  struct Known {
    std::string ratings, qualities, out;
    std::vector<std::string> questions;
  };
  auto known = std::make_shared<Known>();
  auto* k = cmd->add_subcommand("known", "item qualities are given");
  k->add_option("--ratings", known->ratings, "ratings CSV")->required();
  k->add_option("--qualities", known->qualities, "CSV with columns item_id,theta")->required();
  k->add_option("--questions", known->questions, "question column order")->delimiter(',');
  k->add_option("--out", known->out, "bank CSV (default stdout)");
  k->callback([known] {
    const auto ratings = io::read_ratings(known->ratings);
    const auto bank = estimate_known(ratings, io::read_qualities(known->qualities), known->questions);
    std::ostringstream out;
    io::write_bank(out, bank);
    emit(known->out, out.str());
  });

  struct Unknown {
    std::string ratings, out;
    std::size_t items = 0, per_item = 0;
    std::vector<std::string> questions;
  };
  auto unknown = std::make_shared<Unknown>();
  auto* u = cmd->add_subcommand("unknown", "qualities are assigned from observed rank");
  u->add_option("--ratings", unknown->ratings, "ratings CSV")->required();
  u->add_option("--items", unknown->items, "number of items")->required();
  u->add_option("--per-item", unknown->per_item, "ratings per item")->required();
  u->add_option("--questions", unknown->questions, "question column order")->delimiter(',');
  u->add_option("--out", unknown->out, "bank CSV (default stdout)");
  u->callback([unknown] {
    const auto ratings = io::read_ratings(unknown->ratings);
    const auto bank = estimate_unknown(ratings, unknown->items, unknown->per_item, unknown->questions);
    std::ostringstream out;
    io::write_bank(out, bank);
    emit(unknown->out, out.str());
  });
}

struct MarketArgs {
  SimConfig cfg;
  std::string matching = "uniform";
  std::vector<std::string> metrics{"kendall"};

  void add(CLI::App* cmd) {
    cmd->add_option("--items", cfg.n_items, "items alive at any time")->capture_default_str();
    cmd->add_option("--buyers", cfg.n_buyers, "ratings per step")->capture_default_str();
    cmd->add_option("--steps", cfg.steps, "horizon")->capture_default_str();
    cmd->add_option("--death", cfg.death_prob, "per-step exit probability")->capture_default_str();
    cmd->add_option("--matching", matching, "uniform or linear on observed rank")
        ->capture_default_str();
    cmd->add_option("--metrics", metrics, "weights scored at each record")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "master seed (RATECRAFT_SEED overrides)")
        ->capture_default_str();
    cmd->add_option("--replicates", cfg.replicates, "independent markets")->capture_default_str();
    cmd->add_option("--dense-until", cfg.dense_until, "record every step up to here")
        ->capture_default_str();
    cmd->add_option("--stride", cfg.stride, "record stride afterwards")->capture_default_str();
    cmd->add_option("--burn-in", cfg.burn_in, "first recorded step")->capture_default_str();
    cmd->add_option("--jobs", cfg.jobs, "worker threads for replicates")->capture_default_str();
  }

  SimConfig build() const {
    SimConfig out = cfg;
    out.matching = parse_matching(matching);
    out.metrics.clear();
    for (const auto& m : metrics) out.metrics.push_back(parse_weight_kind(m));
    out.seed = resolve_seed(cfg.seed);
    return out;
  }
};

void add_simulate(CLI::App& app) {
  auto* cmd = app.add_subcommand("simulate", "run the rating market and score the rankings");
  struct Args {
    MarketArgs market;
    std::string design, psi, out, summary, config;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--design", args->design, "design JSON or H JSON (required)");
  cmd->add_option("--psi", args->psi, "question bank CSV (needed for an H design)");
  args->market.add(cmd);
  cmd->add_option("--out", args->out, "series CSV (default stdout)");
  cmd->add_option("--summary", args->summary, "summary CSV");
  cmd->add_option("--config", args->config,
                  "JSON object keyed by long flag names; explicit flags win");
  cmd->footer(
      "Series CSV: replicate,k,metric,value.\n"
      "Summary CSV: k,metric,mean,std_error,replicates (std_error over replicates).");
  cmd->callback([args, cmd] {
    if (!args->config.empty()) apply_json_config(cmd, args->config);
    if (args->design.empty()) throw ValidationError("simulate needs --design");
    auto cfg = args->market.build();
    if (io::is_distribution_file(args->design)) {
      if (args->psi.empty()) throw ValidationError("an H design needs --psi");
      cfg.design = QuestionDesign{io::read_distribution(args->design),
                                  PsiInterpolator(io::read_bank(args->psi))};
    } else {
      cfg.design = io::read_design(args->design).beta;
    }
    const auto res = run_simulation(cfg);
    std::ostringstream series;
    io::write_series(series, res);
    emit(args->out, series.str());
    if (!args->summary.empty()) {
      std::ostringstream summary;
      io::write_summary(summary, res);
      io::write_text(args->summary, summary.str());
    }
  });
}

void add_rate(CLI::App& app) {
  auto* cmd = app.add_subcommand("rate", "overall rate and per-pair residuals of a design");
  struct Args {
    std::string design, out;
    std::vector<double> levels, breakpoints;
    MatchArgs g;
  };
  auto args = std::make_shared<Args>();
  auto* d = cmd->add_option("--design", args->design, "design JSON");
  auto* l = cmd->add_option("--levels", args->levels, "levels t_0..t_{M-1}")->delimiter(',');
  l->excludes(d);
  cmd->add_option("--breakpoints", args->breakpoints, "breakpoints for --levels (default equispaced)")
      ->delimiter(',')
      ->needs(l);
  args->g.add(cmd);
  cmd->add_option("--out", args->out, "pair CSV");
  cmd->footer(
      "Prints overall_rate, spread and the limiting pair to stdout.\n"
      "Pair CSV: pair,t_lo,t_hi,g_lo,g_hi,a_star,rate.");
  cmd->callback([args] {
    std::optional<StepBeta> beta;
    std::optional<MatchProfile> g;
    if (!args->design.empty()) {
      auto file = io::read_design(args->design);
      beta = file.beta;
      g = file.g;
    } else if (!args->levels.empty()) {
      auto s = args->breakpoints.empty() ? equispaced_breakpoints(args->levels.size())
                                         : args->breakpoints;
      beta = StepBeta(s, args->levels);
      g = args->g.build(beta->breakpoints());
    } else {
      throw ValidationError("rate needs --design or --levels");
    }
    const auto& t = beta->levels();
    std::ostringstream csv;
    csv << "pair,t_lo,t_hi,g_lo,g_hi,a_star,rate\n";
    std::size_t worst = 0;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      const auto p = pair_rate(t[i], t[i + 1], (*g)[i], (*g)[i + 1]);
      csv << i << ',' << format_double(p.t_lo) << ',' << format_double(p.t_hi) << ','
          << format_double(p.g_lo) << ',' << format_double(p.g_hi) << ','
          << format_double(p.a_star) << ',' << format_double(p.rate) << '\n';
      if (p.rate < lo) {
        lo = p.rate;
        worst = i;
      }
      hi = std::max(hi, p.rate);
    }
    std::cout << "overall_rate " << format_double(overall_rate(*beta, *g)) << "\n"
              << "spread " << format_double(hi - lo) << "\n"
              << "limiting_pair " << worst << "\n";
    if (!args->out.empty()) io::write_text(args->out, csv.str());
  });
}

void add_double(CLI::App& app) {
  auto* cmd = app.add_subcommand("double", "refine an optimal uniform-matching design from M to 2M-1 levels");
  struct Args {
    std::string design, out;
    int times = 1;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--design", args->design, "design JSON with uniform matching")->required();
  cmd->add_option("--times", args->times, "number of doublings")
      ->check(CLI::Range(0, 20))
      ->capture_default_str();
  cmd->add_option("--out", args->out, "design JSON (default stdout)");
  cmd->callback([args] {
    auto file = io::read_design(args->design);
    StepBeta beta = file.beta;
    for (int q = 0; q < args->times; ++q) {
      beta = double_levels(beta, q == 0 ? file.g : MatchProfile::uniform(beta.size()));
    }
    const auto g = MatchProfile::uniform(beta.size());
    const auto report = verify_equalization(beta, g);
    io::DesignFile out{beta, g, file.w, std::nullopt, std::nullopt};
    if (beta.size() > 2) {
      out.rate = overall_rate(beta, g);
      out.residual = report.spread;
    }
    emit(args->out, io::design_to_json(out));
    std::cerr << "M=" << beta.size() << " rate=" << rate_text(out.rate) << "\n";
  });
}

void add_partition(CLI::App& app) {
  auto* cmd = app.add_subcommand("partition", "optimal quality partition for an objective weight");
  struct Args {
    std::size_t m = 200;
    std::size_t grid = kDefaultPartitionGrid;
    WeightArgs w;
    std::string out;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--M", args->m, "number of intervals")->capture_default_str();
  cmd->add_option("--grid", args->grid, "grid cells (>= 10 M)")->capture_default_str();
  args->w.add(cmd);
  cmd->add_option("--out", args->out, "partition CSV (default stdout)");
  cmd->footer("Partition CSV: interval,s_lo,s_hi. The asymptotic value goes to stderr.");
  cmd->callback([args] {
    const auto w = args->w.build();
    const auto p = optimize_partition(w, args->m, args->grid);
    std::ostringstream csv;
    csv << "interval,s_lo,s_hi\n";
    for (std::size_t i = 0; i < p.intervals(); ++i) {
      csv << i << ',' << format_double(p.breakpoints[i]) << ',' << format_double(p.breakpoints[i + 1])
          << '\n';
    }
    emit(args->out, csv.str());
    std::cerr << "value=" << format_double(p.value ? *p.value : asymptotic_value(p, w)) << "\n";
  });
}

// ----------------------------------------------------------------- figures

void add_figures(CLI::App& app) {
  auto* fig = app.add_subcommand("figure", "plot-ready CSV for the design, H and simulation panels");
  fig->require_subcommand(1);

  struct Beta {
    std::size_t m = 200;
    std::size_t grid = kDefaultPartitionGrid;
    std::vector<std::string> ws{"kendall", "top", "bottom"};
    std::vector<std::string> gs{"uniform", "linear"};
    SolverArgs solver;
    std::string out;
  };
  auto beta = std::make_shared<Beta>();
  auto* b = fig->add_subcommand("beta-panel", "optimal designs across weights and matching profiles");
  b->add_option("--M", beta->m, "levels")->capture_default_str();
  b->add_option("--grid", beta->grid, "partition grid cells")->capture_default_str();
  b->add_option("--w", beta->ws, "weights")->delimiter(',')->capture_default_str();
  b->add_option("--g", beta->gs, "matching profiles (uniform, linear)")
      ->delimiter(',')
      ->capture_default_str();
  beta->solver.add(b);
  b->add_option("--out", beta->out, "CSV (default stdout)");
  b->footer(
      "CSV columns:\n"
      "  w,g      objective weight and matching profile of the design\n"
      "  interval level index i\n"
      "  s_lo,s_hi quality interval [s_i, s_{i+1})\n"
      "  t        positive-rating probability on that interval\n"
      "  rate     overall rate of the design (same on every row)");
  b->callback([beta] {
    std::ostringstream csv;
    csv << "w,g,interval,s_lo,s_hi,t,rate\n";
    for (const auto& wname : beta->ws) {
      const auto w = normalize_weight(parse_weight_kind(wname));
      for (const auto& gname : beta->gs) {
        MatchArgs g;
        g.kind = gname;
        const auto d = optimal_design(beta->m, w, g, beta->grid, beta->solver.cfg);
        const auto& s = d.file.beta.breakpoints();
        const auto& t = d.file.beta.levels();
        for (std::size_t i = 0; i < t.size(); ++i) {
          csv << wname << ',' << gname << ',' << i << ',' << format_double(s[i]) << ','
              << format_double(s[i + 1]) << ',' << format_double(t[i]) << ','
              << rate_text(d.file.rate) << '\n';
        }
      }
    }
    emit(beta->out, csv.str());
  });

  struct HPanel {
    std::string psi, out, h_out;
    std::size_t m = 200;
    std::size_t grid = kDefaultPartitionGrid;
    std::size_t points = 201;
    WeightArgs w;
    MatchArgs g;
  };
  auto hp = std::make_shared<HPanel>();
  auto* h = fig->add_subcommand("h-panel", "target design against the designs induced by fitted and naive H");
  h->add_option("--psi", hp->psi, "question bank CSV")->required();
  h->add_option("--M", hp->m, "levels of the target design")->capture_default_str();
  h->add_option("--grid", hp->grid, "partition grid cells")->capture_default_str();
  hp->w.add(h);
  hp->g.add(h);
  h->add_option("--points", hp->points, "evaluation points on [0,1]")->capture_default_str();
  h->add_option("--h-out", hp->h_out, "also write the fitted H JSON here");
  h->add_option("--out", hp->out, "CSV (default stdout)");
  h->footer(
      "CSV columns:\n"
      "  theta   evaluation point\n"
      "  beta    optimal target design\n"
      "  fitted  design induced by the L1-fitted H\n"
      "  naive   design induced by the uniform H");
  h->callback([hp] {
    const auto d = optimal_design(hp->m, hp->w.build(), hp->g, hp->grid, SolverConfig{});
    const auto bank = io::read_bank(hp->psi);
    const PsiInterpolator psi(bank);
    const auto fitted_h = fit_h(d.file.beta, bank);
    const auto fitted = induced_beta(fitted_h, bank, psi);
    const auto naive = induced_beta(uniform_distribution(bank.questions()), bank, psi);
    if (hp->points < 2) throw ValidationError("--points must be at least 2");
    std::ostringstream csv;
    csv << "theta,beta,fitted,naive\n";
    for (std::size_t i = 0; i < hp->points; ++i) {
      const double theta = double(i) / double(hp->points - 1);
      csv << format_double(theta) << ',' << format_double(d.file.beta(theta)) << ','
          << format_double(fitted(theta)) << ',' << format_double(naive(theta)) << '\n';
    }
    emit(hp->out, csv.str());
    if (!hp->h_out.empty()) io::write_distribution(hp->h_out, fitted_h);
  });

  struct SimPanel {
    std::string psi, out;
    std::size_t m = 200;
    std::size_t grid = kDefaultPartitionGrid;
    WeightArgs w;
    MatchArgs g;
    MarketArgs market;
  };
  auto sp = std::make_shared<SimPanel>();
  sp->market.cfg.replicates = 20;
  auto* s = fig->add_subcommand("sim-panel", "simulated ranking quality of optimal, fitted-H and naive-H designs");
  s->add_option("--psi", sp->psi, "question bank CSV")->required();
  s->add_option("--M", sp->m, "levels of the optimal design")->capture_default_str();
  s->add_option("--grid", sp->grid, "partition grid cells")->capture_default_str();
  sp->w.add(s);
  sp->g.add(s);
  sp->market.add(s);
  s->add_option("--out", sp->out, "CSV (default stdout)");
  s->footer(
      "CSV columns:\n"
      "  design     optimal, fitted or naive\n"
      "  k          step\n"
      "  metric     weight scored\n"
      "  mean,std_error,replicates  across replicates");
  s->callback([sp] {
    const auto d = optimal_design(sp->m, sp->w.build(), sp->g, sp->grid, SolverConfig{});
    const auto bank = io::read_bank(sp->psi);
    const PsiInterpolator psi(bank);
    auto cfg = sp->market.build();
    const std::vector<std::pair<std::string, RatingDesign>> designs{
        {"optimal", d.file.beta},
        {"fitted", QuestionDesign{fit_h(d.file.beta, bank), psi}},
        {"naive", QuestionDesign{uniform_distribution(bank.questions()), psi}},
    };
    std::ostringstream csv;
    csv << "design,k,metric,mean,std_error,replicates\n";
    for (const auto& [name, design] : designs) {
      cfg.design = design;
      const auto res = run_simulation(cfg);
      for (const auto& p : res.summary) {
        csv << name << ',' << p.k << ',' << to_string(p.metric) << ',' << format_double(p.mean) << ','
            << format_double(p.std_error) << ',' << p.replicates << '\n';
      }
    }
    emit(sp->out, csv.str());
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rating-system design: optimal step designs, question distributions, market simulation"};
  app.name("ratecraft");
  app.require_subcommand(1);
  add_optimize_beta(app);
  add_fit_h(app);
  add_estimate_psi(app);
  add_simulate(app);
  add_rate(app);
  add_double(app);
  add_partition(app);
  add_figures(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
