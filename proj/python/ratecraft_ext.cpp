#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ratecraft/heuristic.hpp"
#include "ratecraft/io.hpp"
#include "ratecraft/optimizer.hpp"
#include "ratecraft/partition.hpp"
#include "ratecraft/psi.hpp"
#include "ratecraft/rates.hpp"
#include "ratecraft/simulator.hpp"

namespace py = pybind11;
using namespace ratecraft;

namespace {

std::string weight_name(const WeightSpec& w) { return std::string(to_string(w.kind())); }

MatchProfile match_from(const std::string& kind, const std::vector<double>& breakpoints,
                        const std::vector<double>& table) {
  return make_match_profile(parse_match_kind(kind), breakpoints, table);
}

std::vector<Rating> ratings_from(const std::vector<std::tuple<std::string, std::string, int>>& rows) {
  std::vector<Rating> out;
  out.reserve(rows.size());
  for (const auto& [item, question, response] : rows) out.push_back({item, question, response});
  return out;
}

}  // namespace

PYBIND11_MODULE(_ratecraft, m) {
  m.doc() = "Optimal rating-system design: step designs, question distributions, market simulation.";

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  (void)validation;

  // ---------------------------------------------------------------- core
  py::class_<StepBeta>(m, "StepBeta")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("breakpoints"),
           py::arg("levels"))
      .def_property_readonly("breakpoints", &StepBeta::breakpoints)
      .def_property_readonly("levels", &StepBeta::levels)
      .def("interval_of", &StepBeta::interval_of)
      .def("__call__", &StepBeta::operator(), py::arg("theta"))
      .def("__len__", &StepBeta::size)
      .def("__eq__", [](const StepBeta& a, const StepBeta& b) { return a == b; })
      .def("__repr__", [](const StepBeta& b) { return "<StepBeta M=" + std::to_string(b.size()) + ">"; });

  m.def("equispaced_breakpoints", &equispaced_breakpoints, py::arg("intervals"));

  py::class_<MatchProfile>(m, "MatchProfile")
      .def_static("uniform", &MatchProfile::uniform, py::arg("intervals"))
      .def_static("linear", [](const std::vector<double>& s) { return MatchProfile::linear(s); },
                  py::arg("breakpoints"))
      .def_static("table", &MatchProfile::table, py::arg("values"))
      .def_static("make", &match_from, py::arg("kind"), py::arg("breakpoints"),
                  py::arg("table") = std::vector<double>{})
      .def_property_readonly("kind", [](const MatchProfile& g) { return std::string(to_string(g.kind())); })
      .def_property_readonly("values", &MatchProfile::values)
      .def("__len__", &MatchProfile::size)
      .def("__getitem__", [](const MatchProfile& g, std::size_t i) {
        if (i >= g.size()) throw py::index_error();
        return g[i];
      });

  py::class_<WeightSpec>(m, "WeightSpec")
      .def_property_readonly("kind", &weight_name)
      .def_property_readonly("scale", &WeightSpec::scale)
      .def("raw", &WeightSpec::raw, py::arg("hi"), py::arg("lo"))
      .def("__call__", &WeightSpec::operator(), py::arg("hi"), py::arg("lo"));

  m.def("normalize_weight",
        [](const std::string& kind, std::size_t grid) { return normalize_weight(parse_weight_kind(kind), grid); },
        py::arg("kind"), py::arg("grid") = kDefaultQuadratureGrid);
  m.def("custom_weight",
        [](std::vector<double> table, std::size_t n, std::size_t grid) {
          return normalize_weight(std::move(table), n, grid);
        },
        py::arg("table"), py::arg("n"), py::arg("grid") = kDefaultQuadratureGrid,
        "Row-major n x n table indexed [hi_cell][lo_cell]; only the lower triangle is read.");

  py::class_<QuestionBank>(m, "QuestionBank")
      .def(py::init<std::vector<double>, std::vector<std::string>, std::vector<double>>(),
           py::arg("qualities"), py::arg("questions"), py::arg("psi"))
      .def_static("from_counts", &QuestionBank::from_counts, py::arg("qualities"), py::arg("questions"),
                  py::arg("positives"), py::arg("totals"))
      .def_property_readonly("qualities", &QuestionBank::qualities)
      .def_property_readonly("questions", &QuestionBank::questions)
      .def_property_readonly("psi_values", &QuestionBank::data)
      .def_property_readonly("rows", &QuestionBank::rows)
      .def_property_readonly("cols", &QuestionBank::cols)
      .def("psi", &QuestionBank::psi, py::arg("row"), py::arg("col"));

  py::class_<QuestionDistribution>(m, "QuestionDistribution")
      .def(py::init([](std::vector<std::string> q, std::vector<double> p, double objective) {
             QuestionDistribution h{std::move(q), std::move(p), objective};
             validate_distribution(h);
             return h;
           }),
           py::arg("questions"), py::arg("probabilities"), py::arg("objective") = 0.0)
      .def_readonly("questions", &QuestionDistribution::questions)
      .def_readonly("probabilities", &QuestionDistribution::probabilities)
      .def_readonly("objective", &QuestionDistribution::objective);
  m.def("uniform_distribution", &uniform_distribution, py::arg("questions"));

  // --------------------------------------------------------------- rates
  m.def("kl_bernoulli", &kl_bernoulli, py::arg("a"), py::arg("t"));
  m.def("inf_point", &inf_point, py::arg("t_lo"), py::arg("t_hi"), py::arg("g_lo") = 1.0,
        py::arg("g_hi") = 1.0);
  m.def("pairwise_rate", &pairwise_rate, py::arg("t_lo"), py::arg("t_hi"), py::arg("g_lo") = 1.0,
        py::arg("g_hi") = 1.0);
  m.def("numeric_pairwise_rate", &numeric_pairwise_rate, py::arg("t_lo"), py::arg("t_hi"),
        py::arg("g_lo") = 1.0, py::arg("g_hi") = 1.0, py::arg("grid") = 10000);
  m.def("overall_rate",
        [](const std::vector<double>& levels, const std::vector<double>& g) { return overall_rate(levels, g); },
        py::arg("levels"), py::arg("g"));
  m.def("overall_rate", py::overload_cast<const StepBeta&, const MatchProfile&>(&overall_rate),
        py::arg("beta"), py::arg("g"));

  // ----------------------------------------------------------- partition
  py::class_<Partition>(m, "Partition")
      .def_readonly("breakpoints", &Partition::breakpoints)
      .def_readonly("value", &Partition::value)
      .def_property_readonly("intervals", &Partition::intervals);
  m.def("make_partition", &make_partition, py::arg("breakpoints"));
  m.def("equispaced_partition", &equispaced_partition, py::arg("intervals"));
  m.def("optimize_partition", &optimize_partition, py::arg("w"), py::arg("intervals"),
        py::arg("grid") = kDefaultPartitionGrid, py::call_guard<py::gil_scoped_release>());
  m.def("asymptotic_value", &asymptotic_value, py::arg("partition"), py::arg("w"));

  // ----------------------------------------------------------- optimizer
  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("tol", &SolverConfig::tol)
      .def_readwrite("max_outer", &SolverConfig::max_outer)
      .def_readwrite("max_inner", &SolverConfig::max_inner)
      .def_readwrite("residual_tol", &SolverConfig::residual_tol);

  py::class_<LevelSolution>(m, "LevelSolution")
      .def_readonly("beta", &LevelSolution::beta)
      .def_readonly("rate", &LevelSolution::rate)
      .def_readonly("residual_spread", &LevelSolution::residual_spread)
      .def_readonly("degenerate", &LevelSolution::degenerate);

  py::class_<EqualizationReport>(m, "EqualizationReport")
      .def_readonly("rates", &EqualizationReport::rates)
      .def_readonly("spread", &EqualizationReport::spread)
      .def_readonly("passed", &EqualizationReport::pass);

  m.def("equalize_chain",
        [](double lo, double hi, std::size_t count, const std::vector<double>& g, const SolverConfig& cfg) {
          return equalize_chain(lo, hi, count, g, cfg);
        },
        py::arg("lo"), py::arg("hi"), py::arg("count"), py::arg("g"), py::arg("config") = SolverConfig{});
  m.def("nested_bisection", &nested_bisection, py::arg("levels"), py::arg("g"),
        py::arg("config") = SolverConfig{}, py::call_guard<py::gil_scoped_release>());
  m.def("with_breakpoints", &with_breakpoints, py::arg("beta"), py::arg("partition"));
  m.def("double_levels", py::overload_cast<const StepBeta&>(&double_levels), py::arg("beta"));
  m.def("double_levels", py::overload_cast<const StepBeta&, const MatchProfile&>(&double_levels),
        py::arg("beta"), py::arg("g"));
  m.def("verify_equalization", &verify_equalization, py::arg("beta"), py::arg("g"),
        py::arg("residual_tol") = SolverConfig{}.residual_tol);

  // ------------------------------------------------------ psi, heuristic
  py::class_<PsiInterpolator>(m, "PsiInterpolator")
      .def(py::init<QuestionBank>(), py::arg("bank"))
      .def("__call__", &PsiInterpolator::operator(), py::arg("theta"), py::arg("question"))
      .def("row", &PsiInterpolator::row, py::arg("theta"));
  m.def("interpolate", &interpolate, py::arg("bank"), py::arg("theta"));
  m.def("estimate_known",
        [](const std::vector<std::tuple<std::string, std::string, int>>& rows,
           const std::map<std::string, double>& qualities, const std::vector<std::string>& order) {
          return estimate_known(ratings_from(rows), qualities, order);
        },
        py::arg("ratings"), py::arg("qualities"), py::arg("question_order") = std::vector<std::string>{});
  m.def("estimate_unknown",
        [](const std::vector<std::tuple<std::string, std::string, int>>& rows, std::size_t items,
           std::size_t per_item, const std::vector<std::string>& order) {
          return estimate_unknown(ratings_from(rows), items, per_item, order);
        },
        py::arg("ratings"), py::arg("items"), py::arg("per_item"),
        py::arg("question_order") = std::vector<std::string>{});

  m.def("fit_h",
        [](const StepBeta& beta, const QuestionBank& bank, bool single, std::vector<double> theta_weights) {
          FitOptions opts{single ? HConstraint::single_question : HConstraint::free, std::move(theta_weights)};
          return fit_h(beta, bank, opts);
        },
        py::arg("beta"), py::arg("bank"), py::arg("single_question") = false,
        py::arg("theta_weights") = std::vector<double>{});
  m.def("l1_gap",
        [](const StepBeta& beta, const QuestionDistribution& h, const QuestionBank& bank,
           const std::vector<double>& theta_weights) { return l1_gap(beta, h, bank, theta_weights); },
        py::arg("beta"), py::arg("h"), py::arg("bank"), py::arg("theta_weights") = std::vector<double>{});
  py::class_<InducedBeta>(m, "InducedBeta")
      .def("__call__", &InducedBeta::operator(), py::arg("theta"))
      .def_property_readonly("distribution", &InducedBeta::distribution);
  m.def("induced_beta",
        [](const QuestionDistribution& h, const QuestionBank& bank) {
          return induced_beta(h, bank, PsiInterpolator(bank));
        },
        py::arg("h"), py::arg("bank"));

  // ----------------------------------------------------------- simulator
  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n_items", &SimConfig::n_items)
      .def_readwrite("n_buyers", &SimConfig::n_buyers)
      .def_readwrite("steps", &SimConfig::steps)
      .def_readwrite("death_prob", &SimConfig::death_prob)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("replicates", &SimConfig::replicates)
      .def_readwrite("dense_until", &SimConfig::dense_until)
      .def_readwrite("stride", &SimConfig::stride)
      .def_readwrite("burn_in", &SimConfig::burn_in)
      .def_readwrite("jobs", &SimConfig::jobs)
      .def_property(
          "matching", [](const SimConfig& c) { return std::string(to_string(c.matching)); },
          [](SimConfig& c, const std::string& s) { c.matching = parse_matching(s); })
      .def_property(
          "metrics",
          [](const SimConfig& c) {
            std::vector<std::string> out;
            for (auto k : c.metrics) out.emplace_back(to_string(k));
            return out;
          },
          [](SimConfig& c, const std::vector<std::string>& names) {
            c.metrics.clear();
            for (const auto& n : names) c.metrics.push_back(parse_weight_kind(n));
          })
      .def("use_beta", [](SimConfig& c, const StepBeta& beta) { c.design = beta; }, py::arg("beta"))
      .def("use_questions",
           [](SimConfig& c, const QuestionDistribution& h, const QuestionBank& bank) {
             c.design = QuestionDesign{h, PsiInterpolator(bank)};
           },
           py::arg("h"), py::arg("bank"));

  py::class_<SimResult>(m, "SimResult")
      .def_property_readonly("series",
                             [](const SimResult& r) {
                               py::list out;
                               for (const auto& p : r.series) {
                                 out.append(py::make_tuple(p.replicate, p.k, std::string(to_string(p.metric)), p.value));
                               }
                               return out;
                             })
      .def_property_readonly("summary",
                             [](const SimResult& r) {
                               py::list out;
                               for (const auto& p : r.summary) {
                                 out.append(py::make_tuple(p.k, std::string(to_string(p.metric)), p.mean,
                                                           p.std_error, p.replicates));
                               }
                               return out;
                             })
      .def("values_at",
           [](const SimResult& r, const std::string& metric, std::size_t k) {
             return r.values_at(parse_weight_kind(metric), k);
           },
           py::arg("metric"), py::arg("k"));

  m.def("run_simulation", &run_simulation, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("replicate_seed", &replicate_seed, py::arg("master"), py::arg("replicate"));

  py::class_<RateEstimate>(m, "RateEstimate")
      .def_readonly("slope", &RateEstimate::slope)
      .def_readonly("std_error", &RateEstimate::std_error)
      .def_readonly("k_first", &RateEstimate::k_first)
      .def_readonly("k_last", &RateEstimate::k_last)
      .def_readonly("error_mass", &RateEstimate::error_mass);
  m.def("estimate_pk_rate", &estimate_pk_rate, py::arg("t1"), py::arg("t2"), py::arg("g1"), py::arg("g2"),
        py::arg("k_max"), py::arg("reps"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());

  // ------------------------------------------------------------------ io
  m.def("read_bank", &io::read_bank, py::arg("path"));
  m.def("read_design", [](const std::string& path) {
    const auto d = io::read_design(path);
    return py::make_tuple(d.beta, d.g, std::string(to_string(d.w)), d.rate);
  }, py::arg("path"), "Returns (beta, g, w, rate); rate is None for the two-level design.");
  m.def("write_design",
        [](const std::string& path, const StepBeta& beta, const MatchProfile& g, const std::string& w,
           std::optional<double> rate) {
          io::write_design(path, io::DesignFile{beta, g, parse_weight_kind(w), rate, std::nullopt});
        },
        py::arg("path"), py::arg("beta"), py::arg("g"), py::arg("w") = "kendall",
        py::arg("rate") = std::nullopt);
  m.def("read_distribution", &io::read_distribution, py::arg("path"));
  m.def("write_distribution", &io::write_distribution, py::arg("path"), py::arg("h"));
}
