#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "ratecraft/optimizer.hpp"
#include "ratecraft/rates.hpp"

using namespace ratecraft;

namespace {

std::vector<double> uniform_g(std::size_t n) { return std::vector<double>(n, 1.0); }

// Interior-c formula for one level between lo and hi under uniform matching.
double middle_level(double lo, double hi) {
  const double c = std::pow((std::sqrt(1 - hi) - std::sqrt(1 - lo)) / (std::sqrt(lo) - std::sqrt(hi)), 2);
  return c / (1 + c);
}

double sup_distance(const StepBeta& a, const StepBeta& b) {
  // Both are step functions; the sup is attained on some cell of the merged
  // breakpoint set, so sampling each cell once is exact.
  std::vector<double> cuts = a.breakpoints();
  cuts.insert(cuts.end(), b.breakpoints().begin(), b.breakpoints().end());
  std::sort(cuts.begin(), cuts.end());
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    d = std::max(d, std::abs(a(mid) - b(mid)));
  }
  return d;
}

}  // namespace

TEST(EqualizeChain, IntroExample) {
  const auto t = equalize_chain(0.1, 0.5, 1, uniform_g(3));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_NEAR(t[0], middle_level(0.1, 0.5), 1e-9);
  EXPECT_NEAR(t[0], 0.276393, 1e-6);
}

TEST(EqualizeChain, SymmetricCases) {
  EXPECT_NEAR(equalize_chain(0.0, 1.0, 1, uniform_g(3))[0], 0.5, 1e-9);
  const auto t = equalize_chain(0.0, 1.0, 2, uniform_g(4));
  EXPECT_NEAR(t[0], 0.25, 1e-9);
  EXPECT_NEAR(t[1], 0.75, 1e-9);
}

TEST(EqualizeChain, RatesEqual) {
  const std::vector<double> g{0.2, 0.5, 0.6, 0.9, 1.0};
  const auto t = equalize_chain(0.05, 0.95, 3, g);
  std::vector<double> all{0.05};
  all.insert(all.end(), t.begin(), t.end());
  all.push_back(0.95);
  std::vector<double> rates;
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    ASSERT_LT(all[i], all[i + 1]);
    rates.push_back(pairwise_rate(all[i], all[i + 1], g[i], g[i + 1]));
  }
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  EXPECT_LT(*hi - *lo, 1e-9);
}

TEST(EqualizeChain, Validation) {
  EXPECT_THROW(equalize_chain(0.5, 0.1, 1, uniform_g(3)), ValidationError);
  EXPECT_THROW(equalize_chain(0.1, 0.5, 0, uniform_g(2)), ValidationError);
  EXPECT_THROW(equalize_chain(0.1, 0.5, 1, uniform_g(4)), ValidationError);
  SolverConfig cfg;
  cfg.tol = 0.0;
  EXPECT_THROW(equalize_chain(0.1, 0.5, 1, uniform_g(3), cfg), ValidationError);
}

TEST(EqualizeChain, IterationCapReportsNonConvergence) {
  SolverConfig cfg;
  cfg.max_outer = 3;
  EXPECT_THROW(equalize_chain(0.0, 1.0, 5, uniform_g(7), cfg), ConvergenceError);
}

TEST(NestedBisection, ClosedForms) {
  const auto m3 = nested_bisection(3, MatchProfile::uniform(3));
  EXPECT_NEAR(m3.beta.levels()[1], 0.5, 1e-9);
  EXPECT_NEAR(m3.rate, std::log(2.0), 1e-9);
  EXPECT_EQ(m3.beta.levels().front(), 0.0);
  EXPECT_EQ(m3.beta.levels().back(), 1.0);
  const auto m4 = nested_bisection(4, MatchProfile::uniform(4));
  EXPECT_NEAR(m4.beta.levels()[1], 0.25, 1e-8);
  EXPECT_NEAR(m4.beta.levels()[2], 0.75, 1e-8);
  EXPECT_NEAR(m4.rate, -std::log(0.75), 1e-8);
  const auto m5 = nested_bisection(5, MatchProfile::uniform(5));
  const std::vector<double> expect{0.0, 0.5 * (1 - std::sqrt(0.5)), 0.5, 0.5 * (1 + std::sqrt(0.5)), 1.0};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(m5.beta.levels()[i], expect[i], 1e-8);
  EXPECT_NEAR(m5.beta.levels()[1], 0.146447, 1e-6);
  EXPECT_NEAR(m5.rate, 0.158, 1e-3);
}

TEST(NestedBisection, DegenerateTwoLevels) {
  const auto s = nested_bisection(2, MatchProfile::uniform(2));
  EXPECT_TRUE(s.degenerate);
  EXPECT_TRUE(std::isinf(s.rate));
  EXPECT_EQ(s.beta.levels(), (std::vector<double>{0.0, 1.0}));
  EXPECT_THROW(nested_bisection(1, MatchProfile::uniform(1)), ValidationError);
  EXPECT_THROW(nested_bisection(4, MatchProfile::uniform(3)), ValidationError);
}

TEST(NestedBisection, PerturbationLowersRate) {
  for (std::size_t m : {4, 6, 9}) {
    for (int linear = 0; linear < 2; ++linear) {
      const auto s = equispaced_breakpoints(m);
      const auto g = linear ? MatchProfile::linear(s) : MatchProfile::uniform(m);
      const auto sol = nested_bisection(m, g);
      EXPECT_LE(sol.residual_spread, 1e-9);
      const double eps = 10.0 * SolverConfig{}.residual_tol;
      for (std::size_t i = 1; i + 1 < m; ++i) {
        for (double sign : {-1.0, 1.0}) {
          auto t = sol.beta.levels();
          t[i] += sign * eps;
          EXPECT_LT(overall_rate(t, g.values()), sol.rate) << "M=" << m << " i=" << i;
        }
      }
    }
  }
}

TEST(NestedBisection, BruteForceNeverBeatsSolver) {
  for (std::size_t m : {3, 4}) {
    for (int linear = 0; linear < 2; ++linear) {
      const auto s = equispaced_breakpoints(m);
      const auto g = linear ? MatchProfile::linear(s) : MatchProfile::uniform(m);
      const auto sol = nested_bisection(m, g);
      const double brute = oracle::brute_force_rate(static_cast<int>(m), g.values(),
                                                    m == 3 ? 1e-3 : 4e-3, 1e-5);
      EXPECT_LE(brute, sol.rate + 1e-6) << "M=" << m << " linear=" << linear;
      EXPECT_GE(brute, sol.rate - 1e-4);
    }
  }
}

TEST(NestedBisection, LastLevelBound) {
  for (std::size_t m = 3; m <= 30; m += 3) {
    const auto s = equispaced_breakpoints(m);
    for (const auto& g : {MatchProfile::uniform(m), MatchProfile::linear(s)}) {
      const auto sol = nested_bisection(m, g);
      EXPECT_GE(sol.beta.levels()[m - 2], 1.0 - 1.0 / double(m - 1)) << "M=" << m;
    }
  }
}

TEST(NestedBisection, TopHeavyMatchingRaisesLevels) {
  // Rescaling g leaves the optimal levels unchanged, so for each k the linear
  // profile divided by g_k is >= 1 above k and <= 1 below it; the level at k
  // then dominates the uniform one.
  for (std::size_t m : {4, 8, 16, 40}) {
    const auto s = equispaced_breakpoints(m);
    const auto uni = nested_bisection(m, MatchProfile::uniform(m));
    const auto lin = nested_bisection(m, MatchProfile::linear(s));
    for (std::size_t k = 1; k + 1 < m; ++k) {
      EXPECT_GE(lin.beta.levels()[k], uni.beta.levels()[k] - 1e-12) << "M=" << m << " k=" << k;
    }
  }
}

TEST(DoubleLevels, Examples) {
  const StepBeta three(equispaced_breakpoints(3), {0.0, 0.5, 1.0});
  const auto five = double_levels(three);
  const std::vector<double> expect{0.0, 0.5 * (1 - std::sqrt(0.5)), 0.5, 0.5 * (1 + std::sqrt(0.5)), 1.0};
  ASSERT_EQ(five.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(five.levels()[i], expect[i], 1e-15);
  EXPECT_EQ(five.breakpoints(), equispaced_breakpoints(5));
  const auto from_two = double_levels(StepBeta({0.0, 0.5, 1.0}, {0.0, 1.0}));
  EXPECT_EQ(from_two.levels(), (std::vector<double>{0.0, 0.5, 1.0}));
}

TEST(DoubleLevels, MatchesSolver) {
  for (std::size_t m : {3, 4, 8, 16}) {
    const auto doubled = double_levels(nested_bisection(m, MatchProfile::uniform(m)).beta);
    const auto direct = nested_bisection(2 * m - 1, MatchProfile::uniform(2 * m - 1)).beta;
    for (std::size_t i = 0; i < 2 * m - 1; ++i) {
      EXPECT_NEAR(doubled.levels()[i], direct.levels()[i], 1e-6) << "M=" << m << " i=" << i;
    }
  }
}

TEST(DoubleLevels, RejectsNonUniform) {
  const StepBeta three(equispaced_breakpoints(3), {0.0, 0.5, 1.0});
  EXPECT_THROW(double_levels(three, MatchProfile::linear(three.breakpoints())), ValidationError);
  EXPECT_NO_THROW(double_levels(three, MatchProfile::uniform(3)));
}

TEST(DoubleLevels, ConvergesInSupNorm) {
  StepBeta beta(equispaced_breakpoints(3), {0.0, 0.5, 1.0});
  double prev = std::numeric_limits<double>::infinity();
  for (int q = 0; q < 6; ++q) {
    const auto next = double_levels(beta);
    const double d = sup_distance(beta, next);
    EXPECT_LT(d, prev) << "q=" << q;
    prev = d;
    beta = next;
  }
}

TEST(RateBounds, HalvingAndFifth) {
  for (std::size_t m : {4, 8, 16, 32}) {
    const double r = nested_bisection(m, MatchProfile::uniform(m)).rate;
    const double r2 = nested_bisection(2 * m - 1, MatchProfile::uniform(2 * m - 1)).rate;
    EXPECT_LE(r2, 0.5 * r) << m;
    EXPECT_GE(r2, 0.2 * r) << m;
  }
}

TEST(Verify, Examples) {
  const auto opt = nested_bisection(4, MatchProfile::uniform(4));
  const auto rep = verify_equalization(opt.beta, MatchProfile::uniform(4));
  EXPECT_TRUE(rep.pass);
  EXPECT_LT(rep.spread, 1e-9);
  const auto bad = verify_equalization(StepBeta(equispaced_breakpoints(3), {0.0, 0.3, 1.0}),
                                       MatchProfile::uniform(3));
  EXPECT_FALSE(bad.pass);
  ASSERT_EQ(bad.rates.size(), 2u);
  EXPECT_NEAR(bad.rates[0], -std::log(0.7), 1e-15);
  EXPECT_NEAR(bad.rates[1], -std::log(0.3), 1e-15);
  EXPECT_TRUE(verify_equalization(StepBeta(equispaced_breakpoints(3), {0.0, 0.5, 1.0}),
                                  MatchProfile::uniform(3))
                  .pass);
}

TEST(WithBreakpoints, KeepsLevels) {
  const auto opt = nested_bisection(3, MatchProfile::uniform(3));
  const auto moved = with_breakpoints(opt.beta, make_partition({0.0, 0.2, 0.9, 1.0}));
  EXPECT_EQ(moved.levels(), opt.beta.levels());
  EXPECT_EQ(moved(0.5), opt.beta.levels()[1]);
  EXPECT_THROW(with_breakpoints(opt.beta, make_partition({0.0, 0.5, 1.0})), ValidationError);
}
