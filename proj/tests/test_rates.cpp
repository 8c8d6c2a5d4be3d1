#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ratecraft/rates.hpp"

using namespace ratecraft;

TEST(Kl, Examples) {
  EXPECT_EQ(kl_bernoulli(0.5, 0.5), 0.0);
  EXPECT_NEAR(kl_bernoulli(0.0, 0.5), std::log(2.0), 1e-15);
  EXPECT_NEAR(kl_bernoulli(0.25, 0.5), 0.130812, 1e-6);
  EXPECT_NEAR(kl_bernoulli(0.25, 0.5), 0.25 * std::log(0.5) + 0.75 * std::log(1.5), 1e-15);
}

TEST(Kl, Boundaries) {
  EXPECT_TRUE(std::isinf(kl_bernoulli(0.5, 0.0)));
  EXPECT_TRUE(std::isinf(kl_bernoulli(0.5, 1.0)));
  EXPECT_EQ(kl_bernoulli(0.0, 0.0), 0.0);
  EXPECT_EQ(kl_bernoulli(1.0, 1.0), 0.0);
  EXPECT_NEAR(kl_bernoulli(1.0, 0.25), -std::log(0.25), 1e-15);
  EXPECT_THROW(kl_bernoulli(-0.1, 0.5), ValidationError);
  EXPECT_THROW(kl_bernoulli(0.5, 1.1), ValidationError);
}

TEST(InfPoint, Examples) {
  EXPECT_EQ(inf_point(0.3, 0.3, 2.0, 2.0), 0.3);
  EXPECT_NEAR(inf_point(0.25, 0.75, 1, 1), 0.5, 1e-15);
  EXPECT_NEAR(inf_point(0.1, 0.5, 1, 1), 0.25, 1e-15);
  EXPECT_THROW(inf_point(0.1, 0.5, 0.0, 1.0), ValidationError);
}

TEST(InfPoint, MinimizesWeightedKl) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 0.99), gu(0.1, 1.0);
  for (int n = 0; n < 200; ++n) {
    double lo = u(rng), hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    const double g1 = gu(rng), g2 = gu(rng);
    const double a = inf_point(lo, hi, g1, g2);
    ASSERT_GE(a, lo);
    ASSERT_LE(a, hi);
    auto f = [&](double x) { return g1 * kl_bernoulli(x, lo) + g2 * kl_bernoulli(x, hi); };
    ASSERT_LE(f(a), f(std::min(1.0, a + 1e-4)) + 1e-15);
    ASSERT_LE(f(a), f(std::max(0.0, a - 1e-4)) + 1e-15);
    ASSERT_NEAR(f(a), pairwise_rate(lo, hi, g1, g2), 1e-12);
  }
  EXPECT_NEAR(inf_point(0.2, 0.8, 0.7, 0.7), 0.5, 1e-15);
}

TEST(PairwiseRate, Examples) {
  EXPECT_EQ(pairwise_rate(0.4, 0.4, 1, 1), 0.0);
  EXPECT_NEAR(pairwise_rate(0.1, 0.5, 1, 1), -2.0 * std::log(std::sqrt(0.45) + std::sqrt(0.05)),
              1e-15);
  EXPECT_NEAR(pairwise_rate(0.1, 0.5, 1, 1), 0.223144, 1e-6);
  EXPECT_NEAR(pairwise_rate(0.5, 1.0, 1, 1), std::log(2.0), 1e-15);
  EXPECT_NEAR(pairwise_rate(0.0, 0.3, 1, 2), -2.0 * std::log(0.7), 1e-15);
  EXPECT_NEAR(pairwise_rate(0.3, 1.0, 3, 1), -3.0 * std::log(0.3), 1e-15);
  EXPECT_TRUE(std::isinf(pairwise_rate(0.0, 1.0, 1, 1)));
  EXPECT_THROW(pairwise_rate(0.6, 0.5, 1, 1), ValidationError);
  EXPECT_THROW(pairwise_rate(0.1, 0.5, -1, 1), ValidationError);
}

TEST(PairwiseRate, NumericOracleExamples) {
  EXPECT_NEAR(numeric_pairwise_rate(0.1, 0.5, 1, 1, 10000), 0.2231435513, 1e-8);
  EXPECT_EQ(numeric_pairwise_rate(0.3, 0.3, 2, 5, 10000), 0.0);
  EXPECT_NEAR(numeric_pairwise_rate(0.25, 0.75, 2, 1, 10000), pairwise_rate(0.25, 0.75, 2, 1), 1e-8);
  EXPECT_THROW(numeric_pairwise_rate(0.1, 0.5, 1, 1, 50), ValidationError);
}

TEST(PairwiseRate, MatchesOracleOnRandomInstances) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0), gu(0.05, 1.0);
  for (int n = 0; n < 1000; ++n) {
    double lo = u(rng), hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    const double g1 = gu(rng), g2 = gu(rng);
    ASSERT_NEAR(pairwise_rate(lo, hi, g1, g2), numeric_pairwise_rate(lo, hi, g1, g2), 1e-6)
        << lo << ' ' << hi << ' ' << g1 << ' ' << g2;
  }
}

TEST(PairwiseRate, Monotone) {
  const double g1 = 0.6, g2 = 0.9;
  double prev = 0.0;
  for (int i = 1; i <= 70; ++i) {
    const double r = pairwise_rate(0.3, 0.3 + 0.01 * i, g1, g2);
    ASSERT_GT(r, prev);
    prev = r;
  }
  prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 70; ++i) {
    const double r = pairwise_rate(0.01 * i, 0.7, g1, g2);
    ASSERT_LT(r, prev);
    prev = r;
  }
}

TEST(PairwiseRate, Symmetry) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0), gu(0.05, 1.0);
  for (int n = 0; n < 500; ++n) {
    double lo = u(rng), hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    const double g1 = gu(rng), g2 = gu(rng);
    ASSERT_NEAR(pairwise_rate(lo, hi, g1, g2), pairwise_rate(1 - hi, 1 - lo, g2, g1), 1e-12);
  }
}

TEST(OverallRate, Examples) {
  EXPECT_NEAR(overall_rate(StepBeta({0, 1.0 / 3, 2.0 / 3, 1}, {0, 0.5, 1}), MatchProfile::uniform(3)),
              std::log(2.0), 1e-15);
  EXPECT_NEAR(overall_rate(StepBeta({0, 0.25, 0.5, 0.75, 1}, {0, 0.25, 0.75, 1}),
                           MatchProfile::uniform(4)),
              -std::log(0.75), 1e-15);
  const std::vector<double> t{0.0, 0.4, 0.4, 1.0};
  const std::vector<double> g(4, 1.0);
  EXPECT_EQ(overall_rate(t, g), 0.0);
  EXPECT_THROW(overall_rate(StepBeta({0, 0.5, 1}, {0, 1}), MatchProfile::uniform(3)), ValidationError);
}

TEST(OverallRate, PositiveForStrictSteps) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    std::vector<double> t{0.0};
    for (int i = 0; i < 6; ++i) t.push_back(u(rng));
    t.push_back(1.0);
    std::sort(t.begin(), t.end());
    const std::vector<double> g(t.size(), 1.0);
    ASSERT_GT(overall_rate(t, g), 0.0);
  }
}

TEST(PairRate, Struct) {
  const auto p = pair_rate(0.1, 0.5, 1, 1);
  EXPECT_NEAR(p.a_star, 0.25, 1e-15);
  EXPECT_NEAR(p.rate, 0.223144, 1e-6);
  EXPECT_GE(p.a_star, p.t_lo);
  EXPECT_LE(p.a_star, p.t_hi);
}
