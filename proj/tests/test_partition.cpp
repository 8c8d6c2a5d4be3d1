#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "ratecraft/partition.hpp"

using namespace ratecraft;

namespace {

const WeightKind kNamed[] = {WeightKind::kendall, WeightKind::spearman, WeightKind::top,
                             WeightKind::bottom, WeightKind::extremes};

}  // namespace

TEST(Equispaced, Breakpoints) {
  EXPECT_EQ(equispaced_partition(4).breakpoints, (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  EXPECT_EQ(equispaced_partition(2).breakpoints, (std::vector<double>{0, 0.5, 1}));
  const auto p = equispaced_partition(200);
  ASSERT_EQ(p.breakpoints.size(), 201u);
  for (std::size_t i = 0; i < 200; ++i) {
    EXPECT_NEAR(p.breakpoints[i + 1] - p.breakpoints[i], 0.005, 1e-15);
  }
  EXPECT_THROW(equispaced_partition(1), ValidationError);
}

TEST(Optimize, KendallAndSpearmanOnGrid) {
  for (auto kind : {WeightKind::kendall, WeightKind::spearman}) {
    const auto p = optimize_partition(normalize_weight(kind), 4, 400);
    EXPECT_EQ(p.breakpoints, (std::vector<double>{0, 0.25, 0.5, 0.75, 1})) << to_string(kind);
  }
}

TEST(Optimize, KendallAndSpearmanEquispacedWithinOneCell) {
  for (auto kind : {WeightKind::kendall, WeightKind::spearman}) {
    for (std::size_t m : {3, 7, 13}) {
      const std::size_t grid = 1000;
      const auto p = optimize_partition(normalize_weight(kind), m, grid);
      for (std::size_t i = 0; i <= m; ++i) {
        EXPECT_LE(std::abs(p.breakpoints[i] - double(i) / m), 1.0 / grid + 1e-12)
            << to_string(kind) << " M=" << m << " i=" << i;
      }
    }
  }
}

TEST(Optimize, BottomShiftsDownAndMatchesEnumeration) {
  const auto w = normalize_weight(WeightKind::bottom);
  const auto p = optimize_partition(w, 3, 300);
  EXPECT_LT(p.breakpoints[1], 1.0 / 3.0);
  EXPECT_LT(p.breakpoints[2], 2.0 / 3.0);
  const auto e = oracle::enumerate_partitions(w, 3, 300);
  EXPECT_NEAR(p.breakpoints[1], e.cuts[0] / 300.0, 1e-12);
  EXPECT_NEAR(p.breakpoints[2], e.cuts[1] / 300.0, 1e-12);
}

TEST(Optimize, MatchesEnumerationSmallGrids) {
  for (auto kind : kNamed) {
    const auto w = normalize_weight(kind);
    for (int m = 2; m <= 4; ++m) {
      for (int grid : {40, 60}) {
        const auto p = optimize_partition(w, m, grid);
        const auto e = oracle::enumerate_partitions(w, m, grid);
        double mine = 0.0;
        for (int i = 0; i < m; ++i) {
          mine += oracle::triangle_mass(w, p.breakpoints[i], p.breakpoints[i + 1]);
        }
        EXPECT_NEAR(mine, e.within, 1e-10) << to_string(kind) << " M=" << m << " G=" << grid;
        if (e.runner_up - e.within > 1e-9) {
          for (int i = 0; i + 1 < m; ++i) {
            EXPECT_NEAR(p.breakpoints[i + 1] * grid, e.cuts[i], 1e-9)
                << to_string(kind) << " M=" << m << " G=" << grid;
          }
        }
        ASSERT_TRUE(p.value.has_value());
        EXPECT_NEAR(*p.value, 1.0 - e.within, 1e-10);
      }
    }
  }
}

TEST(Optimize, Validation) {
  const auto w = normalize_weight(WeightKind::kendall);
  EXPECT_THROW(optimize_partition(w, 1, 100), ValidationError);
  EXPECT_THROW(optimize_partition(w, 20, 100), ValidationError);
}

TEST(AsymptoticValue, Kendall) {
  const auto w = normalize_weight(WeightKind::kendall);
  EXPECT_NEAR(asymptotic_value(equispaced_partition(4), w), 0.75, 1e-12);
  EXPECT_NEAR(asymptotic_value(equispaced_partition(200), w), 0.995, 1e-12);
  EXPECT_NEAR(asymptotic_value(Partition{{0.0, 1.0}, std::nullopt}, w), 0.0, 1e-12);
}

TEST(AsymptoticValue, AgreesWithOracleAndRefines) {
  for (auto kind : kNamed) {
    const auto w = normalize_weight(kind);
    const Partition p = make_partition({0.0, 0.13, 0.4, 0.77, 1.0});
    double within = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      within += oracle::triangle_mass(w, p.breakpoints[i], p.breakpoints[i + 1], 60);
    }
    EXPECT_NEAR(asymptotic_value(p, w), 1.0 - within, 1e-10) << to_string(kind);
    double prev = -1.0;
    for (std::size_t m : {2, 4, 8, 16, 32, 64}) {
      const double v = asymptotic_value(equispaced_partition(m), w);
      EXPECT_GE(v, prev);
      prev = v;
    }
    EXPECT_GT(prev, 0.95);
  }
}

TEST(Partitions, Validation) {
  EXPECT_THROW(make_partition({0.0, 0.5, 0.4, 1.0}), ValidationError);
  EXPECT_THROW(make_partition({0.1, 1.0}), ValidationError);
}
