#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairq/errors.hpp"
#include "fairq/metrics.hpp"
#include "fairq/scenarios.hpp"
#include "oracles.hpp"

namespace fairq {
namespace {

TEST(Catalog, NamesResolveAndValidate) {
  for (const auto& name : scenario_names()) {
    const auto sc = scenario_by_name(name);
    EXPECT_EQ(sc.name, name);
    EXPECT_NO_THROW(sc.validate());
  }
  EXPECT_EQ(scenario_by_name("random-12").name, "random-12");
  EXPECT_THROW(scenario_by_name("nope"), ValidationError);
  const auto s1 = scenario_s1();
  EXPECT_EQ(s1.p1, 0.5);
  EXPECT_FALSE(s1.note.empty());
  EXPECT_NEAR(s1.f_star(0.2), 1.0 / (1.0 + std::exp(0.6)), 1e-16);
}

TEST(Catalog, ValidationRejectsBadPriorsAndDimensions) {
  auto sc = scenario_s1();
  sc.p1 = 1.0;
  EXPECT_THROW(sc.validate(), ValidationError);
  sc = scenario_s1();
  sc.group2 = GaussianGroupParams{{0.0, 0.0}, 1.0};
  EXPECT_THROW(sc.validate(), ValidationError);
  sc = scenario_gauss2d();
  sc.f_star = BayesRegressor::logistic(1.0);
  EXPECT_THROW(sc.validate(), ValidationError);
}

TEST(Grids, WorkingRangeFollowsLargestScale) {
  const auto g = working_range(scenario_s1(), {});
  EXPECT_NEAR(g.lo(), -1.0 - 8.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(g.hi(), 1.0 + 8.0 * std::sqrt(2.0), 1e-12);
  EXPECT_EQ(g.n_cells(), 4096u);
  GridSettings fixed;
  fixed.range = std::pair{-5.0, 5.0};
  EXPECT_EQ(working_range(scenario_s1(), fixed).lo(), -5.0);
  EXPECT_THROW(discretize(scenario_gauss2d()), ValidationError);
  const auto grids = discretize(scenario_disjoint());
  EXPECT_NEAR(grids.group1.mass(), 1.0, 1e-12);
  EXPECT_EQ(grids.group1.at(2.0), 0.0);
}

TEST(Sample, DeterministicAndSeedSensitive) {
  const auto sc = scenario_s1();
  const auto a = sample(sc, 30000, 4);
  const auto b = sample(sc, 30000, 4);
  const auto c = sample(sc, 30000, 5);
  EXPECT_EQ(a.xs, b.xs);
  EXPECT_EQ(a.ss, b.ss);
  EXPECT_EQ(a.fstar_vals, b.fstar_vals);
  EXPECT_NE(a.xs, c.xs);
  ASSERT_EQ(a.xs.size(), a.n);
  ASSERT_EQ(a.ss.size(), a.n);
  for (std::size_t i = 0; i < a.n; i += 101) EXPECT_EQ(a.fstar_vals[i], sc.f_star(a.x(i)));
}

TEST(Sample, GroupFractionWithinBound) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto sc = random_scenario(seed);
    const std::size_t n = 40000;
    const auto b = sample(sc, n, seed);
    const double frac =
        double(std::count(b.ss.begin(), b.ss.end(), 1)) / double(n);
    EXPECT_LE(std::abs(frac - sc.p1), 4.0 * std::sqrt(sc.p1 * (1 - sc.p1) / n));
  }
}

TEST(Sample, ZeroDrawsRejected) {
  EXPECT_THROW(sample(scenario_s1(), 0, 1), ValidationError);
  EXPECT_THROW(sample_group(scenario_s1(), 1, 0, 1), ValidationError);
}

TEST(Sample, GroupMeanWithinLawOfLargeNumbersBound) {
  const std::size_t n = 100000;
  const auto b = sample(scenario_s1(), n, 2024);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < b.n; ++i) {
    if (b.ss[i] == 1) {
      sum += b.xs[i];
      ++count;
    }
  }
  EXPECT_LE(std::abs(sum / count + 1.0), 4.0 / std::sqrt(double(count)));
}

TEST(Sample, IdenticalGroupsGiveCloseEcdfs) {
  const auto sc = scenario_identical();
  const std::size_t n = 50000;
  const auto g1 = sample_group(sc, 1, n, 8);
  const auto g2 = sample_group(sc, 2, n, 8);
  EXPECT_NE(g1, g2);
  EXPECT_LE(ks_distance(empirical_cdf(g1), empirical_cdf(g2)),
            3.0 / std::sqrt(double(n)));
}

TEST(Sample, MultivariateRowsHaveFullDimension) {
  const auto b = sample(scenario_gauss2d(), 1000, 1);
  EXPECT_EQ(b.dimension, 2u);
  EXPECT_EQ(b.xs.size(), 2000u);
}

TEST(Pushforwards, S1PlusSupportIsImageOfPlusInterval) {
  const auto sc = scenario_s1();
  const auto grids = discretize(sc);
  const auto jd = jordan_decompose(grids.group1, grids.group2);
  const auto f = pushforward_cdfs(sc, jd);
  const double a = oracle::crossing(-1, 1, 1, 2, -10.0, -3.0);
  const double b = oracle::crossing(-1, 1, 1, 2, -1.0, 1.0);
  const double h = grids.group1.grid().spacing();
  EXPECT_GE(f.plus.lower(), sc.f_star(b + h) - 1e-12);
  EXPECT_LE(f.plus.upper(), sc.f_star(a - h) + 1e-12);
  EXPECT_LT(f.plus(sc.f_star(b - 0.05)), 1.0);
  EXPECT_GT(f.plus(sc.f_star(a + 0.5)), 0.0);
}

TEST(Pushforwards, MirrorScenarioIsReflected) {
  const auto sc = scenario_mirror();
  const auto grids = discretize(sc);
  const auto jd = jordan_decompose(grids.group1, grids.group2);
  const auto f = pushforward_cdfs(sc, jd);
  for (double t = -4.0; t <= 4.0; t += 0.1) {
    EXPECT_NEAR(f.plus(t), 1.0 - f.minus.left_limit(-t), 1e-9) << t;
  }
}

TEST(Pushforwards, IdenticalGroupsPropagateDegeneracy) {
  const auto sc = scenario_identical();
  const auto grids = discretize(sc);
  const auto jd = jordan_decompose(grids.group1, grids.group2);
  EXPECT_THROW(pushforward_cdfs(sc, jd), DegenerateDecomposition);
}

TEST(Pushforwards, MonteCarloConvergesToQuadrature) {
  for (const auto& sc : {scenario_s1(), scenario_mirror(), random_scenario(3)}) {
    const auto grids = discretize(sc);
    const auto jd = jordan_decompose(grids.group1, grids.group2);
    const auto exact = pushforward_cdfs(sc, jd);
    const std::size_t n = 200000;
    const auto mc = pushforward_cdfs_mc(sc, n, 11);
    EXPECT_LE(ks_distance(mc.plus, exact.plus), 3.0 / std::sqrt(double(n))) << sc.name;
    EXPECT_LE(ks_distance(mc.minus, exact.minus), 3.0 / std::sqrt(double(n))) << sc.name;
    EXPECT_NEAR(mc.mass, exact.mass, 3.0 / std::sqrt(double(n))) << sc.name;
  }
}

TEST(Builders, MultivariateUnawareIsFairByMonteCarlo) {
  const auto sc = scenario_gauss2d();
  const AnyPredictor p = build_scenario_unaware(sc, QStar{});
  const auto draws = draw_groups(sc, {100000, 42});
  EXPECT_LE(dp_gap_mc(predict_draws(p, draws)), 0.02);
  EXPECT_GT(dp_gap_mc(predict_draws(sc.f_star, draws)), 0.1);
}

TEST(Builders, IdenticalGroupsGivePassthrough) {
  EXPECT_TRUE(build_scenario_unaware(scenario_identical(), QStar{}).is_passthrough());
}

TEST(AffineScan, GaussianKsOracles) {
  const double t = std::sqrt(2.0 * std::log(2.0));
  const double stationary = oracle::cdf(t) - oracle::cdf(t / std::sqrt(2.0));
  EXPECT_NEAR(stationary, 0.08303203749175647, 1e-15);
  EXPECT_NEAR(gaussian_ks_distance(0, 1, 0, std::sqrt(2.0)), stationary, 1e-12);
  EXPECT_NEAR(gaussian_ks_distance(0.3, 1.0, -0.8, 1.7), oracle::gaussian_ks(0.3, 1, -0.8, 1.7 * 1.7),
              1e-9);
  EXPECT_EQ(gaussian_ks_distance(1, 0, 1, 0), 0.0);
  EXPECT_EQ(gaussian_ks_distance(1, 0, 2, 0), 1.0);
  EXPECT_NEAR(gaussian_ks_distance(0, 0, 0, 1), 0.5, 1e-15);
}

TEST(AffineScan, ZeroOnlyAtOriginAndMeanAlignedMinimum) {
  const GaussianGroupParams g1{{1.0, -1.0}, 1.0};
  const GaussianGroupParams g2{{2.0, 1.0}, 2.0};
  const auto betas = beta_grid_2d(-1.0, 1.0, 21);
  ASSERT_EQ(betas.size(), 441u);
  const auto rows = affine_dp_scan(g1, g2, betas);
  double min_nonzero = 1.0;
  for (const auto& r : rows) {
    if (r.beta[0] == 0.0 && r.beta[1] == 0.0) {
      EXPECT_EQ(r.gap, 0.0);
    } else {
      min_nonzero = std::min(min_nonzero, r.gap);
      EXPECT_GE(r.gap, 0.08);
    }
  }
  EXPECT_NEAR(min_nonzero, 0.0829, 1e-3);
  // <beta, m2 - m1> = 0 along beta = (2, -1) t.
  const double aligned[] = {0.6, -0.3};
  const auto single = affine_dp_scan(g1, g2, {{aligned[0], aligned[1]}});
  EXPECT_NEAR(single[0].gap, 0.08303203749175647, 1e-12);
}

TEST(AffineScan, InterceptCancelsExactly) {
  const GaussianGroupParams g1{{1.0, -1.0}, 1.0};
  const GaussianGroupParams g2{{2.0, 1.0}, 2.0};
  const auto betas = beta_grid_2d(-1.0, 1.0, 7);
  const auto a = affine_dp_scan(g1, g2, betas, 0.0);
  const auto b = affine_dp_scan(g1, g2, betas, 3.25);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].gap, b[i].gap);
}

TEST(AffineScan, DpGapOfClosedFormIsZero) {
  const auto sc = scenario_gauss2d();
  const auto& a1 = std::get<BayesRegressor::Affine>(sc.regressor(1).form());
  const auto& a2 = std::get<BayesRegressor::Affine>(sc.regressor(2).form());
  const auto [f1, f2] = gaussian_affine_aware(a1.beta, a1.intercept, a2.beta, a2.intercept, sc.p1);
  const auto& g1 = std::get<GaussianGroupParams>(sc.group1);
  const auto& g2 = std::get<GaussianGroupParams>(sc.group2);
  EXPECT_LE(affine_gaussian_dp_gap(f1, f2, g1, g2), 1e-6);
}

class RandomScenarios : public ::testing::TestWithParam<int> {};

TEST_P(RandomScenarios, ValidAndReproducible) {
  const auto a = random_scenario(GetParam());
  const auto b = random_scenario(GetParam());
  EXPECT_NO_THROW(a.validate());
  EXPECT_EQ(a.p1, b.p1);
  EXPECT_GE(a.p1, 0.3);
  EXPECT_LE(a.p1, 0.7);
  EXPECT_EQ(a.f_star(0.37), b.f_star(0.37));
  const auto grids = discretize(a);
  const auto jd = jordan_decompose(grids.group1, grids.group2);
  EXPECT_FALSE(jd.degenerate());
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomScenarios, ::testing::Range(0, 6));

}  // namespace
}  // namespace fairq
