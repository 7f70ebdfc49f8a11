#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fairq/errors.hpp"
#include "fairq/transport.hpp"
#include "oracles.hpp"

namespace fairq {
namespace {

Cdf gaussian_cdf_grid(double m, double sd, std::size_t cells = 4096) {
  GridGeometry g(m - 12.0 * sd, m + 12.0 * sd, cells);
  const auto d = DensityGrid1D::tabulate(
      g, [&](double x) { return oracle::gauss_pdf(x, m, sd * sd); });
  return cdf_from_density(d, [](double x) { return x; });
}

// Strictly increasing random piecewise-linear CDF.
Cdf random_cdf(std::mt19937_64& rng, std::size_t knots = 12) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> xs{std::uniform_real_distribution<double>(-2, 2)(rng)};
  std::vector<double> vs{0.0};
  for (std::size_t k = 1; k < knots; ++k) {
    xs.push_back(xs.back() + 0.05 + e(rng));
    vs.push_back(vs.back() + 0.01 + e(rng));
  }
  for (double& v : vs) v /= vs.back();
  return Cdf(xs, vs);
}

QuantileFn random_q(std::mt19937_64& rng) {
  return generalized_inverse(random_cdf(rng));
}

TEST(Cdf, ValidatesShape) {
  EXPECT_THROW(Cdf({0, 1}, {0, 0.5}), ValidationError);
  EXPECT_THROW(Cdf({1, 0}, {0, 1}), ValidationError);
  EXPECT_THROW(Cdf({0, 1}, {0.6, 0.5}), ValidationError);
  EXPECT_THROW(Cdf({0, 1}, {-0.1, 1}), ValidationError);
  EXPECT_NO_THROW(Cdf({0, 1}, {0, 1}));
}

TEST(Cdf, EvaluatesLinearlyWithAtoms) {
  const Cdf f({0, 1, 1, 2}, {0, 0.25, 0.75, 1});
  EXPECT_EQ(f(-1.0), 0.0);
  EXPECT_NEAR(f(0.5), 0.125, 1e-15);
  EXPECT_NEAR(f(1.0), 0.75, 1e-15);
  EXPECT_NEAR(f.left_limit(1.0), 0.25, 1e-15);
  EXPECT_NEAR(f(1.5), 0.875, 1e-15);
  EXPECT_EQ(f(3.0), 1.0);
  const auto delta = Cdf::point_mass(2.0);
  EXPECT_EQ(delta(1.999), 0.0);
  EXPECT_EQ(delta(2.0), 1.0);
}

TEST(CdfFromDensity, UniformIdentity) {
  const DensityGrid1D u(GridGeometry(0, 1, 64), std::vector<double>(65, 1.0));
  const auto f = cdf_from_density(u, [](double x) { return x; });
  for (double t : {0.0, 0.1, 0.37, 0.5, 0.99, 1.0}) EXPECT_NEAR(f(t), t, 1e-12);
}

TEST(CdfFromDensity, GaussianIdentity) {
  const auto f = gaussian_cdf_grid(0, 1);
  // Trapezoid cell masses are second order: h^2 |p'| / 12 is about 2e-6 here.
  EXPECT_NEAR(f(1.0), oracle::cdf(1.0), 5e-6);
  EXPECT_NEAR(f(1.0), 0.8413, 1e-4);
}

TEST(CdfFromDensity, DecreasingLogisticHasHalfMedian) {
  GridGeometry g(-8, 8, 4096);
  const auto d = DensityGrid1D::tabulate(g, [](double x) { return oracle::pdf(x); });
  const auto f = cdf_from_density(d, [](double x) { return 1.0 / (1.0 + std::exp(3.0 * x)); });
  EXPECT_NEAR(f(0.5), 0.5, 1e-9);
  const double t = 1.0 / (1.0 + std::exp(3.0));
  EXPECT_NEAR(f(t), 1.0 - oracle::cdf(1.0), 1e-6);
}

TEST(CdfFromDensity, NonFiniteMapIsNumericError) {
  const DensityGrid1D u(GridGeometry(0, 1, 4), std::vector<double>(5, 1.0));
  EXPECT_THROW(cdf_from_density(u, [](double x) { return std::log(x - 0.5); }),
               NumericError);
}

TEST(Pushforward, FlatCellsBecomeAtoms) {
  const std::vector<double> images{0.0, 1.0, 1.0, 2.0};
  const std::vector<double> masses{0.25, 0.5, 0.25};
  const auto f = pushforward_cells(images, masses);
  EXPECT_NEAR(f.left_limit(1.0), 0.25, 1e-15);
  EXPECT_NEAR(f(1.0), 0.75, 1e-15);
  EXPECT_NEAR(f(1.5), 0.875, 1e-15);
}

TEST(Pushforward, OverlappingRampsAccumulate) {
  // Decreasing then increasing map: both cells cover [0, 1].
  const std::vector<double> images{1.0, 0.0, 1.0};
  const std::vector<double> masses{0.5, 0.5};
  const auto f = pushforward_cells(images, masses);
  for (double t : {0.0, 0.2, 0.5, 0.9, 1.0}) EXPECT_NEAR(f(t), t, 1e-15);
}

TEST(GeneralizedInverse, ExamplesAndConventions) {
  const auto id = generalized_inverse(Cdf({0, 1}, {0, 1}));
  for (double u : {0.0, 0.2, 0.5, 1.0}) EXPECT_NEAR(id(u), u, 1e-15);

  const std::vector<double> atoms{1, 2, 3};
  const auto step = generalized_inverse(empirical_cdf(atoms));
  EXPECT_EQ(step(0.5), 2.0);
  EXPECT_EQ(step(1.0 / 3.0), 1.0);
  EXPECT_EQ(step(0.34), 2.0);
  EXPECT_EQ(step(1.0), 3.0);

  // Flat stretch of F on [1, 2] maps to its left end.
  const auto flat = generalized_inverse(Cdf({0, 1, 2, 3}, {0, 0.5, 0.5, 1}));
  EXPECT_EQ(flat(0.5), 1.0);
  EXPECT_GE(flat.right_limit(0.5), 2.0 - 1e-12);

  const auto g = generalized_inverse(gaussian_cdf_grid(0, 1));
  EXPECT_NEAR(g(oracle::cdf(1.0)), 1.0, 1e-4);
  EXPECT_THROW(g(1.5), DomainError);
  EXPECT_THROW(g(-0.1), DomainError);
}

TEST(GeneralizedInverse, RoundTripOnStrictlyIncreasing) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_cdf(rng);
    const auto q = generalized_inverse(f);
    for (int k = 1; k < 1000; ++k) {
      const double t = k / 1000.0;
      EXPECT_NEAR(f(q(t)), t, 1e-9);
    }
    for (int k = 0; k <= 200; ++k) {
      const double x = f.lower() + (f.upper() - f.lower()) * k / 200.0;
      EXPECT_NEAR(q(f(x)), x, 1e-9);
    }
  }
}

TEST(Ks, Examples) {
  const auto a = gaussian_cdf_grid(0, 1);
  EXPECT_EQ(ks_distance(a, a), 0.0);
  const double expected = oracle::gaussian_ks(0, 1, 0, 2);
  EXPECT_NEAR(expected, 0.08303203749175647, 1e-9);
  const double t = std::sqrt(2.0 * std::log(2.0));
  EXPECT_NEAR(std::abs(oracle::gauss_cdf(t, 0, 1) - oracle::gauss_cdf(t, 0, 2)),
              expected, 1e-12);
  EXPECT_NEAR(ks_distance(a, gaussian_cdf_grid(0, std::sqrt(2.0))), expected, 1e-5);
  EXPECT_EQ(ks_distance(Cdf({0, 1}, {0, 1}), Cdf({2, 3}, {0, 1})), 1.0);
  EXPECT_EQ(ks_distance(Cdf::point_mass(0), Cdf::point_mass(1e-9)), 1.0);
}

TEST(Ks, IsAMetric) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_cdf(rng), b = random_cdf(rng), c = random_cdf(rng);
    const double ab = ks_distance(a, b);
    EXPECT_EQ(ab, ks_distance(b, a));
    EXPECT_EQ(ks_distance(a, a), 0.0);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_LE(ks_distance(a, c), ab + ks_distance(b, c) + 1e-15);
  }
}

TEST(W2, Examples) {
  const auto a = gaussian_cdf_grid(0, 1);
  EXPECT_EQ(wasserstein2_sq(a, a), 0.0);
  EXPECT_NEAR(wasserstein2_sq(Cdf::point_mass(0), Cdf::point_mass(1)), 1.0, 1e-15);
  EXPECT_NEAR(wasserstein2_sq(a, gaussian_cdf_grid(1, 1)), 1.0, 1e-4);
}

TEST(W2, GaussianClosedFormAcrossScales) {
  const double cases[][4] = {{0, 1, 1, 1}, {0, 1, 0, std::sqrt(2.0)},
                             {-1, 1, 1, std::sqrt(2.0)}, {0.3, 0.5, -0.7, 1.7}};
  for (const auto& c : cases) {
    const auto a = gaussian_cdf_grid(c[0], c[1]);
    const auto b = gaussian_cdf_grid(c[2], c[3]);
    const double exact = oracle::gaussian_w2_sq(c[0], c[1], c[2], c[3]);
    EXPECT_NEAR(wasserstein2_sq(a, b), exact, 1e-4);
    EXPECT_NEAR(wasserstein2_sq(b, a), wasserstein2_sq(a, b), 1e-12);
    // The composite trapezoid only holds up when the quantile tails cancel.
    if (c[1] == c[3]) {
      const W2Options trap{QuantileRule::Trapezoid, 8193};
      EXPECT_NEAR(wasserstein2_sq(a, b, trap), exact, 1e-4);
    }
  }
}

TEST(W2, TriangleInequalityOnSquareRoot) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_cdf(rng), b = random_cdf(rng), c = random_cdf(rng);
    const double ab = std::sqrt(wasserstein2_sq(a, b));
    const double bc = std::sqrt(wasserstein2_sq(b, c));
    const double ac = std::sqrt(wasserstein2_sq(a, c));
    EXPECT_LE(ac, ab + bc + 1e-12);
    EXPECT_NEAR(wasserstein2_sq(a, b), wasserstein2_sq(b, a), 1e-12);
  }
}

TEST(W2, ExactRuleMatchesFineTrapezoidOnSmoothInputs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_cdf(rng), b = random_cdf(rng);
    const double exact = wasserstein2_sq(a, b);
    const double trap = wasserstein2_sq(a, b, {QuantileRule::Trapezoid, 1 << 16});
    EXPECT_NEAR(exact, trap, 1e-6 * (1.0 + exact));
  }
}

TEST(Barycenter, Examples) {
  const QuantileFn qa({0, 1}, {0, 1});
  const QuantileFn qb({0, 1}, {1, 3});
  const auto mid = barycenter_quantile(qa, qb, 0.5);
  EXPECT_NEAR(mid(0.5), 1.25, 1e-15);
  for (double t : {0.0, 0.3, 1.0}) EXPECT_NEAR(mid(t), (3 * t + 1) / 2, 1e-15);
  const auto same = barycenter_quantile(qa, qa, 0.3);
  for (double t : {0.0, 0.3, 0.9}) EXPECT_NEAR(same(t), qa(t), 1e-15);
  const auto one = barycenter_quantile(qa, qb, 1.0);
  EXPECT_EQ(one.levels().size(), qa.levels().size());
  for (double t : {0.1, 0.7}) EXPECT_EQ(one(t), qa(t));
  EXPECT_THROW(barycenter_quantile(qa, qb, 1.5), ValidationError);
  EXPECT_THROW(barycenter_quantile(qa, qb, -0.1), ValidationError);
}

TEST(Barycenter, PointwiseAverageAndMonotone) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto qa = random_q(rng), qb = random_q(rng);
    const double weight = w(rng);
    const auto q = barycenter_quantile(qa, qb, weight);
    double prev = -1e300;
    for (int k = 0; k <= 4000; ++k) {
      const double t = k / 4000.0;
      const double v = q(t);
      EXPECT_GE(v, prev);
      EXPECT_NEAR(v, weight * qa(t) + (1 - weight) * qb(t), 1e-9);
      prev = v;
    }
  }
}

TEST(WeightedEcdf, StepAndLinearized) {
  const std::vector<double> v{3, 1, 2, 2};
  const std::vector<double> w{1, 1, 1, 0};
  const auto step = weighted_ecdf(v, w);
  EXPECT_NEAR(step(1.5), 1.0 / 3, 1e-15);
  EXPECT_NEAR(step(2.0), 2.0 / 3, 1e-15);
  EXPECT_NEAR(step.left_limit(2.0), 1.0 / 3, 1e-15);
  const auto lin = weighted_ecdf(v, w, EcdfStyle::Linearized);
  EXPECT_NEAR(lin(1.5), 0.5, 1e-15);
  EXPECT_THROW(weighted_ecdf(v, std::vector<double>(4, 0.0)), ValidationError);
  EXPECT_THROW(weighted_ecdf(v, std::vector<double>{1, -1, 1, 1}), ValidationError);
}

TEST(ScalarLaw, GaussianMatchesOracle) {
  const auto law = ScalarLaw::gaussian(0.5, 2.0);
  for (double t : {-3.0, 0.0, 0.5, 2.0}) {
    EXPECT_NEAR(law.cdf(t), oracle::gauss_cdf(t, 0.5, 4.0), 1e-15);
  }
  for (double u : {1e-9, 0.01, 0.3, 0.5, 0.8413, 0.999999}) {
    EXPECT_NEAR(law.quantile(u), 0.5 + 2.0 * oracle::quantile(u), 1e-9);
  }
  const auto point = ScalarLaw::gaussian(1.0, 0.0);
  EXPECT_EQ(point.cdf(0.999), 0.0);
  EXPECT_EQ(point.cdf(1.0), 1.0);
  EXPECT_EQ(point.quantile(0.3), 1.0);
  EXPECT_THROW(ScalarLaw::gaussian(0.0, -1.0), ValidationError);
}

TEST(ScalarLaw, TabulatedRoundTrip) {
  const auto law = ScalarLaw::tabulated(gaussian_cdf_grid(0, 1));
  EXPECT_NEAR(law.quantile(law.cdf(0.7)), 0.7, 1e-9);
  EXPECT_NEAR(law.cdf(1.0), oracle::cdf(1.0), 5e-6);
}

}  // namespace
}  // namespace fairq
