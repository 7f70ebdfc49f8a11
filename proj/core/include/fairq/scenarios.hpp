#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fairq/measures.hpp"
#include "fairq/predictors.hpp"
#include "fairq/transport.hpp"

namespace fairq {

// Smooth compactly supported law on [center - half_width, center + half_width]
// with density (1 + cos(pi (x - center) / half_width)) / (2 half_width).
struct RaisedCosineLaw {
  double center = 0.0;
  double half_width = 1.0;
};

using FeatureLaw = std::variant<GaussianGroupParams, RaisedCosineLaw, DensityGrid1D>;

std::size_t law_dimension(const FeatureLaw& law);
double law_log_density(const FeatureLaw& law, Point x);

// Generative description of (X, S, Y).
struct Scenario {
  std::string name;
  std::string note;
  double p1 = 0.5;
  FeatureLaw group1;
  FeatureLaw group2;
  BayesRegressor f_star;
  // E[Y | X = x, S = s]; defaults to f* for both groups.
  std::optional<std::array<BayesRegressor, 2>> group_regressors;

  void validate() const;
  std::size_t dimension() const { return law_dimension(group1); }
  const FeatureLaw& group(int s) const;
  const BayesRegressor& regressor(int s) const;
  bool gaussian_groups() const;
};

struct GridSettings {
  std::size_t n_cells = 4096;
  // Gaussian groups span [min(m) - span * max(sigma), max(m) + span * max(sigma)].
  double sigma_span = 8.0;
  std::optional<std::pair<double, double>> range;
};

GridGeometry working_range(const Scenario& sc, const GridSettings& settings);

struct ScenarioGrids {
  DensityGrid1D group1;
  DensityGrid1D group2;
  double p1;

  const DensityGrid1D& group(int s) const { return s == 1 ? group1 : group2; }
};

// Both group laws tabulated on the working range (one-dimensional only).
ScenarioGrids discretize(const Scenario& sc, const GridSettings& settings = {});

// ------------------------------------------------------------- catalog

// p1 = 1/2, N(-1, 1) vs N(1, 2), f*(x) = 1 / (1 + exp(3x)).
Scenario scenario_s1();
// Both groups N(0, 1): any f is DP, f_Q degenerates to f*.
Scenario scenario_identical();
// Raised-cosine groups on [-3, -1] and [1, 3].
Scenario scenario_disjoint();
// N(-1, 1) vs N(1, 1) with f*(x) = x.
Scenario scenario_mirror();
// Two-dimensional N(m1, I) vs N(m2, 2I), affine f* and affine group
// regressors with <beta_s, m_s> = 0.
Scenario scenario_gauss2d();

std::vector<std::string> scenario_names();
Scenario scenario_by_name(const std::string& name);

// One-dimensional Gaussian groups with seeded means, scales, prior and a
// logistic or affine f*.
Scenario random_scenario(std::uint64_t seed);

// ------------------------------------------------------------ sampling

struct SampleBatch {
  std::size_t dimension = 1;
  std::vector<double> xs;  // row-major, n * dimension
  std::vector<int> ss;
  std::vector<double> fstar_vals;
  std::uint64_t seed = 0;
  std::size_t n = 0;

  Point x(std::size_t i) const {
    return Point(xs.data() + i * dimension, dimension);
  }
};

// Joint draws of (X, S): labels with prior p1, then features from the
// group law. Deterministic in (sc, n, seed) regardless of worker count.
SampleBatch sample(const Scenario& sc, std::size_t n, std::uint64_t seed);

// n draws from the law of X | S = group, row-major. `stream` separates
// independent uses of the same seed.
std::vector<double> sample_group(const Scenario& sc, int group, std::size_t n,
                                 std::uint64_t seed, std::uint64_t stream = 0);

// ---------------------------------------------------- push-forward CDFs

// Grid route: exact quadrature through the normalized parts of jd.
SignedPushforwards pushforward_cdfs(const Scenario& sc,
                                    const JordanDecomposition& jd);

// Importance-weighted route for any dimension: group-1 draws weighted by
// (p1 - p2)+ / p1 estimate mu+, group-2 draws weighted by (p2 - p1)+ / p2
// estimate mu-; the weighted ECDFs of f* are linearized.
SignedPushforwards pushforward_cdfs_mc(const Scenario& sc, std::size_t n,
                                       std::uint64_t seed,
                                       double epsilon = 1e-12);

// Closed-form region rule for Gaussian groups (log-density sign).
RegionClassifier analytic_classifier(const Scenario& sc, double epsilon = 1e-12);

struct BuildSettings {
  GridSettings grid;
  DecompositionOptions decomposition;
  // Draws per group for the importance-weighted route (dimension > 1).
  std::size_t mc_pushforward_n = 200000;
  std::uint64_t mc_pushforward_seed = 0;
};

// f_Q for a scenario: grid route in one dimension, importance-weighted
// route for multivariate Gaussian groups.
UnawarePredictor build_scenario_unaware(const Scenario& sc, const QChoice& q,
                                        const BuildSettings& settings = {});

// g* for a scenario: tabulated G_s on the grid in one dimension, closed-form
// Gaussian G_s for Gaussian groups with affine group regressors.
AwarePredictor build_scenario_aware(const Scenario& sc,
                                    const BuildSettings& settings = {});

// -------------------------------------------------- affine impossibility

// sup_t |Phi((t - m1) / s1) - Phi((t - m2) / s2)|; sd zero means a point mass.
double gaussian_ks_distance(double m1, double s1, double m2, double s2);

// Exact DP gap of x -> <slope_s, x> + intercept_s applied to group s.
double affine_gaussian_dp_gap(const AffineForm& f1, const AffineForm& f2,
                              const GaussianGroupParams& g1,
                              const GaussianGroupParams& g2);

struct AffineScanRow {
  std::vector<double> beta;
  double gap;
};

// For every beta, the exact KS distance between the group laws of the
// unaware affine score <beta, x> + intercept.
std::vector<AffineScanRow> affine_dp_scan(
    const GaussianGroupParams& g1, const GaussianGroupParams& g2,
    const std::vector<std::vector<double>>& betas, double intercept = 0.0);

// steps x steps grid of two-dimensional slopes on [lo, hi]^2.
std::vector<std::vector<double>> beta_grid_2d(double lo, double hi,
                                              std::size_t steps);

}  // namespace fairq
