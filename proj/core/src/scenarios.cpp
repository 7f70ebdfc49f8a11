#include "fairq/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "fairq/errors.hpp"
#include "fairq/normal.hpp"
#include "fairq/parallel.hpp"

namespace fairq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void validate_law(const FeatureLaw& law) {
  if (const auto* g = std::get_if<GaussianGroupParams>(&law)) {
    g->validate();
  } else if (const auto* r = std::get_if<RaisedCosineLaw>(&law)) {
    if (!std::isfinite(r->center) || !(r->half_width > 0.0) ||
        !std::isfinite(r->half_width)) {
      throw ValidationError("raised-cosine law needs a positive finite width");
    }
  }
}

std::pair<double, double> law_extent(const FeatureLaw& law, double span_sigma) {
  if (const auto* g = std::get_if<GaussianGroupParams>(&law)) {
    return {g->mean[0] - span_sigma, g->mean[0] + span_sigma};
  }
  if (const auto* r = std::get_if<RaisedCosineLaw>(&law)) {
    return {r->center - r->half_width, r->center + r->half_width};
  }
  const auto& d = std::get<DensityGrid1D>(law);
  return {d.grid().lo(), d.grid().hi()};
}

double raised_cosine_density(const RaisedCosineLaw& r, double x) {
  const double z = (x - r.center) / r.half_width;
  if (!(std::abs(z) < 1.0)) return 0.0;
  return (1.0 + std::cos(std::numbers::pi * z)) / (2.0 * r.half_width);
}

double law_density_1d(const FeatureLaw& law, double x) {
  if (const auto* g = std::get_if<GaussianGroupParams>(&law)) {
    return g->density(Point(&x, 1));
  }
  if (const auto* r = std::get_if<RaisedCosineLaw>(&law)) {
    return raised_cosine_density(*r, x);
  }
  const auto& d = std::get<DensityGrid1D>(law);
  return d.grid().contains(x) ? d.at(x) : 0.0;
}

// Draws from one group law; holds the precomputed inverse CDF of
// tabulated laws.
class LawSampler {
 public:
  explicit LawSampler(const FeatureLaw& law) : law_(law) {
    if (const auto* d = std::get_if<DensityGrid1D>(&law)) {
      inverse_.emplace(
          generalized_inverse(cdf_from_density(*d, [](double x) { return x; })));
    }
  }

  void draw(std::mt19937_64& rng, double* out) const {
    if (const auto* g = std::get_if<GaussianGroupParams>(&law_)) {
      std::normal_distribution<double> z(0.0, 1.0);
      const double sd = std::sqrt(g->covariance_scale);
      for (std::size_t k = 0; k < g->mean.size(); ++k) {
        out[k] = g->mean[k] + sd * z(rng);
      }
    } else if (const auto* r = std::get_if<RaisedCosineLaw>(&law_)) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (;;) {
        const double z = 2.0 * u(rng) - 1.0;
        if (2.0 * u(rng) <= 1.0 + std::cos(std::numbers::pi * z)) {
          out[0] = r->center + r->half_width * z;
          return;
        }
      }
    } else {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      out[0] = (*inverse_)(u(rng));
    }
  }

 private:
  const FeatureLaw& law_;
  std::optional<QuantileFn> inverse_;
};

std::size_t partitions_for(std::size_t n) {
  return (n + kPartitionSize - 1) / kPartitionSize;
}

std::uint64_t group_stream(int group, std::uint64_t stream) {
  return (stream << 2) | static_cast<std::uint64_t>(group);
}

double ks_at(double t, double m1, double s1, double m2, double s2) {
  return std::abs(normal::cdf((t - m1) / s1) - normal::cdf((t - m2) / s2));
}

void require_gaussian_scan(const GaussianGroupParams& g1,
                           const GaussianGroupParams& g2) {
  g1.validate();
  g2.validate();
  if (g1.dimension() != g2.dimension()) {
    throw ValidationError("group means differ in dimension");
  }
}

}  // namespace

// ------------------------------------------------------------ laws

std::size_t law_dimension(const FeatureLaw& law) {
  if (const auto* g = std::get_if<GaussianGroupParams>(&law)) {
    return g->dimension();
  }
  return 1;
}

double law_log_density(const FeatureLaw& law, Point x) {
  if (x.size() != law_dimension(law)) {
    throw DomainError("point dimension does not match group law");
  }
  if (const auto* g = std::get_if<GaussianGroupParams>(&law)) {
    return g->log_density(x);
  }
  const double p = law_density_1d(law, x[0]);
  return p > 0.0 ? std::log(p) : kNegInf;
}

void Scenario::validate() const {
  if (!(p1 > 0.0 && p1 < 1.0)) {
    throw ValidationError("scenario prior p1 must lie in (0, 1)");
  }
  validate_law(group1);
  validate_law(group2);
  const std::size_t d = law_dimension(group1);
  if (law_dimension(group2) != d) {
    throw ValidationError("group laws differ in dimension");
  }
  if (d > 1 && !gaussian_groups()) {
    throw ValidationError("multivariate scenarios need Gaussian groups");
  }
  if (f_star.dimension() != d) {
    throw ValidationError("f* dimension does not match the features");
  }
  if (group_regressors) {
    for (const auto& r : *group_regressors) {
      if (r.dimension() != d) {
        throw ValidationError("group regressor dimension does not match");
      }
    }
  }
}

const FeatureLaw& Scenario::group(int s) const {
  if (s != 1 && s != 2) throw ValidationError("group label must be 1 or 2");
  return s == 1 ? group1 : group2;
}

const BayesRegressor& Scenario::regressor(int s) const {
  if (s != 1 && s != 2) throw ValidationError("group label must be 1 or 2");
  if (group_regressors) return (*group_regressors)[s - 1];
  return f_star;
}

bool Scenario::gaussian_groups() const {
  return std::holds_alternative<GaussianGroupParams>(group1) &&
         std::holds_alternative<GaussianGroupParams>(group2);
}

// ------------------------------------------------------------ grids

GridGeometry working_range(const Scenario& sc, const GridSettings& settings) {
  if (sc.dimension() != 1) {
    throw ValidationError("grid quadrature needs one-dimensional features");
  }
  if (settings.range) {
    return GridGeometry(settings.range->first, settings.range->second,
                        settings.n_cells);
  }
  double sigma_max = 0.0;
  for (const FeatureLaw* law : {&sc.group1, &sc.group2}) {
    if (const auto* g = std::get_if<GaussianGroupParams>(law)) {
      sigma_max = std::max(sigma_max, std::sqrt(g->covariance_scale));
    }
  }
  const double span = settings.sigma_span * sigma_max;
  const auto [lo1, hi1] = law_extent(sc.group1, span);
  const auto [lo2, hi2] = law_extent(sc.group2, span);
  return GridGeometry(std::min(lo1, lo2), std::max(hi1, hi2), settings.n_cells);
}

ScenarioGrids discretize(const Scenario& sc, const GridSettings& settings) {
  sc.validate();
  const GridGeometry grid = working_range(sc, settings);
  auto tab = [&](const FeatureLaw& law) {
    if (const auto* d = std::get_if<DensityGrid1D>(&law)) {
      if (d->grid() == grid) return *d;
    }
    return DensityGrid1D::tabulate(
        grid, [&](double x) { return law_density_1d(law, x); });
  };
  return ScenarioGrids{tab(sc.group1), tab(sc.group2), sc.p1};
}

// ------------------------------------------------------------ catalog

Scenario scenario_s1() {
  Scenario sc{
      "s1",
      "arbitrary instantiation of the logistic figure setup: "
      "N(-1,1) vs N(1,2), a=3, p1=0.5",
      0.5,
      GaussianGroupParams{{-1.0}, 1.0},
      GaussianGroupParams{{1.0}, 2.0},
      BayesRegressor::logistic(3.0),
      std::nullopt};
  return sc;
}

Scenario scenario_identical() {
  return Scenario{"identical",
                  "both groups N(0,1); every predictor is fair",
                  0.5,
                  GaussianGroupParams{{0.0}, 1.0},
                  GaussianGroupParams{{0.0}, 1.0},
                  BayesRegressor::logistic(3.0),
                  std::nullopt};
}

Scenario scenario_disjoint() {
  return Scenario{"disjoint",
                  "raised-cosine groups on [-3,-1] and [1,3]",
                  0.5,
                  RaisedCosineLaw{-2.0, 1.0},
                  RaisedCosineLaw{2.0, 1.0},
                  BayesRegressor::logistic(1.0),
                  std::nullopt};
}

Scenario scenario_mirror() {
  return Scenario{"mirror",
                  "N(-1,1) vs N(1,1) with f*(x) = x",
                  0.5,
                  GaussianGroupParams{{-1.0}, 1.0},
                  GaussianGroupParams{{1.0}, 1.0},
                  BayesRegressor::affine({1.0}, 0.0),
                  std::nullopt};
}

Scenario scenario_gauss2d() {
  // <beta_s, m_s> = 0 so that b_s is the group mean of the regressor.
  std::array<BayesRegressor, 2> regs{BayesRegressor::affine({1.0, 1.0}, 0.5),
                                     BayesRegressor::affine({1.0, -2.0}, -0.5)};
  return Scenario{"gauss2d",
                  "N((1,-1), I) vs N((2,1), 2I) with affine regressors",
                  0.5,
                  GaussianGroupParams{{1.0, -1.0}, 1.0},
                  GaussianGroupParams{{2.0, 1.0}, 2.0},
                  BayesRegressor::affine({1.0, 0.5}, 0.0),
                  std::move(regs)};
}

std::vector<std::string> scenario_names() {
  return {"s1", "identical", "disjoint", "mirror", "gauss2d"};
}

Scenario scenario_by_name(const std::string& name) {
  if (name == "s1") return scenario_s1();
  if (name == "identical") return scenario_identical();
  if (name == "disjoint") return scenario_disjoint();
  if (name == "mirror") return scenario_mirror();
  if (name == "gauss2d") return scenario_gauss2d();
  const std::string prefix = "random-";
  if (name.starts_with(prefix)) {
    std::uint64_t seed = 0;
    const char* first = name.data() + prefix.size();
    const char* last = name.data() + name.size();
    const auto res = std::from_chars(first, last, seed);
    if (res.ec == std::errc() && res.ptr == last && first != last) {
      return random_scenario(seed);
    }
  }
  throw ValidationError("unknown scenario '" + name + "'");
}

Scenario random_scenario(std::uint64_t seed) {
  auto rng = rng_for_partition(seed, 0x5ce7a210, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  const double p1 = in(0.3, 0.7);
  const double m1 = in(-1.5, 1.5);
  const double shift = in(0.5, 2.0) * (u(rng) < 0.5 ? -1.0 : 1.0);
  const double v1 = in(0.5, 2.0);
  const double v2 = in(0.5, 2.0);
  const double sign = u(rng) < 0.5 ? -1.0 : 1.0;
  const bool logistic = u(rng) < 0.5;
  BayesRegressor f = logistic
                         ? BayesRegressor::logistic(sign * in(1.0, 3.0))
                         : BayesRegressor::affine({sign * in(0.5, 2.0)},
                                                  in(-1.0, 1.0));
  return Scenario{"random-" + std::to_string(seed),
                  "seeded random Gaussian scenario",
                  p1,
                  GaussianGroupParams{{m1}, v1},
                  GaussianGroupParams{{m1 + shift}, v2},
                  std::move(f),
                  std::nullopt};
}

// ------------------------------------------------------------ sampling

SampleBatch sample(const Scenario& sc, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("sample size must be at least 1");
  sc.validate();
  const std::size_t d = sc.dimension();
  SampleBatch batch;
  batch.dimension = d;
  batch.seed = seed;
  batch.n = n;
  batch.xs.resize(n * d);
  batch.ss.resize(n);
  batch.fstar_vals.resize(n);
  const LawSampler s1(sc.group1);
  const LawSampler s2(sc.group2);
  parallel_for(partitions_for(n), [&](std::size_t part) {
    auto rng = rng_for_partition(seed, 0, part);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t end = std::min(n, (part + 1) * kPartitionSize);
    for (std::size_t i = part * kPartitionSize; i < end; ++i) {
      const int s = u(rng) < sc.p1 ? 1 : 2;
      batch.ss[i] = s;
      (s == 1 ? s1 : s2).draw(rng, batch.xs.data() + i * d);
      batch.fstar_vals[i] = sc.f_star(batch.x(i));
    }
  });
  return batch;
}

std::vector<double> sample_group(const Scenario& sc, int group, std::size_t n,
                                 std::uint64_t seed, std::uint64_t stream) {
  if (n == 0) throw ValidationError("sample size must be at least 1");
  const FeatureLaw& law = sc.group(group);
  const std::size_t d = law_dimension(law);
  std::vector<double> xs(n * d);
  const LawSampler sampler(law);
  const std::uint64_t id = group_stream(group, stream);
  parallel_for(partitions_for(n), [&](std::size_t part) {
    auto rng = rng_for_partition(seed, id, part);
    const std::size_t end = std::min(n, (part + 1) * kPartitionSize);
    for (std::size_t i = part * kPartitionSize; i < end; ++i) {
      sampler.draw(rng, xs.data() + i * d);
    }
  });
  return xs;
}

// ---------------------------------------------------- push-forward CDFs

SignedPushforwards pushforward_cdfs(const Scenario& sc,
                                    const JordanDecomposition& jd) {
  if (jd.degenerate()) {
    throw DegenerateDecomposition("mu+ has no mass; F+- are undefined");
  }
  return signed_pushforwards(sc.f_star, jd);
}

SignedPushforwards pushforward_cdfs_mc(const Scenario& sc, std::size_t n,
                                       std::uint64_t seed, double epsilon) {
  sc.validate();
  const std::size_t d = sc.dimension();
  std::array<Cdf, 2> cdfs{Cdf::point_mass(0.0), Cdf::point_mass(0.0)};
  std::array<double, 2> masses{};
  for (int s = 1; s <= 2; ++s) {
    const FeatureLaw& own = sc.group(s);
    const FeatureLaw& other = sc.group(3 - s);
    const auto xs = sample_group(sc, s, n, seed, 1);
    std::vector<double> values(n);
    std::vector<double> weights(n);
    parallel_for(partitions_for(n), [&](std::size_t part) {
      const std::size_t end = std::min(n, (part + 1) * kPartitionSize);
      for (std::size_t i = part * kPartitionSize; i < end; ++i) {
        const Point x(xs.data() + i * d, d);
        const double gap = law_log_density(own, x) - law_log_density(other, x);
        weights[i] = gap > epsilon ? -std::expm1(-gap) : 0.0;
        values[i] = sc.f_star(x);
      }
    });
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) {
      throw DegenerateDecomposition("no draw falls in the signed region");
    }
    masses[s - 1] = total / static_cast<double>(n);
    cdfs[s - 1] = weighted_ecdf(values, weights, EcdfStyle::Linearized);
  }
  return SignedPushforwards{std::move(cdfs[0]), std::move(cdfs[1]),
                            0.5 * (masses[0] + masses[1])};
}

RegionClassifier analytic_classifier(const Scenario& sc, double epsilon) {
  if (sc.gaussian_groups()) {
    return RegionClassifier(GaussianLogDensityRule{
        std::get<GaussianGroupParams>(sc.group1),
        std::get<GaussianGroupParams>(sc.group2), epsilon});
  }
  const auto* r1 = std::get_if<RaisedCosineLaw>(&sc.group1);
  const auto* r2 = std::get_if<RaisedCosineLaw>(&sc.group2);
  if (r1 && r2) {
    return RegionClassifier(DisjointSupportRule{
        {{r1->center - r1->half_width, r1->center + r1->half_width}},
        {{r2->center - r2->half_width, r2->center + r2->half_width}}});
  }
  throw ValidationError("no closed-form region rule for scenario " + sc.name);
}

UnawarePredictor build_scenario_unaware(const Scenario& sc, const QChoice& q,
                                        const BuildSettings& settings) {
  sc.validate();
  if (sc.dimension() == 1) {
    const auto grids = discretize(sc, settings.grid);
    const auto jd =
        jordan_decompose(grids.group1, grids.group2, settings.decomposition);
    return build_unaware(sc.f_star, jd, q);
  }
  const auto& g1 = std::get<GaussianGroupParams>(sc.group1);
  const auto& g2 = std::get<GaussianGroupParams>(sc.group2);
  if (g1.mean == g2.mean && g1.covariance_scale == g2.covariance_scale) {
    return UnawarePredictor::passthrough(sc.f_star);
  }
  const auto pushes = pushforward_cdfs_mc(sc, settings.mc_pushforward_n,
                                          settings.mc_pushforward_seed);
  return build_unaware(sc.f_star, analytic_classifier(sc), pushes, q);
}

AwarePredictor build_scenario_aware(const Scenario& sc,
                                    const BuildSettings& settings) {
  sc.validate();
  std::array<BayesRegressor, 2> regs{sc.regressor(1), sc.regressor(2)};
  if (sc.dimension() == 1) {
    const auto grids = discretize(sc, settings.grid);
    auto law = [&](int s) {
      const auto& r = regs[s - 1];
      return ScalarLaw::tabulated(
          cdf_from_density(grids.group(s), [&](double x) { return r(x); }));
    };
    return build_aware(regs, law(1), law(2), sc.p1);
  }
  auto law = [&](int s) {
    const auto* a = std::get_if<BayesRegressor::Affine>(&regs[s - 1].form());
    if (!a) {
      throw ValidationError(
          "multivariate aware predictor needs affine group regressors");
    }
    const auto& g = std::get<GaussianGroupParams>(sc.group(s));
    return ScalarLaw::gaussian(dot(a->beta, g.mean) + a->intercept,
                               std::sqrt(g.covariance_scale) * norm2(a->beta));
  };
  return build_aware(regs, law(1), law(2), sc.p1);
}

// -------------------------------------------------- affine impossibility

double gaussian_ks_distance(double m1, double s1, double m2, double s2) {
  if (!(s1 >= 0.0) || !(s2 >= 0.0)) {
    throw ValidationError("standard deviations must be non-negative");
  }
  if (s1 == 0.0 && s2 == 0.0) return m1 == m2 ? 0.0 : 1.0;
  if (s1 == 0.0 || s2 == 0.0) {
    const double at = s1 == 0.0 ? m1 : m2;
    const double mean = s1 == 0.0 ? m2 : m1;
    const double sd = s1 == 0.0 ? s2 : s1;
    const double f = normal::cdf((at - mean) / sd);
    return std::max(f, 1.0 - f);
  }
  // |D| peaks where the two densities cross:
  // A t^2 + B t + C = 0 from equating log-densities.
  const double a = 0.5 / (s1 * s1) - 0.5 / (s2 * s2);
  const double b = -(m1 / (s1 * s1) - m2 / (s2 * s2));
  const double c = 0.5 * m1 * m1 / (s1 * s1) - 0.5 * m2 * m2 / (s2 * s2) +
                   std::log(s1 / s2);
  std::vector<double> roots;
  if (a == 0.0) {
    if (b == 0.0) return 0.0;
    roots.push_back(-c / b);
  } else {
    const double disc = std::max(b * b - 4.0 * a * c, 0.0);
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) {
      roots.push_back(q / a);
      roots.push_back(c / q);
    } else {
      roots.push_back(0.0);
    }
  }
  double sup = 0.0;
  for (double t : roots) sup = std::max(sup, ks_at(t, m1, s1, m2, s2));
  return sup;
}

double affine_gaussian_dp_gap(const AffineForm& f1, const AffineForm& f2,
                              const GaussianGroupParams& g1,
                              const GaussianGroupParams& g2) {
  require_gaussian_scan(g1, g2);
  if (f1.slope.size() != g1.dimension() || f2.slope.size() != g2.dimension()) {
    throw ValidationError("slope dimension does not match the features");
  }
  return gaussian_ks_distance(
      dot(f1.slope, g1.mean) + f1.intercept,
      std::sqrt(g1.covariance_scale) * norm2(f1.slope),
      dot(f2.slope, g2.mean) + f2.intercept,
      std::sqrt(g2.covariance_scale) * norm2(f2.slope));
}

std::vector<AffineScanRow> affine_dp_scan(
    const GaussianGroupParams& g1, const GaussianGroupParams& g2,
    const std::vector<std::vector<double>>& betas, double intercept) {
  require_gaussian_scan(g1, g2);
  if (!std::isfinite(intercept)) throw ValidationError("intercept must be finite");
  std::vector<AffineScanRow> rows;
  rows.reserve(betas.size());
  for (const auto& beta : betas) {
    // A common intercept shifts both output laws alike and KS is
    // translation invariant, so it is dropped before any rounding happens.
    const AffineForm f{beta, 0.0};
    rows.push_back({beta, affine_gaussian_dp_gap(f, f, g1, g2)});
  }
  return rows;
}

std::vector<std::vector<double>> beta_grid_2d(double lo, double hi,
                                              std::size_t steps) {
  if (steps < 2 || !(hi > lo)) {
    throw ValidationError("beta grid needs hi > lo and at least 2 steps");
  }
  std::vector<double> axis(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    // Symmetric construction keeps the midpoint of an odd grid exactly zero.
    const double f = static_cast<double>(i) / static_cast<double>(steps - 1);
    axis[i] = lo * (1.0 - f) + hi * f;
  }
  std::vector<std::vector<double>> out;
  out.reserve(steps * steps);
  for (double a : axis) {
    for (double b : axis) out.push_back({a, b});
  }
  return out;
}

}  // namespace fairq
