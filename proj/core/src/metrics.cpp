#include "fairq/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fairq/errors.hpp"
#include "fairq/parallel.hpp"

namespace fairq {

namespace {

std::vector<double> node_images(const AnyPredictor& pred,
                                const GridGeometry& grid, int group) {
  std::vector<double> images(grid.n_nodes());
  for (std::size_t i = 0; i < images.size(); ++i) {
    images[i] = evaluate(pred, grid.node(i), group);
    if (!std::isfinite(images[i])) {
      throw NumericError("predictor is not finite on the working range");
    }
  }
  return images;
}

double group_risk(const AnyPredictor& pred, const BayesRegressor& f_star,
                  const DensityGrid1D& density, int group) {
  const auto& grid = density.grid();
  std::vector<double> integrand(grid.n_nodes());
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    const double x = grid.node(i);
    const double d = f_star(x) - evaluate(pred, x, group);
    integrand[i] = density.values()[i] * d * d;
  }
  return trapezoid(grid, integrand);
}

void require_unaware(const AnyPredictor& pred) {
  if (!is_unaware(pred)) {
    throw ValidationError("signed-measure metrics need an unaware predictor");
  }
}

// Normalized mu+ and mu- with their cell masses.
std::pair<std::vector<double>, std::vector<double>> normalized_cell_masses(
    const JordanDecomposition& jd) {
  auto [plus, mass] = normalize(jd.mu_plus, jd.epsilon_mass);
  auto [minus, mass_minus] = normalize(jd.mu_minus, jd.epsilon_mass);
  (void)mass;
  (void)mass_minus;
  return {cell_masses(plus.grid(), plus.values()),
          cell_masses(minus.grid(), minus.values())};
}

std::size_t partitions_for(std::size_t n) {
  return (n + kPartitionSize - 1) / kPartitionSize;
}

// Weights (1 - p_other / p_own)+ that turn group-s draws into draws of
// P mu+ (s = 1) or P mu- (s = 2).
std::vector<double> signed_weights(const std::vector<double>& log_ratio,
                                   double epsilon) {
  std::vector<double> w(log_ratio.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = log_ratio[i] > epsilon ? -std::expm1(-log_ratio[i]) : 0.0;
  }
  return w;
}

bool all_zero(const std::vector<double>& w) {
  return std::none_of(w.begin(), w.end(), [](double v) { return v > 0.0; });
}

}  // namespace

double GroupRisks::egwr_gap() const { return std::abs(r1 - r2); }

double GroupRisks::relative_gap() const {
  const double m = std::max(r1, r2);
  return m > 0.0 ? egwr_gap() / m : 0.0;
}

double BarycenterDistances::residual() const { return std::abs(plus - minus); }

// ----------------------------------------------------------- quadrature

Cdf output_cdf(const AnyPredictor& pred, const DensityGrid1D& density,
               int group) {
  const auto images = node_images(pred, density.grid(), group);
  return pushforward_cells(images,
                           cell_masses(density.grid(), density.values()));
}

double dp_gap(const AnyPredictor& pred, const ScenarioGrids& grids) {
  return ks_distance(output_cdf(pred, grids.group1, 1),
                     output_cdf(pred, grids.group2, 2));
}

FlaggedValue signed_dp_gap(const AnyPredictor& pred,
                           const JordanDecomposition& jd) {
  require_unaware(pred);
  if (jd.degenerate()) return {0.0, true};
  const auto [plus, minus] = normalized_cell_masses(jd);
  const auto images = node_images(pred, jd.mu_plus.grid(), 1);
  return {ks_distance(pushforward_cells(images, plus),
                      pushforward_cells(images, minus)),
          false};
}

GroupRisks groupwise_risks(const AnyPredictor& pred,
                           const BayesRegressor& f_star,
                           const ScenarioGrids& grids) {
  return {group_risk(pred, f_star, grids.group1, 1),
          group_risk(pred, f_star, grids.group2, 2)};
}

TotalRisk total_risk_and_identity(const AnyPredictor& pred,
                                  const BayesRegressor& f_star,
                                  const ScenarioGrids& grids) {
  const auto r = groupwise_risks(pred, f_star, grids);
  const double total = grids.p1 * r.r1 + (1.0 - grids.p1) * r.r2;
  return {total, std::abs(total - r.r2)};
}

BarycenterDistances barycenter_distances(const AnyPredictor& pred,
                                         const JordanDecomposition& jd,
                                         const BayesRegressor& f_star,
                                         const W2Options& w2) {
  require_unaware(pred);
  const auto [plus, minus] = normalized_cell_masses(jd);
  const auto& grid = jd.mu_plus.grid();
  const auto f_images = node_images(pred, grid, 1);
  const auto star_images = node_images(AnyPredictor(f_star), grid, 1);
  return {wasserstein2_sq(pushforward_cells(star_images, plus),
                          pushforward_cells(f_images, plus), w2),
          wasserstein2_sq(pushforward_cells(star_images, minus),
                          pushforward_cells(f_images, minus), w2)};
}

FlaggedValue barycenter_symmetry_residual(const AnyPredictor& pred,
                                          const JordanDecomposition& jd,
                                          const BayesRegressor& f_star,
                                          const W2Options& w2) {
  require_unaware(pred);
  if (jd.degenerate()) return {0.0, true};
  return {barycenter_distances(pred, jd, f_star, w2).residual(), false};
}

// ---------------------------------------------------------- Monte Carlo

GroupDraws draw_groups(const Scenario& sc, const MonteCarloSpec& spec) {
  sc.validate();
  if (spec.n == 0) throw ValidationError("Monte Carlo needs n >= 1");
  GroupDraws out;
  out.n = spec.n;
  out.dimension = sc.dimension();
  const std::size_t d = out.dimension;
  for (int s = 1; s <= 2; ++s) {
    auto& xs = out.xs[s - 1];
    xs = sample_group(sc, s, spec.n, spec.seed, 2);
    auto& lr = out.log_ratio[s - 1];
    auto& fv = out.fstar_vals[s - 1];
    lr.resize(spec.n);
    fv.resize(spec.n);
    const FeatureLaw& own = sc.group(s);
    const FeatureLaw& other = sc.group(3 - s);
    parallel_for(partitions_for(spec.n), [&](std::size_t part) {
      const std::size_t end = std::min(spec.n, (part + 1) * kPartitionSize);
      for (std::size_t i = part * kPartitionSize; i < end; ++i) {
        const Point x(xs.data() + i * d, d);
        lr[i] = law_log_density(own, x) - law_log_density(other, x);
        fv[i] = sc.f_star(x);
      }
    });
  }
  return out;
}

std::array<std::vector<double>, 2> predict_draws(const AnyPredictor& pred,
                                                 const GroupDraws& draws) {
  std::array<std::vector<double>, 2> out;
  for (int s = 1; s <= 2; ++s) {
    auto& v = out[s - 1];
    v.resize(draws.n);
    parallel_for(partitions_for(draws.n), [&](std::size_t part) {
      const std::size_t end = std::min(draws.n, (part + 1) * kPartitionSize);
      for (std::size_t i = part * kPartitionSize; i < end; ++i) {
        v[i] = evaluate(pred, draws.x(s, i), s);
      }
    });
  }
  return out;
}

double dp_gap_mc(const std::array<std::vector<double>, 2>& predictions) {
  return ks_distance(empirical_cdf(predictions[0]),
                     empirical_cdf(predictions[1]));
}

FlaggedValue signed_dp_gap_mc(
    const GroupDraws& draws,
    const std::array<std::vector<double>, 2>& predictions, double epsilon) {
  const auto w1 = signed_weights(draws.log_ratio[0], epsilon);
  const auto w2 = signed_weights(draws.log_ratio[1], epsilon);
  if (all_zero(w1) || all_zero(w2)) return {0.0, true};
  return {ks_distance(weighted_ecdf(predictions[0], w1),
                      weighted_ecdf(predictions[1], w2)),
          false};
}

GroupRisks groupwise_risks_mc(
    const GroupDraws& draws,
    const std::array<std::vector<double>, 2>& predictions) {
  std::array<double, 2> r{};
  for (int s = 0; s < 2; ++s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < draws.n; ++i) {
      const double d = draws.fstar_vals[s][i] - predictions[s][i];
      acc += d * d;
    }
    r[s] = acc / static_cast<double>(draws.n);
  }
  return {r[0], r[1]};
}

TotalRisk total_risk_mc(const GroupDraws& draws,
                        const std::array<std::vector<double>, 2>& predictions,
                        double p1) {
  const auto r = groupwise_risks_mc(draws, predictions);
  const double total = p1 * r.r1 + (1.0 - p1) * r.r2;
  return {total, std::abs(total - r.r2)};
}

FlaggedValue barycenter_symmetry_residual_mc(
    const GroupDraws& draws,
    const std::array<std::vector<double>, 2>& predictions,
    const W2Options& w2, double epsilon) {
  std::array<double, 2> dist{};
  for (int s = 0; s < 2; ++s) {
    const auto w = signed_weights(draws.log_ratio[s], epsilon);
    if (all_zero(w)) return {0.0, true};
    dist[s] = wasserstein2_sq(weighted_ecdf(draws.fstar_vals[s], w),
                              weighted_ecdf(predictions[s], w), w2);
  }
  return {std::abs(dist[0] - dist[1]), false};
}

// --------------------------------------------------------------- report

std::string_view to_string(Method m) {
  return m == Method::Quadrature ? "quadrature" : "monte-carlo";
}

FairnessReport evaluate_report(const AnyPredictor& pred, const Scenario& sc,
                               std::string predictor_label,
                               const EvaluationSettings& settings) {
  sc.validate();
  FairnessReport rep;
  rep.scenario = sc.name;
  rep.predictor = std::move(predictor_label);
  rep.note = sc.note;
  rep.method = settings.method;
  if (const auto* u = std::get_if<UnawarePredictor>(&pred)) {
    rep.passthrough = u->is_passthrough();
  }
  const bool unaware = is_unaware(pred);

  GroupRisks risks;
  TotalRisk total;
  if (settings.method == Method::Quadrature) {
    if (sc.dimension() != 1) {
      throw ValidationError(
          "quadrature needs one-dimensional features; use monte-carlo");
    }
    const auto grids = discretize(sc, settings.grid);
    const auto jd =
        jordan_decompose(grids.group1, grids.group2, settings.decomposition);
    rep.n_cells = grids.group1.grid().n_cells();
    rep.decomposition_degenerate = jd.degenerate();
    rep.dp_gap = dp_gap(pred, grids);
    if (unaware) {
      rep.signed_dp_gap = signed_dp_gap(pred, jd).value;
      rep.barycenter_residual =
          barycenter_symmetry_residual(pred, jd, sc.f_star, settings.w2).value;
    }
    risks = groupwise_risks(pred, sc.f_star, grids);
    total = total_risk_and_identity(pred, sc.f_star, grids);
  } else {
    rep.n = settings.mc.n;
    rep.seed = settings.mc.seed;
    const auto draws = draw_groups(sc, settings.mc);
    const auto preds = predict_draws(pred, draws);
    rep.dp_gap = dp_gap_mc(preds);
    if (unaware) {
      const auto sdp = signed_dp_gap_mc(draws, preds);
      rep.signed_dp_gap = sdp.value;
      rep.decomposition_degenerate = sdp.degenerate;
      rep.barycenter_residual =
          barycenter_symmetry_residual_mc(draws, preds, settings.w2).value;
    } else {
      rep.decomposition_degenerate =
          all_zero(signed_weights(draws.log_ratio[0], 1e-12));
    }
    risks = groupwise_risks_mc(draws, preds);
    total = total_risk_mc(draws, preds, sc.p1);
  }
  rep.risk_group1 = risks.r1;
  rep.risk_group2 = risks.r2;
  rep.egwr_gap = risks.egwr_gap();
  rep.total_risk = total.total;
  rep.risk_identity_residual = total.residual;
  return rep;
}

}  // namespace fairq
