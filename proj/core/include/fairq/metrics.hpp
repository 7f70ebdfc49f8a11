#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairq/measures.hpp"
#include "fairq/predictors.hpp"
#include "fairq/scenarios.hpp"
#include "fairq/transport.hpp"

namespace fairq {

// A metric that is vacuous (reported as 0) when mu+ has no mass.
struct FlaggedValue {
  double value = 0.0;
  bool degenerate = false;
};

struct GroupRisks {
  double r1 = 0.0;
  double r2 = 0.0;

  double egwr_gap() const;
  // |r1 - r2| / max(r1, r2), 0 when both vanish.
  double relative_gap() const;
};

struct TotalRisk {
  double total = 0.0;     // p1 r1 + p2 r2
  double residual = 0.0;  // |total - int (f* - f)^2 d mu_{X|2}|
};

// W2^2(f* # P mu+, f # P mu+) and W2^2(f* # P mu-, f # P mu-).
struct BarycenterDistances {
  double plus = 0.0;
  double minus = 0.0;
  double residual() const;
};

// ----------------------------------------------------------- quadrature

// Law of f(X) | S = s with f evaluated at the grid nodes of the group density.
Cdf output_cdf(const AnyPredictor& pred, const DensityGrid1D& density, int group);

// KS distance between f # mu_{X|1} and f # mu_{X|2}.
double dp_gap(const AnyPredictor& pred, const ScenarioGrids& grids);

// KS distance between f # P mu+ and f # P mu-. Unaware predictors only.
FlaggedValue signed_dp_gap(const AnyPredictor& pred,
                           const JordanDecomposition& jd);

// r_s = E[(f*(X) - f(X, s))^2 | S = s].
GroupRisks groupwise_risks(const AnyPredictor& pred,
                           const BayesRegressor& f_star,
                           const ScenarioGrids& grids);

TotalRisk total_risk_and_identity(const AnyPredictor& pred,
                                  const BayesRegressor& f_star,
                                  const ScenarioGrids& grids);

// Distances on the normalized parts. For the unnormalized mu+- multiply
// both by their common mass.
BarycenterDistances barycenter_distances(const AnyPredictor& pred,
                                         const JordanDecomposition& jd,
                                         const BayesRegressor& f_star,
                                         const W2Options& w2 = {});

FlaggedValue barycenter_symmetry_residual(const AnyPredictor& pred,
                                          const JordanDecomposition& jd,
                                          const BayesRegressor& f_star,
                                          const W2Options& w2 = {});

// ---------------------------------------------------------- Monte Carlo

struct MonteCarloSpec {
  std::size_t n = 100000;  // draws per group
  std::uint64_t seed = 0;
};

// Group-conditional draws, n per group, with log p_own - log p_other.
struct GroupDraws {
  std::size_t n = 0;
  std::size_t dimension = 1;
  std::array<std::vector<double>, 2> xs;
  std::array<std::vector<double>, 2> log_ratio;
  std::array<std::vector<double>, 2> fstar_vals;

  Point x(int group, std::size_t i) const {
    return Point(xs[group - 1].data() + i * dimension, dimension);
  }
};

GroupDraws draw_groups(const Scenario& sc, const MonteCarloSpec& spec);

// f(x, s) for every draw of group s.
std::array<std::vector<double>, 2> predict_draws(const AnyPredictor& pred,
                                                 const GroupDraws& draws);

double dp_gap_mc(const std::array<std::vector<double>, 2>& predictions);

FlaggedValue signed_dp_gap_mc(const GroupDraws& draws,
                              const std::array<std::vector<double>, 2>& predictions,
                              double epsilon = 1e-12);

GroupRisks groupwise_risks_mc(const GroupDraws& draws,
                              const std::array<std::vector<double>, 2>& predictions);

TotalRisk total_risk_mc(const GroupDraws& draws,
                        const std::array<std::vector<double>, 2>& predictions,
                        double p1);

FlaggedValue barycenter_symmetry_residual_mc(
    const GroupDraws& draws,
    const std::array<std::vector<double>, 2>& predictions,
    const W2Options& w2 = {}, double epsilon = 1e-12);

// --------------------------------------------------------------- report

enum class Method { Quadrature, MonteCarlo };

std::string_view to_string(Method m);

struct EvaluationSettings {
  Method method = Method::Quadrature;
  MonteCarloSpec mc;
  GridSettings grid;
  DecompositionOptions decomposition;
  W2Options w2;
};

struct FairnessReport {
  std::string scenario;
  std::string predictor;
  double dp_gap = 0.0;
  // Absent for aware predictors, whose output depends on the group label.
  std::optional<double> signed_dp_gap;
  double risk_group1 = 0.0;
  double risk_group2 = 0.0;
  double egwr_gap = 0.0;
  double total_risk = 0.0;
  double risk_identity_residual = 0.0;
  std::optional<double> barycenter_residual;
  bool decomposition_degenerate = false;
  bool passthrough = false;
  Method method = Method::Quadrature;
  std::size_t n = 0;          // draws per group (Monte Carlo)
  std::uint64_t seed = 0;     // Monte Carlo seed
  std::size_t n_cells = 0;    // grid cells (quadrature)
  std::string note;
};

FairnessReport evaluate_report(const AnyPredictor& pred, const Scenario& sc,
                               std::string predictor_label,
                               const EvaluationSettings& settings = {});

}  // namespace fairq
