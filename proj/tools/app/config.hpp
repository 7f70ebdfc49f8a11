#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fairq/metrics.hpp"
#include "fairq/scenarios.hpp"

namespace fairq::app {

// ------------------------------------------------------------ scenario

struct GaussianSpec {
  std::vector<double> mean;
  double variance = 1.0;
};
struct RaisedCosineSpec {
  double center = 0.0;
  double half_width = 1.0;
};
// Density CSV with columns (x, value), relative to the config file.
struct DensityFileSpec {
  std::string path;
};
using LawSpec = std::variant<GaussianSpec, RaisedCosineSpec, DensityFileSpec>;

struct LogisticSpec {
  double a = 1.0;
};
struct AffineSpec {
  std::vector<double> beta;
  double intercept = 0.0;
};
using RegressorSpec = std::variant<LogisticSpec, AffineSpec>;

struct InlineScenario {
  std::string name = "inline";
  std::string note;
  double p1 = 0.5;
  LawSpec group1;
  LawSpec group2;
  RegressorSpec f_star;
  std::optional<std::array<RegressorSpec, 2>> group_regressors;
};

// A catalog name (see list-scenarios) or an inline definition.
using ScenarioSpec = std::variant<std::string, InlineScenario>;

// ----------------------------------------------------------- predictor

struct QStarSpec {};
struct RandomQSpec {
  std::uint64_t seed = 0;
  std::size_t knots = 16;
  double lo = 0.0;
  double hi = 1.0;
};
struct TabulatedQSpec {
  std::vector<double> levels;
  std::vector<double> values;
};
using QSpec = std::variant<QStarSpec, RandomQSpec, TabulatedQSpec>;

struct BayesSpec {};
struct FQSpec {
  QSpec q;
};
struct GStarSpec {};
struct AffinePredictorSpec {
  std::vector<double> beta;
  double intercept = 0.0;
};
using PredictorSpec = std::variant<BayesSpec, FQSpec, GStarSpec, AffinePredictorSpec>;

// ---------------------------------------------------------- run config

struct PredictionOutput {
  // Multivariate scenarios write predictions for a joint sample of this size.
  std::size_t n = 1000;
  std::uint64_t seed = 0;
};

struct RunConfig {
  ScenarioSpec scenario = std::string("s1");
  PredictorSpec predictor = FQSpec{QStarSpec{}};
  Method method = Method::Quadrature;
  MonteCarloSpec monte_carlo;
  GridSettings grid;
  DecompositionOptions decomposition;
  W2Options w2;
  std::size_t mc_pushforward_n = 200000;
  std::uint64_t mc_pushforward_seed = 0;
  PredictionOutput predictions;
  std::string output_dir = "out";
};

// Strict: unknown keys, wrong types and missing required keys throw
// ValidationError.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig parse_run_config_text(const std::string& text);
nlohmann::ordered_json serialize(const RunConfig& c);

// ------------------------------------------------------ scan-affine config

struct ScanConfig {
  GaussianSpec group1{{1.0, -1.0}, 1.0};
  GaussianSpec group2{{2.0, 1.0}, 2.0};
  double lo = -1.0;
  double hi = 1.0;
  std::size_t steps = 21;
  double intercept = 0.0;
  std::string output_dir = "out";
};

ScanConfig parse_scan_config(const nlohmann::json& j);
ScanConfig parse_scan_config_text(const std::string& text);
nlohmann::ordered_json serialize(const ScanConfig& c);

// --------------------------------------------------------------- resolve

// Builds the scenario; relative density paths resolve against base_dir.
Scenario resolve_scenario(const ScenarioSpec& spec,
                          const std::filesystem::path& base_dir = {});
BayesRegressor resolve_regressor(const RegressorSpec& spec);
GaussianGroupParams resolve_gaussian(const GaussianSpec& spec);

}  // namespace fairq::app
