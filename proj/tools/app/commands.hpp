#pragma once

#include <exception>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "fairq/metrics.hpp"
#include "fairq/predictors.hpp"

namespace fairq::app {

AnyPredictor build_predictor(const PredictorSpec& spec, const Scenario& sc,
                             const RunConfig& cfg);
std::string predictor_label(const PredictorSpec& spec);

// Report schema, in key order:
//   scenario, note, predictor, method, n, seed, n_cells, dp_gap,
//   signed_dp_gap, risk_group1, risk_group2, egwr_gap, total_risk,
//   risk_identity_residual, barycenter_residual, decomposition_degenerate,
//   passthrough
// n and seed are null for quadrature, n_cells is null for Monte Carlo, and
// signed_dp_gap / barycenter_residual are null for aware predictors.
nlohmann::ordered_json report_to_json(const FairnessReport& r);
// Header line plus one row with the same columns as the JSON report.
std::string report_to_csv(const FairnessReport& r);

struct RunResult {
  FairnessReport report;
  std::string report_json;
};

// Writes report.json, report.csv and predictions.csv into cfg.output_dir.
// base_dir resolves relative density paths in an inline scenario.
RunResult run(const RunConfig& cfg, const std::filesystem::path& base_dir = {});

// Writes the five figure CSVs for a one-dimensional catalog scenario.
void figures(const std::string& scenario_name,
             const std::filesystem::path& outdir);

// Writes scan_affine.csv (beta_1, beta_2, ..., gap) and returns a summary.
nlohmann::ordered_json scan_affine(const ScanConfig& cfg);

std::string list_scenarios();

// 2 for invalid input, 3 for a violated modelling assumption, 1 otherwise.
int exit_code_for(const std::exception& e);
// One line: error=<category> reason=<message>.
std::string error_line(const std::exception& e);

}  // namespace fairq::app
