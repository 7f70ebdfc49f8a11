#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "fairq/errors.hpp"

namespace fs = std::filesystem;

namespace fairq::app {
namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fairq_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int run_binary(const std::string& args, const fs::path& err) {
  const std::string cmd = std::string(FAIRQ_BINARY) + " " + args + " > /dev/null 2> " +
                          err.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Config, DefaultsAndStrictness) {
  const auto c = parse_run_config_text(R"({"scenario": "s1"})");
  EXPECT_EQ(std::get<std::string>(c.scenario), "s1");
  EXPECT_TRUE(std::holds_alternative<FQSpec>(c.predictor));
  EXPECT_EQ(c.method, Method::Quadrature);
  EXPECT_THROW(parse_run_config_text(R"({"scenario": "s1", "grdi": {}})"), ValidationError);
  EXPECT_THROW(parse_run_config_text(R"({"scenario": "s1", "grid": {"cells": 9}})"),
               ValidationError);
  EXPECT_THROW(parse_run_config_text(R"({"scenario": 3})"), ValidationError);
  EXPECT_THROW(parse_run_config_text("{not json"), ValidationError);
  EXPECT_THROW(
      parse_run_config_text(R"({"evaluation": {"method": "monte-carlo", "n": 10}})"),
      ValidationError);
  EXPECT_THROW(parse_run_config_text(
                   R"({"predictor": {"kind": "f_q", "q": {"kind": "random"}}})"),
               ValidationError);
  EXPECT_THROW(parse_scan_config_text(R"({"steps": 3})"), ValidationError);
}

TEST(Config, RoundTripIsIdempotent) {
  const std::vector<std::string> texts = {
      R"({"scenario": "s1"})",
      R"({"scenario": "gauss2d", "predictor": {"kind": "g_star"},
          "evaluation": {"method": "monte-carlo", "n": 5000, "seed": 7}})",
      R"({"scenario": {"name": "mine", "p1": 0.4,
            "group1": {"kind": "gaussian", "mean": [0.0], "variance": 1.0},
            "group2": {"kind": "raised_cosine", "center": 1.0, "half_width": 2.0},
            "f_star": {"kind": "affine", "beta": [2.0], "intercept": 0.5}},
          "predictor": {"kind": "f_q", "q": {"kind": "random", "seed": 5, "knots": 8}},
          "w2": {"rule": "trapezoid", "grid_points": 2049},
          "grid": {"n_cells": 1024, "range": [-6, 6]}})",
      R"({"predictor": {"kind": "f_q", "q": {"kind": "tabulated",
            "levels": [0, 0.5, 1], "values": [0, 1, 3]}}})",
      R"({"predictor": {"kind": "affine", "beta": [1.5], "intercept": -1}})"};
  for (const auto& t : texts) {
    const auto once = serialize(parse_run_config_text(t)).dump();
    const auto twice = serialize(parse_run_config_text(once)).dump();
    EXPECT_EQ(once, twice);
  }
  const auto scan = serialize(parse_scan_config_text(R"({"intercept": 2})")).dump();
  EXPECT_EQ(serialize(parse_scan_config_text(scan)).dump(), scan);
}

TEST(Commands, RunWritesReportsAndIsByteIdentical) {
  const auto dir = scratch("run");
  auto cfg = parse_run_config_text(R"({"scenario": "s1", "grid": {"n_cells": 2048}})");
  cfg.output_dir = (dir / "a").string();
  const auto a = run(cfg);
  EXPECT_LE(a.report.dp_gap, 0.01);
  const auto first = slurp(dir / "a" / "report.json");
  const auto first_pred = slurp(dir / "a" / "predictions.csv");
  EXPECT_EQ(first, a.report_json);
  run(cfg);
  EXPECT_EQ(slurp(dir / "a" / "report.json"), first);
  EXPECT_EQ(slurp(dir / "a" / "predictions.csv"), first_pred);
  const auto csv = read_csv(dir / "a" / "report.csv");
  ASSERT_EQ(csv.size(), 2u);
  EXPECT_EQ(csv[0][0], "scenario");
  const auto json = nlohmann::json::parse(first);
  EXPECT_EQ(json["predictor"], "f_q:qstar");
  EXPECT_TRUE(json["n"].is_null());
  EXPECT_EQ(json["n_cells"], 2048);
}

TEST(Commands, BayesAndPassthroughReports) {
  const auto dir = scratch("reports");
  auto bayes = parse_run_config_text(R"({"scenario": "s1", "predictor": {"kind": "bayes"}})");
  bayes.output_dir = (dir / "bayes").string();
  EXPECT_GT(run(bayes).report.dp_gap, 0.3);
  auto same = parse_run_config_text(R"({"scenario": "identical"})");
  same.output_dir = (dir / "same").string();
  const auto r = run(same).report;
  EXPECT_TRUE(r.passthrough);
  EXPECT_TRUE(r.decomposition_degenerate);
  EXPECT_LE(r.dp_gap, 1e-9);
}

TEST(Commands, FiguresHaveExactHeadersAndInvariants) {
  const auto dir = scratch("figures");
  figures("s1", dir);
  const std::vector<std::pair<std::string, std::string>> files = {
      {"fig1_densities.csv", "x,p1,p2"},
      {"fig1_jordan.csv", "x,mu_plus,mu_minus"},
      {"fig2_pushforwards.csv", "t,F_plus_density,F_minus_density"},
      {"fig3_predictors.csv", "x,f_star,f_qstar"},
      {"fig3_output_densities.csv", "y,density_group1,density_group2"}};
  for (const auto& [name, header] : files) {
    const auto rows = read_csv(dir / name);
    ASSERT_GT(rows.size(), 2u) << name;
    std::string joined;
    for (std::size_t i = 0; i < rows[0].size(); ++i) joined += (i ? "," : "") + rows[0][i];
    EXPECT_EQ(joined, header);
  }

  // Output densities coincide up to the grid.
  const auto out = read_csv(dir / "fig3_output_densities.csv");
  double peak = 0.0, gap = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double d1 = std::stod(out[i][1]), d2 = std::stod(out[i][2]);
    peak = std::max(peak, std::max(d1, d2));
    gap = std::max(gap, std::abs(d1 - d2));
  }
  EXPECT_LE(gap, 0.02 * peak);

  const auto before = slurp(dir / "fig3_predictors.csv");
  figures("s1", dir);
  EXPECT_EQ(slurp(dir / "fig3_predictors.csv"), before);
}

TEST(Commands, NeutralRowsAndIdenticalJordan) {
  const auto dir = scratch("neutral");
  figures("disjoint", dir / "disjoint");
  const auto jordan = read_csv(dir / "disjoint" / "fig1_jordan.csv");
  const auto pred = read_csv(dir / "disjoint" / "fig3_predictors.csv");
  ASSERT_EQ(jordan.size(), pred.size());
  std::size_t neutral = 0;
  for (std::size_t i = 1; i < pred.size(); ++i) {
    if (std::stod(jordan[i][1]) == 0.0 && std::stod(jordan[i][2]) == 0.0) {
      EXPECT_EQ(pred[i][1], pred[i][2]) << pred[i][0];
      ++neutral;
    }
  }
  EXPECT_GT(neutral, 10u);

  figures("identical", dir / "identical");
  const auto same = read_csv(dir / "identical" / "fig1_jordan.csv");
  for (std::size_t i = 1; i < same.size(); ++i) {
    EXPECT_EQ(std::stod(same[i][1]), 0.0);
    EXPECT_EQ(std::stod(same[i][2]), 0.0);
  }
  EXPECT_THROW(figures("gauss2d", dir / "g"), UnsupportedForFigures);
}

TEST(Commands, ScanAffineSummary) {
  const auto dir = scratch("scan");
  auto cfg = parse_scan_config_text("{}");
  cfg.output_dir = dir.string();
  const auto summary = scan_affine(cfg);
  EXPECT_EQ(summary["points"], 441);
  EXPECT_EQ(summary["gap_at_zero"], 0.0);
  EXPECT_GE(summary["min_gap_nonzero"].get<double>(), 0.08);
  EXPECT_EQ(read_csv(dir / "scan_affine.csv")[0][2], "gap");
}

TEST(Commands, ExitCodes) {
  std::ostringstream msg;
  EXPECT_EQ(exit_code_for(ValidationError("x")), 2);
  EXPECT_EQ(exit_code_for(AssumptionViolation("x")), 3);
  EXPECT_EQ(exit_code_for(NumericError("x")), 1);
  EXPECT_EQ(error_line(ValidationError("bad key")), "error=validation reason=bad key");
  EXPECT_NE(list_scenarios().find("s1"), std::string::npos);
}

TEST(Binary, ExitCodesAndStderrLine) {
  const auto dir = scratch("binary");
  const auto err = dir / "stderr.txt";
  spit(dir / "ok.json",
       R"({"scenario": "s1", "grid": {"n_cells": 1024}, "output_dir": ")" +
           (dir / "ok").string() + "\"}");
  EXPECT_EQ(run_binary("run " + (dir / "ok.json").string(), err), 0);
  EXPECT_TRUE(fs::exists(dir / "ok" / "report.json"));

  spit(dir / "bad.json", R"({"scenario": "s1", "typo": 1})");
  EXPECT_EQ(run_binary("run " + (dir / "bad.json").string(), err), 2);
  EXPECT_EQ(slurp(err).rfind("error=validation reason=", 0), 0u);
  EXPECT_EQ(run_binary("run " + (dir / "missing.json").string(), err), 2);
  EXPECT_EQ(run_binary("frobnicate", err), 2);

  // A flat Bayes regressor makes the signed push-forwards atomic.
  spit(dir / "atomic.json",
       R"({"scenario": {"name": "flat", "p1": 0.5,
            "group1": {"kind": "gaussian", "mean": [-1.0], "variance": 1.0},
            "group2": {"kind": "gaussian", "mean": [1.0], "variance": 1.0},
            "f_star": {"kind": "affine", "beta": [0.0], "intercept": 0.5}},
          "output_dir": ")" + (dir / "atomic").string() + "\"}");
  EXPECT_EQ(run_binary("run " + (dir / "atomic.json").string(), err), 3);
  EXPECT_EQ(slurp(err).rfind("error=assumption reason=", 0), 0u);

  EXPECT_EQ(run_binary("figures gauss2d " + (dir / "fig").string(), err), 2);
  EXPECT_EQ(run_binary("list-scenarios", err), 0);
}

}  // namespace
}  // namespace fairq::app
