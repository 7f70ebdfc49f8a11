#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "fairq/errors.hpp"

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fairq::ValidationError("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"fair regression without disparate treatment"};
  cli.require_subcommand(1);

  std::string run_config;
  auto* run = cli.add_subcommand("run", "build a predictor and write a fairness report");
  run->add_option("config", run_config, "JSON run config")->required();

  std::string fig_scenario;
  std::string fig_outdir;
  auto* figures = cli.add_subcommand("figures", "write plot-ready figure CSVs");
  figures->add_option("scenario", fig_scenario, "catalog scenario name")->required();
  figures->add_option("outdir", fig_outdir, "output directory")->required();

  std::string scan_config;
  auto* scan = cli.add_subcommand("scan-affine", "exact DP gaps of affine scores");
  scan->add_option("config", scan_config, "JSON scan config")->required();

  auto* list = cli.add_subcommand("list-scenarios", "print the scenario catalog");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const auto cfg = fairq::app::parse_run_config_text(read_text(run_config));
      const auto base = std::filesystem::path(run_config).parent_path();
      std::cout << fairq::app::run(cfg, base).report_json;
    } else if (*figures) {
      fairq::app::figures(fig_scenario, fig_outdir);
    } else if (*scan) {
      const auto cfg = fairq::app::parse_scan_config_text(read_text(scan_config));
      std::cout << fairq::app::scan_affine(cfg).dump(2) << "\n";
    } else if (*list) {
      std::cout << fairq::app::list_scenarios();
    }
  } catch (const std::exception& e) {
    std::cerr << fairq::app::error_line(e) << "\n";
    return fairq::app::exit_code_for(e);
  }
  return 0;
}
