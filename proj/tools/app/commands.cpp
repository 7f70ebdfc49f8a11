#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "fairq/csv.hpp"
#include "fairq/errors.hpp"
#include "fairq/scenarios.hpp"
#include "fairq/transport.hpp"

namespace fairq::app {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::size_t kFigureBins = 1024;

BuildSettings build_settings(const RunConfig& cfg) {
  BuildSettings b;
  b.grid = cfg.grid;
  b.decomposition = cfg.decomposition;
  b.mc_pushforward_n = cfg.mc_pushforward_n;
  b.mc_pushforward_seed = cfg.mc_pushforward_seed;
  return b;
}

ojson optional_number(const std::optional<double>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

// Bin-averaged densities of several CDFs on a shared uniform grid.
std::vector<std::vector<double>> densities_on_grid(
    const std::vector<const Cdf*>& cdfs, std::vector<double>& ts) {
  double lo = cdfs.front()->lower();
  double hi = cdfs.front()->upper();
  for (const Cdf* f : cdfs) {
    lo = std::min(lo, f->lower());
    hi = std::max(hi, f->upper());
  }
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double step = (hi - lo) / static_cast<double>(kFigureBins);
  ts.resize(kFigureBins + 1);
  for (std::size_t j = 0; j <= kFigureBins; ++j) {
    ts[j] = lo + step * static_cast<double>(j);
  }
  std::vector<std::vector<double>> out;
  for (const Cdf* f : cdfs) {
    std::vector<double> d(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) {
      d[j] = ((*f)(ts[j] + 0.5 * step) - (*f)(ts[j] - 0.5 * step)) / step;
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::string predictions_csv(const AnyPredictor& pred, const Scenario& sc,
                            const RunConfig& cfg) {
  std::vector<std::string> header;
  std::vector<std::vector<double>> cols;
  if (sc.dimension() == 1) {
    const auto grid = working_range(sc, cfg.grid);
    header = {"x", "s", "f_star", "prediction"};
    cols.assign(4, {});
    for (int s = 1; s <= 2; ++s) {
      for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
        const double x = grid.node(i);
        cols[0].push_back(x);
        cols[1].push_back(s);
        cols[2].push_back(sc.f_star(x));
        cols[3].push_back(evaluate(pred, x, s));
      }
    }
  } else {
    const auto batch = sample(sc, cfg.predictions.n, cfg.predictions.seed);
    const std::size_t d = batch.dimension;
    for (std::size_t k = 0; k < d; ++k) header.push_back("x" + std::to_string(k + 1));
    header.insert(header.end(), {"s", "f_star", "prediction"});
    cols.assign(d + 3, {});
    for (std::size_t i = 0; i < batch.n; ++i) {
      const auto x = batch.x(i);
      for (std::size_t k = 0; k < d; ++k) cols[k].push_back(x[k]);
      cols[d].push_back(batch.ss[i]);
      cols[d + 1].push_back(batch.fstar_vals[i]);
      cols[d + 2].push_back(evaluate(pred, x, batch.ss[i]));
    }
  }
  std::vector<std::span<const double>> spans(cols.begin(), cols.end());
  return render_csv(header, spans);
}

std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& cols) {
  std::vector<std::span<const double>> spans(cols.begin(), cols.end());
  return render_csv(header, spans);
}

}  // namespace

AnyPredictor build_predictor(const PredictorSpec& spec, const Scenario& sc,
                             const RunConfig& cfg) {
  const BuildSettings settings = build_settings(cfg);
  if (std::holds_alternative<BayesSpec>(spec)) return sc.f_star;
  if (const auto* a = std::get_if<AffinePredictorSpec>(&spec)) {
    return BayesRegressor::affine(a->beta, a->intercept);
  }
  if (std::holds_alternative<GStarSpec>(spec)) {
    return build_scenario_aware(sc, settings);
  }
  const auto& q = std::get<FQSpec>(spec).q;
  QChoice choice = QStar{};
  if (const auto* r = std::get_if<RandomQSpec>(&q)) {
    choice = random_quantile(r->seed, r->knots, r->lo, r->hi);
  } else if (const auto* t = std::get_if<TabulatedQSpec>(&q)) {
    choice = QuantileFn(t->levels, t->values);
  }
  return build_scenario_unaware(sc, choice, settings);
}

std::string predictor_label(const PredictorSpec& spec) {
  if (std::holds_alternative<BayesSpec>(spec)) return "bayes";
  if (std::holds_alternative<AffinePredictorSpec>(spec)) return "affine";
  if (std::holds_alternative<GStarSpec>(spec)) return "g_star";
  const auto& q = std::get<FQSpec>(spec).q;
  if (std::holds_alternative<QStarSpec>(q)) return "f_q:qstar";
  if (const auto* r = std::get_if<RandomQSpec>(&q)) {
    return "f_q:random:" + std::to_string(r->seed);
  }
  return "f_q:tabulated";
}

ojson report_to_json(const FairnessReport& r) {
  ojson j;
  const bool mc = r.method == Method::MonteCarlo;
  j["scenario"] = r.scenario;
  j["note"] = r.note;
  j["predictor"] = r.predictor;
  j["method"] = std::string(to_string(r.method));
  j["n"] = mc ? ojson(r.n) : ojson(nullptr);
  j["seed"] = mc ? ojson(r.seed) : ojson(nullptr);
  j["n_cells"] = mc ? ojson(nullptr) : ojson(r.n_cells);
  j["dp_gap"] = r.dp_gap;
  j["signed_dp_gap"] = optional_number(r.signed_dp_gap);
  j["risk_group1"] = r.risk_group1;
  j["risk_group2"] = r.risk_group2;
  j["egwr_gap"] = r.egwr_gap;
  j["total_risk"] = r.total_risk;
  j["risk_identity_residual"] = r.risk_identity_residual;
  j["barycenter_residual"] = optional_number(r.barycenter_residual);
  j["decomposition_degenerate"] = r.decomposition_degenerate;
  j["passthrough"] = r.passthrough;
  return j;
}

std::string report_to_csv(const FairnessReport& r) {
  const ojson j = report_to_json(r);
  std::string header;
  std::string row;
  for (const auto& [key, value] : j.items()) {
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += key;
    if (value.is_null()) {
      continue;
    } else if (value.is_number_float()) {
      row += format_double(value.get<double>());
    } else if (value.is_string()) {
      std::string s = value.get<std::string>();
      std::replace(s.begin(), s.end(), '"', '\'');
      row += '"' + s + '"';
    } else {
      row += value.dump();
    }
  }
  return header + '\n' + row + '\n';
}

RunResult run(const RunConfig& cfg, const std::filesystem::path& base_dir) {
  const Scenario sc = resolve_scenario(cfg.scenario, base_dir);
  const AnyPredictor pred = build_predictor(cfg.predictor, sc, cfg);
  EvaluationSettings settings;
  settings.method = cfg.method;
  settings.mc = cfg.monte_carlo;
  settings.grid = cfg.grid;
  settings.decomposition = cfg.decomposition;
  settings.w2 = cfg.w2;
  RunResult out{evaluate_report(pred, sc, predictor_label(cfg.predictor),
                                settings),
                {}};
  out.report_json = report_to_json(out.report).dump(2) + "\n";
  const std::filesystem::path dir = cfg.output_dir;
  write_file_atomic(dir / "report.json", out.report_json);
  write_file_atomic(dir / "report.csv", report_to_csv(out.report));
  write_file_atomic(dir / "predictions.csv", predictions_csv(pred, sc, cfg));
  return out;
}

void figures(const std::string& scenario_name,
             const std::filesystem::path& outdir) {
  const Scenario sc = scenario_by_name(scenario_name);
  if (sc.dimension() != 1) {
    throw UnsupportedForFigures("figures need a one-dimensional scenario; '" +
                                scenario_name + "' is multivariate");
  }
  const GridSettings gs;
  const auto grids = discretize(sc, gs);
  const auto jd = jordan_decompose(grids.group1, grids.group2);
  const auto& grid = grids.group1.grid();
  std::vector<double> xs(grid.n_nodes());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = grid.node(i);
  auto col = [](std::span<const double> s) {
    return std::vector<double>(s.begin(), s.end());
  };

  write_file_atomic(outdir / "fig1_densities.csv",
                    render({"x", "p1", "p2"},
                           {xs, col(grids.group1.values()),
                            col(grids.group2.values())}));
  write_file_atomic(outdir / "fig1_jordan.csv",
                    render({"x", "mu_plus", "mu_minus"},
                           {xs, col(jd.mu_plus.values()),
                            col(jd.mu_minus.values())}));

  const std::vector<std::string> fig2_header{"t", "F_plus_density",
                                             "F_minus_density"};
  if (jd.degenerate()) {
    write_file_atomic(outdir / "fig2_pushforwards.csv",
                      render(fig2_header, {{}, {}, {}}));
  } else {
    const auto pushes = pushforward_cdfs(sc, jd);
    std::vector<double> ts;
    auto dens = densities_on_grid({&pushes.plus, &pushes.minus}, ts);
    write_file_atomic(outdir / "fig2_pushforwards.csv",
                      render(fig2_header, {ts, dens[0], dens[1]}));
  }

  const AnyPredictor fq = build_unaware(sc.f_star, jd, QStar{});
  std::vector<double> fstar(xs.size());
  std::vector<double> fqv(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fstar[i] = sc.f_star(xs[i]);
    fqv[i] = evaluate(fq, xs[i], 1);
  }
  write_file_atomic(outdir / "fig3_predictors.csv",
                    render({"x", "f_star", "f_qstar"}, {xs, fstar, fqv}));

  const Cdf out1 = output_cdf(fq, grids.group1, 1);
  const Cdf out2 = output_cdf(fq, grids.group2, 2);
  std::vector<double> ys;
  auto dens = densities_on_grid({&out1, &out2}, ys);
  write_file_atomic(outdir / "fig3_output_densities.csv",
                    render({"y", "density_group1", "density_group2"},
                           {ys, dens[0], dens[1]}));
}

ojson scan_affine(const ScanConfig& cfg) {
  const auto g1 = resolve_gaussian(cfg.group1);
  const auto g2 = resolve_gaussian(cfg.group2);
  if (g1.dimension() != 2) {
    throw ValidationError("scan-affine scans a two-dimensional slope grid");
  }
  const auto rows =
      affine_dp_scan(g1, g2, beta_grid_2d(cfg.lo, cfg.hi, cfg.steps),
                     cfg.intercept);
  std::vector<std::vector<double>> cols(3);
  std::optional<double> at_zero;
  std::optional<double> min_nonzero;
  std::vector<double> argmin;
  for (const auto& r : rows) {
    cols[0].push_back(r.beta[0]);
    cols[1].push_back(r.beta[1]);
    cols[2].push_back(r.gap);
    if (r.beta[0] == 0.0 && r.beta[1] == 0.0) {
      at_zero = r.gap;
    } else if (!min_nonzero || r.gap < *min_nonzero) {
      min_nonzero = r.gap;
      argmin = r.beta;
    }
  }
  write_file_atomic(std::filesystem::path(cfg.output_dir) / "scan_affine.csv",
                    render({"beta_1", "beta_2", "gap"}, cols));
  ojson j;
  j["points"] = rows.size();
  j["gap_at_zero"] = optional_number(at_zero);
  j["min_gap_nonzero"] = optional_number(min_nonzero);
  j["argmin_beta"] = argmin;
  return j;
}

std::string list_scenarios() {
  std::string out;
  for (const auto& name : scenario_names()) {
    const Scenario sc = scenario_by_name(name);
    out += name + "\t" + std::to_string(sc.dimension()) + "d\t" + sc.note + "\n";
  }
  out += "random-<seed>\t1d\tseeded random Gaussian scenario\n";
  return out;
}

int exit_code_for(const std::exception& e) {
  if (const auto* f = dynamic_cast<const Error*>(&e)) {
    const std::string_view c = f->category();
    if (c == "assumption") return 3;
    if (c == "validation" || c == "geometry" || c == "domain" ||
        c == "unsupported") {
      return 2;
    }
  }
  return 1;
}

std::string error_line(const std::exception& e) {
  std::string category = "internal";
  if (const auto* f = dynamic_cast<const Error*>(&e)) {
    category = std::string(f->category());
  }
  std::string reason = e.what();
  std::replace(reason.begin(), reason.end(), '\n', ' ');
  return "error=" + category + " reason=" + reason;
}

}  // namespace fairq::app
