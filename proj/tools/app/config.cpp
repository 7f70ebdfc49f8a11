#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fairq/csv.hpp"
#include "fairq/errors.hpp"

namespace fairq::app {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Strict reader over one JSON object: every key must be consumed.
class Obj {
 public:
  Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail("must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    if (!has(key)) fail("missing required key '" + key + "'");
    used_.insert(key);
    return j_.at(key);
  }

  std::string path(const std::string& key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) fail("'" + key + "' must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  std::uint64_t uint(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_unsigned()) {
      fail("'" + key + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::uint64_t uint(const std::string& key, std::uint64_t fallback) {
    return has(key) ? uint(key) : fallback;
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) fail("'" + key + "' must be a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) fail("'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail("'" + key + "' must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (!used_.count(key)) fail("unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("config " + (where_.empty() ? "root" : where_) +
                          ": " + what);
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

GaussianSpec parse_gaussian(Obj& o) {
  GaussianSpec g;
  g.mean = o.numbers("mean");
  g.variance = o.number("variance", 1.0);
  return g;
}

LawSpec parse_law(const json& j, const std::string& where) {
  Obj o(j, where);
  const std::string kind = o.string("kind");
  LawSpec out;
  if (kind == "gaussian") {
    out = parse_gaussian(o);
  } else if (kind == "raised_cosine") {
    out = RaisedCosineSpec{o.number("center"), o.number("half_width")};
  } else if (kind == "density_csv") {
    out = DensityFileSpec{o.string("path")};
  } else {
    o.fail("unknown law kind '" + kind + "'");
  }
  o.finish();
  return out;
}

RegressorSpec parse_regressor(const json& j, const std::string& where) {
  Obj o(j, where);
  const std::string kind = o.string("kind");
  RegressorSpec out;
  if (kind == "logistic") {
    out = LogisticSpec{o.number("a")};
  } else if (kind == "affine") {
    out = AffineSpec{o.numbers("beta"), o.number("intercept", 0.0)};
  } else {
    o.fail("unknown regressor kind '" + kind + "'");
  }
  o.finish();
  return out;
}

ScenarioSpec parse_scenario(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  Obj o(j, "scenario");
  InlineScenario sc;
  sc.name = o.string("name", sc.name);
  sc.note = o.string("note", "");
  sc.p1 = o.number("p1");
  sc.group1 = parse_law(o.at("group1"), "scenario.group1");
  sc.group2 = parse_law(o.at("group2"), "scenario.group2");
  sc.f_star = parse_regressor(o.at("f_star"), "scenario.f_star");
  if (o.has("group_regressors")) {
    const json& g = o.at("group_regressors");
    if (!g.is_array() || g.size() != 2) {
      o.fail("'group_regressors' must be an array of two regressors");
    }
    sc.group_regressors = std::array<RegressorSpec, 2>{
        parse_regressor(g[0], "scenario.group_regressors[0]"),
        parse_regressor(g[1], "scenario.group_regressors[1]")};
  }
  o.finish();
  return sc;
}

QSpec parse_q(const json& j) {
  Obj o(j, "predictor.q");
  const std::string kind = o.string("kind");
  QSpec out;
  if (kind == "qstar") {
    out = QStarSpec{};
  } else if (kind == "random") {
    RandomQSpec r;
    r.seed = o.uint("seed");
    r.knots = o.uint("knots", r.knots);
    r.lo = o.number("lo", r.lo);
    r.hi = o.number("hi", r.hi);
    out = r;
  } else if (kind == "tabulated") {
    out = TabulatedQSpec{o.numbers("levels"), o.numbers("values")};
  } else {
    o.fail("unknown Q kind '" + kind + "'");
  }
  o.finish();
  return out;
}

PredictorSpec parse_predictor(const json& j) {
  Obj o(j, "predictor");
  const std::string kind = o.string("kind");
  PredictorSpec out;
  if (kind == "bayes") {
    out = BayesSpec{};
  } else if (kind == "f_q") {
    out = FQSpec{o.has("q") ? parse_q(o.at("q")) : QSpec{QStarSpec{}}};
  } else if (kind == "g_star") {
    out = GStarSpec{};
  } else if (kind == "affine") {
    out = AffinePredictorSpec{o.numbers("beta"), o.number("intercept", 0.0)};
  } else {
    o.fail("unknown predictor kind '" + kind + "'");
  }
  o.finish();
  return out;
}

ojson law_json(const LawSpec& law) {
  return std::visit(
      [](const auto& l) -> ojson {
        using L = std::decay_t<decltype(l)>;
        ojson j;
        if constexpr (std::is_same_v<L, GaussianSpec>) {
          j["kind"] = "gaussian";
          j["mean"] = l.mean;
          j["variance"] = l.variance;
        } else if constexpr (std::is_same_v<L, RaisedCosineSpec>) {
          j["kind"] = "raised_cosine";
          j["center"] = l.center;
          j["half_width"] = l.half_width;
        } else {
          j["kind"] = "density_csv";
          j["path"] = l.path;
        }
        return j;
      },
      law);
}

ojson regressor_json(const RegressorSpec& r) {
  ojson j;
  if (const auto* l = std::get_if<LogisticSpec>(&r)) {
    j["kind"] = "logistic";
    j["a"] = l->a;
  } else {
    const auto& a = std::get<AffineSpec>(r);
    j["kind"] = "affine";
    j["beta"] = a.beta;
    j["intercept"] = a.intercept;
  }
  return j;
}

ojson q_json(const QSpec& q) {
  ojson j;
  if (std::holds_alternative<QStarSpec>(q)) {
    j["kind"] = "qstar";
  } else if (const auto* r = std::get_if<RandomQSpec>(&q)) {
    j["kind"] = "random";
    j["seed"] = r->seed;
    j["knots"] = r->knots;
    j["lo"] = r->lo;
    j["hi"] = r->hi;
  } else {
    const auto& t = std::get<TabulatedQSpec>(q);
    j["kind"] = "tabulated";
    j["levels"] = t.levels;
    j["values"] = t.values;
  }
  return j;
}

ojson predictor_json(const PredictorSpec& p) {
  ojson j;
  if (std::holds_alternative<BayesSpec>(p)) {
    j["kind"] = "bayes";
  } else if (const auto* f = std::get_if<FQSpec>(&p)) {
    j["kind"] = "f_q";
    j["q"] = q_json(f->q);
  } else if (std::holds_alternative<GStarSpec>(p)) {
    j["kind"] = "g_star";
  } else {
    const auto& a = std::get<AffinePredictorSpec>(p);
    j["kind"] = "affine";
    j["beta"] = a.beta;
    j["intercept"] = a.intercept;
  }
  return j;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ---------------------------------------------------------- run config

RunConfig parse_run_config(const json& j) {
  Obj o(j, "");
  RunConfig c;
  if (o.has("scenario")) c.scenario = parse_scenario(o.at("scenario"));
  if (o.has("predictor")) c.predictor = parse_predictor(o.at("predictor"));

  if (o.has("evaluation")) {
    Obj e(o.at("evaluation"), "evaluation");
    const std::string method = e.string("method");
    if (method == "quadrature") {
      c.method = Method::Quadrature;
    } else if (method == "monte-carlo") {
      c.method = Method::MonteCarlo;
      c.monte_carlo.n = e.uint("n", c.monte_carlo.n);
      c.monte_carlo.seed = e.uint("seed");
    } else {
      e.fail("method must be 'quadrature' or 'monte-carlo'");
    }
    e.finish();
  }
  if (o.has("grid")) {
    Obj g(o.at("grid"), "grid");
    c.grid.n_cells = g.uint("n_cells", c.grid.n_cells);
    c.grid.sigma_span = g.number("sigma_span", c.grid.sigma_span);
    if (g.has("range")) {
      const json& r = g.at("range");
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() ||
          !r[1].is_number()) {
        g.fail("'range' must be [lo, hi]");
      }
      c.grid.range = std::pair{r[0].get<double>(), r[1].get<double>()};
    }
    g.finish();
  }
  if (o.has("decomposition")) {
    Obj d(o.at("decomposition"), "decomposition");
    c.decomposition.epsilon_rel =
        d.number("epsilon_rel", c.decomposition.epsilon_rel);
    c.decomposition.epsilon_mass =
        d.number("epsilon_mass", c.decomposition.epsilon_mass);
    d.finish();
  }
  if (o.has("w2")) {
    Obj w(o.at("w2"), "w2");
    const std::string rule = w.string("rule", "exact");
    if (rule == "exact") {
      c.w2.rule = QuantileRule::Exact;
    } else if (rule == "trapezoid") {
      c.w2.rule = QuantileRule::Trapezoid;
    } else {
      w.fail("rule must be 'exact' or 'trapezoid'");
    }
    c.w2.grid_points = w.uint("grid_points", c.w2.grid_points);
    w.finish();
  }
  if (o.has("pushforward_mc")) {
    Obj p(o.at("pushforward_mc"), "pushforward_mc");
    c.mc_pushforward_n = p.uint("n", c.mc_pushforward_n);
    c.mc_pushforward_seed = p.uint("seed", c.mc_pushforward_seed);
    p.finish();
  }
  if (o.has("predictions")) {
    Obj p(o.at("predictions"), "predictions");
    c.predictions.n = p.uint("n", c.predictions.n);
    c.predictions.seed = p.uint("seed", c.predictions.seed);
    p.finish();
  }
  c.output_dir = o.string("output_dir", c.output_dir);
  o.finish();
  return c;
}

RunConfig parse_run_config_text(const std::string& text) {
  return parse_run_config(parse_text(text));
}

ojson serialize(const RunConfig& c) {
  ojson j;
  if (const auto* name = std::get_if<std::string>(&c.scenario)) {
    j["scenario"] = *name;
  } else {
    const auto& sc = std::get<InlineScenario>(c.scenario);
    ojson s;
    s["name"] = sc.name;
    s["note"] = sc.note;
    s["p1"] = sc.p1;
    s["group1"] = law_json(sc.group1);
    s["group2"] = law_json(sc.group2);
    s["f_star"] = regressor_json(sc.f_star);
    if (sc.group_regressors) {
      s["group_regressors"] = ojson::array({regressor_json((*sc.group_regressors)[0]),
                                            regressor_json((*sc.group_regressors)[1])});
    }
    j["scenario"] = s;
  }
  j["predictor"] = predictor_json(c.predictor);
  ojson e;
  e["method"] = std::string(to_string(c.method));
  if (c.method == Method::MonteCarlo) {
    e["n"] = c.monte_carlo.n;
    e["seed"] = c.monte_carlo.seed;
  }
  j["evaluation"] = e;
  ojson g;
  g["n_cells"] = c.grid.n_cells;
  g["sigma_span"] = c.grid.sigma_span;
  if (c.grid.range) g["range"] = {c.grid.range->first, c.grid.range->second};
  j["grid"] = g;
  j["decomposition"] = {{"epsilon_rel", c.decomposition.epsilon_rel},
                        {"epsilon_mass", c.decomposition.epsilon_mass}};
  j["w2"] = {{"rule", c.w2.rule == QuantileRule::Exact ? "exact" : "trapezoid"},
             {"grid_points", c.w2.grid_points}};
  j["pushforward_mc"] = {{"n", c.mc_pushforward_n},
                         {"seed", c.mc_pushforward_seed}};
  j["predictions"] = {{"n", c.predictions.n}, {"seed", c.predictions.seed}};
  j["output_dir"] = c.output_dir;
  return j;
}

// ------------------------------------------------------ scan-affine config

ScanConfig parse_scan_config(const json& j) {
  Obj o(j, "");
  ScanConfig c;
  if (o.has("group1")) {
    Obj g(o.at("group1"), "group1");
    c.group1 = parse_gaussian(g);
    g.finish();
  }
  if (o.has("group2")) {
    Obj g(o.at("group2"), "group2");
    c.group2 = parse_gaussian(g);
    g.finish();
  }
  if (o.has("beta_grid")) {
    Obj b(o.at("beta_grid"), "beta_grid");
    c.lo = b.number("lo", c.lo);
    c.hi = b.number("hi", c.hi);
    c.steps = b.uint("steps", c.steps);
    b.finish();
  }
  c.intercept = o.number("intercept", c.intercept);
  c.output_dir = o.string("output_dir", c.output_dir);
  o.finish();
  return c;
}

ScanConfig parse_scan_config_text(const std::string& text) {
  return parse_scan_config(parse_text(text));
}

ojson serialize(const ScanConfig& c) {
  ojson j;
  j["group1"] = {{"mean", c.group1.mean}, {"variance", c.group1.variance}};
  j["group2"] = {{"mean", c.group2.mean}, {"variance", c.group2.variance}};
  j["beta_grid"] = {{"lo", c.lo}, {"hi", c.hi}, {"steps", c.steps}};
  j["intercept"] = c.intercept;
  j["output_dir"] = c.output_dir;
  return j;
}

// --------------------------------------------------------------- resolve

GaussianGroupParams resolve_gaussian(const GaussianSpec& spec) {
  GaussianGroupParams g{spec.mean, spec.variance};
  g.validate();
  return g;
}

BayesRegressor resolve_regressor(const RegressorSpec& spec) {
  if (const auto* l = std::get_if<LogisticSpec>(&spec)) {
    return BayesRegressor::logistic(l->a);
  }
  const auto& a = std::get<AffineSpec>(spec);
  return BayesRegressor::affine(a.beta, a.intercept);
}

Scenario resolve_scenario(const ScenarioSpec& spec,
                          const std::filesystem::path& base_dir) {
  if (const auto* name = std::get_if<std::string>(&spec)) {
    return scenario_by_name(*name);
  }
  const auto& in = std::get<InlineScenario>(spec);
  auto law = [&](const LawSpec& l) -> FeatureLaw {
    if (const auto* g = std::get_if<GaussianSpec>(&l)) {
      return resolve_gaussian(*g);
    }
    if (const auto* r = std::get_if<RaisedCosineSpec>(&l)) {
      return RaisedCosineLaw{r->center, r->half_width};
    }
    std::filesystem::path p = std::get<DensityFileSpec>(l).path;
    if (p.is_relative()) p = base_dir / p;
    return density_from_csv(read_file(p));
  };
  Scenario sc{in.name, in.note, in.p1, law(in.group1), law(in.group2),
              resolve_regressor(in.f_star), std::nullopt};
  if (in.group_regressors) {
    sc.group_regressors = std::array<BayesRegressor, 2>{
        resolve_regressor((*in.group_regressors)[0]),
        resolve_regressor((*in.group_regressors)[1])};
  }
  sc.validate();
  return sc;
}

}  // namespace fairq::app
