#include "fairq/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fairq/errors.hpp"
#include "fairq/normal.hpp"

namespace fairq {

namespace {

constexpr double kUnitTolerance = 1e-12;

double lerp_between(std::span<const double> xs, std::span<const double> ys,
                    std::size_t lo, std::size_t hi, double t) {
  const double frac = (t - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + frac * (ys[hi] - ys[lo]);
}

// Right-continuous evaluation: past a repeated abscissa, the later ordinate.
double eval_right(std::span<const double> xs, std::span<const double> ys,
                  double t, double below) {
  if (t < xs.front()) return below;
  const auto i = static_cast<std::size_t>(
      std::upper_bound(xs.begin(), xs.end(), t) - xs.begin());
  if (i == xs.size()) return ys.back();
  return lerp_between(xs, ys, i - 1, i, t);
}

// Left-continuous evaluation: at a repeated abscissa, the earlier ordinate.
double eval_left(std::span<const double> xs, std::span<const double> ys,
                 double t, double at_or_below) {
  if (t <= xs.front()) return at_or_below;
  const auto i = static_cast<std::size_t>(
      std::lower_bound(xs.begin(), xs.end(), t) - xs.begin());
  if (i == xs.size()) return ys.back();
  return lerp_between(xs, ys, i - 1, i, t);
}

// Drops exact duplicate points and keeps only the first and last point of
// any run sharing an abscissa.
void compact(std::vector<double>& xs, std::vector<double>& ys) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (out > 0 && xs[out - 1] == xs[i] && ys[out - 1] == ys[i]) continue;
    if (out > 1 && xs[out - 1] == xs[i] && xs[out - 2] == xs[i]) {
      ys[out - 1] = ys[i];
      continue;
    }
    xs[out] = xs[i];
    ys[out] = ys[i];
    ++out;
  }
  xs.resize(out);
  ys.resize(out);
}

void require_monotone(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw ValidationError(std::string(what) + " must be finite");
    }
    if (i > 0 && v[i] < v[i - 1]) {
      throw ValidationError(std::string(what) + " must be non-decreasing");
    }
  }
}

std::vector<double> merged_abscissae(std::span<const double> a,
                                     std::span<const double> b) {
  std::vector<double> all;
  all.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all));
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

}  // namespace

// ---------------------------------------------------------------- Cdf

Cdf::Cdf(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.empty() || knots_.size() != values_.size()) {
    throw ValidationError("cdf needs equally many knots and values (>= 1)");
  }
  require_monotone(knots_, "cdf knots");
  for (double& v : values_) {
    if (v < -kUnitTolerance || v > 1.0 + kUnitTolerance) {
      throw ValidationError("cdf values must lie in [0, 1]");
    }
    v = std::clamp(v, 0.0, 1.0);
  }
  require_monotone(values_, "cdf values");
  if (std::abs(values_.back() - 1.0) > kUnitTolerance) {
    throw ValidationError("cdf must reach 1 at its last knot");
  }
  values_.back() = 1.0;
  compact(knots_, values_);
}

Cdf Cdf::point_mass(double at) { return Cdf({at}, {1.0}); }

double Cdf::operator()(double t) const {
  return eval_right(knots_, values_, t, 0.0);
}

double Cdf::left_limit(double t) const {
  return eval_left(knots_, values_, t, 0.0);
}

// --------------------------------------------------------- QuantileFn

QuantileFn::QuantileFn(std::vector<double> levels, std::vector<double> values)
    : levels_(std::move(levels)), values_(std::move(values)) {
  if (levels_.size() < 2 || levels_.size() != values_.size()) {
    throw ValidationError(
        "quantile function needs equally many levels and values (>= 2)");
  }
  require_monotone(levels_, "quantile levels");
  require_monotone(values_, "quantile values");
  if (std::abs(levels_.front()) > kUnitTolerance ||
      std::abs(levels_.back() - 1.0) > kUnitTolerance) {
    throw ValidationError("quantile levels must span [0, 1]");
  }
  levels_.front() = 0.0;
  levels_.back() = 1.0;
  for (double& l : levels_) l = std::clamp(l, 0.0, 1.0);
  compact(levels_, values_);
}

QuantileFn QuantileFn::tabulate(const std::function<double(double)>& q,
                                std::size_t n_points) {
  if (n_points < 2) throw ValidationError("need at least 2 tabulation points");
  std::vector<double> levels(n_points);
  std::vector<double> values(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    levels[i] = static_cast<double>(i) / static_cast<double>(n_points - 1);
    values[i] = q(levels[i]);
  }
  return QuantileFn(std::move(levels), std::move(values));
}

double QuantileFn::operator()(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream msg;
    msg << "quantile level " << t << " outside [0, 1]";
    throw DomainError(msg.str());
  }
  return eval_left(levels_, values_, t, values_.front());
}

double QuantileFn::right_limit(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("quantile level outside [0, 1]");
  }
  return eval_right(levels_, values_, t, values_.front());
}

// --------------------------------------------------------- builders

Cdf pushforward_cells(std::span<const double> images,
                      std::span<const double> masses) {
  if (images.size() != masses.size() + 1) {
    throw GeometryError("pushforward needs one image per node");
  }
  struct Ramp {
    double a;
    double b;
    double m;
  };
  std::vector<Ramp> ramps;
  std::vector<std::pair<double, double>> atoms;
  std::vector<double> breaks;
  ramps.reserve(masses.size());
  breaks.reserve(2 * masses.size());

  for (std::size_t c = 0; c < masses.size(); ++c) {
    const double m = masses[c];
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw ValidationError("cell masses must be finite and non-negative");
    }
    if (m == 0.0) continue;
    const double y0 = images[c];
    const double y1 = images[c + 1];
    if (!std::isfinite(y0) || !std::isfinite(y1)) {
      throw NumericError("map is not finite on the support");
    }
    const double a = std::min(y0, y1);
    const double b = std::max(y0, y1);
    if (a == b) {
      atoms.emplace_back(a, m);
      breaks.push_back(a);
    } else {
      ramps.push_back({a, b, m});
      breaks.push_back(a);
      breaks.push_back(b);
    }
  }
  if (ramps.empty() && atoms.empty()) {
    throw ValidationError("pushforward of a zero measure");
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::sort(atoms.begin(), atoms.end());

  // Ramps ordered by start (to enter the active set) and by end (for the
  // mass of fully passed ramps).
  std::vector<std::size_t> by_start(ramps.size());
  std::iota(by_start.begin(), by_start.end(), 0);
  std::sort(by_start.begin(), by_start.end(),
            [&](std::size_t i, std::size_t j) { return ramps[i].a < ramps[j].a; });
  std::vector<std::pair<double, double>> ends(ramps.size());
  for (std::size_t i = 0; i < ramps.size(); ++i) ends[i] = {ramps[i].b, ramps[i].m};
  std::sort(ends.begin(), ends.end());

  std::vector<double> knots;
  std::vector<double> cum;
  knots.reserve(breaks.size() + atoms.size());
  cum.reserve(breaks.size() + atoms.size());

  std::vector<std::size_t> active;
  std::size_t next_start = 0;
  std::size_t next_end = 0;
  std::size_t next_atom = 0;
  double completed = 0.0;
  double atom_mass = 0.0;

  for (double t : breaks) {
    while (next_start < by_start.size() && ramps[by_start[next_start]].a < t) {
      active.push_back(by_start[next_start++]);
    }
    while (next_end < ends.size() && ends[next_end].first <= t) {
      completed += ends[next_end++].second;
    }
    std::erase_if(active, [&](std::size_t i) { return ramps[i].b <= t; });
    double partial = 0.0;
    for (std::size_t i : active) {
      const auto& r = ramps[i];
      partial += r.m * (t - r.a) / (r.b - r.a);
    }
    double jump = 0.0;
    while (next_atom < atoms.size() && atoms[next_atom].first <= t) {
      jump += atoms[next_atom++].second;
    }
    const double before = completed + atom_mass + partial;
    atom_mass += jump;
    if (jump > 0.0) {
      knots.push_back(t);
      cum.push_back(before);
    }
    knots.push_back(t);
    cum.push_back(before + jump);
  }

  const double total = cum.back();
  double running = 0.0;
  for (double& v : cum) {
    running = std::max(running, v / total);
    v = std::min(running, 1.0);
  }
  cum.back() = 1.0;
  return Cdf(std::move(knots), std::move(cum));
}

Cdf cdf_from_density(const DensityGrid1D& d,
                     const std::function<double(double)>& map) {
  const auto& grid = d.grid();
  std::vector<double> images(grid.n_nodes());
  for (std::size_t i = 0; i < images.size(); ++i) images[i] = map(grid.node(i));
  const auto masses = cell_masses(grid, d.values());
  return pushforward_cells(images, masses);
}

Cdf weighted_ecdf(std::span<const double> values,
                  std::span<const double> weights, EcdfStyle style) {
  if (values.empty() || values.size() != weights.size()) {
    throw ValidationError("weighted ecdf needs matching non-empty inputs");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw NumericError("ecdf value not finite");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw ValidationError("ecdf weights must be finite and non-negative");
    }
  }
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return values[i] < values[j];
  });

  std::vector<double> knots;
  std::vector<double> cum;
  double acc = 0.0;
  std::size_t k = 0;
  while (k < order.size()) {
    const double v = values[order[k]];
    double w = 0.0;
    while (k < order.size() && values[order[k]] == v) w += weights[order[k++]];
    if (w == 0.0) continue;
    if (style == EcdfStyle::Step) {
      knots.push_back(v);
      cum.push_back(acc);
    }
    acc += w;
    knots.push_back(v);
    cum.push_back(acc);
  }
  if (!(acc > 0.0)) throw ValidationError("ecdf weights sum to zero");
  for (double& c : cum) c = std::min(c / acc, 1.0);
  cum.back() = 1.0;
  return Cdf(std::move(knots), std::move(cum));
}

Cdf empirical_cdf(std::span<const double> values, EcdfStyle style) {
  const std::vector<double> ones(values.size(), 1.0);
  return weighted_ecdf(values, ones, style);
}

QuantileFn generalized_inverse(const Cdf& f) {
  std::vector<double> levels;
  std::vector<double> values;
  levels.reserve(f.knots().size() + 1);
  values.reserve(f.knots().size() + 1);
  if (f.values().front() > 0.0) {
    levels.push_back(0.0);
    values.push_back(f.knots().front());
  }
  levels.insert(levels.end(), f.values().begin(), f.values().end());
  values.insert(values.end(), f.knots().begin(), f.knots().end());
  return QuantileFn(std::move(levels), std::move(values));
}

Cdf cdf_of_quantile(const QuantileFn& q) {
  std::vector<double> knots(q.values().begin(), q.values().end());
  std::vector<double> values(q.levels().begin(), q.levels().end());
  return Cdf(std::move(knots), std::move(values));
}

// --------------------------------------------------------- distances

double ks_distance(const Cdf& a, const Cdf& b) {
  const auto ts = merged_abscissae(a.knots(), b.knots());
  double sup = 0.0;
  for (double t : ts) {
    sup = std::max(sup, std::abs(a(t) - b(t)));
    sup = std::max(sup, std::abs(a.left_limit(t) - b.left_limit(t)));
  }
  return std::min(sup, 1.0);
}

double wasserstein2_sq(const QuantileFn& qa, const QuantileFn& qb,
                       const W2Options& options) {
  if (options.rule == QuantileRule::Trapezoid) {
    if (options.grid_points < 2) {
      throw ValidationError("quantile grid needs at least 2 points");
    }
    const std::size_t n = options.grid_points - 1;
    const double h = 1.0 / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      const double t = j == n ? 1.0 : h * static_cast<double>(j);
      const double d = qa(t) - qb(t);
      acc += (j == 0 || j == n ? 0.5 : 1.0) * d * d;
    }
    return acc * h;
  }
  const auto ls = merged_abscissae(qa.levels(), qb.levels());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < ls.size(); ++k) {
    const double d0 = qa.right_limit(ls[k]) - qb.right_limit(ls[k]);
    const double d1 = qa(ls[k + 1]) - qb(ls[k + 1]);
    acc += (ls[k + 1] - ls[k]) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
  }
  return acc;
}

double wasserstein2_sq(const Cdf& a, const Cdf& b, const W2Options& options) {
  return wasserstein2_sq(generalized_inverse(a), generalized_inverse(b),
                         options);
}

QuantileFn barycenter_quantile(const QuantileFn& qa, const QuantileFn& qb,
                               double w) {
  if (!(w >= 0.0 && w <= 1.0)) {
    throw ValidationError("barycenter weight must lie in [0, 1]");
  }
  if (w == 1.0) return qa;
  if (w == 0.0) return qb;
  const auto ls = merged_abscissae(qa.levels(), qb.levels());
  std::vector<double> levels;
  std::vector<double> values;
  levels.reserve(2 * ls.size());
  values.reserve(2 * ls.size());
  const double v = 1.0 - w;
  for (double l : ls) {
    const double left = w * qa(l) + v * qb(l);
    const double right = w * qa.right_limit(l) + v * qb.right_limit(l);
    levels.push_back(l);
    values.push_back(left);
    if (right != left) {
      levels.push_back(l);
      values.push_back(right);
    }
  }
  return QuantileFn(std::move(levels), std::move(values));
}

// --------------------------------------------------------- ScalarLaw

ScalarLaw ScalarLaw::tabulated(Cdf cdf) {
  QuantileFn q = generalized_inverse(cdf);
  return ScalarLaw(Tabulated{std::move(cdf), std::move(q)});
}

ScalarLaw ScalarLaw::gaussian(double mean, double sd) {
  if (!std::isfinite(mean) || !(sd >= 0.0) || !std::isfinite(sd)) {
    throw ValidationError("gaussian law needs finite mean and sd >= 0");
  }
  return ScalarLaw(Gaussian{mean, sd});
}

double ScalarLaw::cdf(double t) const {
  if (const auto* g = std::get_if<Gaussian>(&law_)) {
    if (g->sd == 0.0) return t < g->mean ? 0.0 : 1.0;
    return normal::cdf((t - g->mean) / g->sd);
  }
  return std::get<Tabulated>(law_).cdf(t);
}

double ScalarLaw::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("level outside [0, 1]");
  if (const auto* g = std::get_if<Gaussian>(&law_)) {
    if (g->sd == 0.0) return g->mean;
    // Keep closed-endpoint levels finite.
    constexpr double kEdge = std::numeric_limits<double>::min();
    const double p = std::clamp(u, kEdge, 1.0 - std::numeric_limits<double>::epsilon() / 2);
    return g->mean + g->sd * normal::quantile(p);
  }
  return std::get<Tabulated>(law_).quantile(u);
}

}  // namespace fairq
