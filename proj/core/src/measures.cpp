#include "fairq/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fairq/errors.hpp"

namespace fairq {

namespace {

constexpr double kMassTolerance = 1e-6;

void require_node_count(const GridGeometry& grid, std::size_t n) {
  if (n != grid.n_nodes()) {
    std::ostringstream msg;
    msg << "grid has " << grid.n_nodes() << " nodes but " << n
        << " values were given";
    throw GeometryError(msg.str());
  }
}

void require_non_negative(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("density values must be finite and non-negative");
    }
  }
}

}  // namespace

GridGeometry::GridGeometry(double lo, double hi, std::size_t n_cells)
    : lo_(lo), hi_(hi), n_cells_(n_cells) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    throw ValidationError("grid requires finite lo < hi");
  }
  if (n_cells < 2) throw ValidationError("grid requires at least 2 cells");
}

double GridGeometry::node(std::size_t i) const {
  if (i == n_cells_) return hi_;
  return lo_ + spacing() * static_cast<double>(i);
}

std::pair<std::size_t, double> GridGeometry::locate(double x) const {
  if (!contains(x)) {
    std::ostringstream msg;
    msg << "point " << x << " outside working range [" << lo_ << ", " << hi_
        << "]";
    throw DomainError(msg.str());
  }
  const double pos = (x - lo_) / spacing();
  auto cell = static_cast<std::size_t>(std::floor(pos));
  if (cell >= n_cells_) cell = n_cells_ - 1;
  return {cell, pos - static_cast<double>(cell)};
}

double trapezoid(const GridGeometry& grid, std::span<const double> values) {
  require_node_count(grid, values.size());
  double inner = 0.0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) inner += values[i];
  return grid.spacing() * (inner + 0.5 * (values.front() + values.back()));
}

std::vector<double> cell_masses(const GridGeometry& grid,
                                std::span<const double> values) {
  require_node_count(grid, values.size());
  const double half_h = 0.5 * grid.spacing();
  std::vector<double> out(grid.n_cells());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = half_h * (values[i] + values[i + 1]);
  }
  return out;
}

double interpolate(const GridGeometry& grid, std::span<const double> values,
                   double x) {
  require_node_count(grid, values.size());
  const auto [cell, frac] = grid.locate(x);
  return values[cell] + frac * (values[cell + 1] - values[cell]);
}

DensityGrid1D::DensityGrid1D(GridGeometry grid, std::vector<double> values,
                             double declared_mass)
    : grid_(grid), values_(std::move(values)) {
  require_node_count(grid_, values_.size());
  require_non_negative(values_);
  mass_ = trapezoid(grid_, values_);
  if (std::abs(mass_ - declared_mass) >
      kMassTolerance * std::max(declared_mass, 1e-300)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "density integrates to " << mass_ << ", declared " << declared_mass;
    throw ValidationError(msg.str());
  }
}

DensityGrid1D DensityGrid1D::tabulate(
    GridGeometry grid, const std::function<double(double)>& density) {
  std::vector<double> values(grid.n_nodes());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = density(grid.node(i));
  }
  require_non_negative(values);
  const double mass = trapezoid(grid, values);
  if (!(mass > 0.0)) {
    throw ValidationError("tabulated density has zero mass on the grid");
  }
  for (double& v : values) v /= mass;
  return DensityGrid1D(grid, std::move(values));
}

SubMeasureGrid::SubMeasureGrid(GridGeometry grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  require_node_count(grid_, values_.size());
  require_non_negative(values_);
  mass_ = trapezoid(grid_, values_);
}

void GaussianGroupParams::validate() const {
  if (mean.empty()) throw ValidationError("gaussian mean must be non-empty");
  if (!(covariance_scale > 0.0) || !std::isfinite(covariance_scale)) {
    throw ValidationError("gaussian covariance_scale must be positive");
  }
  for (double m : mean) {
    if (!std::isfinite(m)) throw ValidationError("gaussian mean not finite");
  }
}

double GaussianGroupParams::log_density(Point x) const {
  if (x.size() != mean.size()) {
    throw DomainError("point dimension does not match gaussian dimension");
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - mean[k];
    sq += d * d;
  }
  const double dim = static_cast<double>(mean.size());
  return -0.5 * sq / covariance_scale -
         0.5 * dim * std::log(2.0 * std::numbers::pi * covariance_scale);
}

double GaussianGroupParams::density(Point x) const {
  return std::exp(log_density(x));
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::Plus:
      return "plus";
    case Region::Minus:
      return "minus";
    case Region::Neutral:
      return "neutral";
  }
  return "neutral";
}

RegionClassifier::RegionClassifier(Rule rule) : rule_(std::move(rule)) {
  if (auto* g = std::get_if<GridSignRule>(&rule_)) {
    require_node_count(g->grid, g->difference.size());
    if (!(g->epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0");
  } else if (auto* ga = std::get_if<GaussianLogDensityRule>(&rule_)) {
    ga->group1.validate();
    ga->group2.validate();
    if (ga->group1.dimension() != ga->group2.dimension()) {
      throw ValidationError("gaussian groups differ in dimension");
    }
    if (!(ga->epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0");
  } else {
    const auto& d = std::get<DisjointSupportRule>(rule_);
    for (const auto& a : d.support1) {
      for (const auto& b : d.support2) {
        if (a.lo <= b.hi && b.lo <= a.hi) {
          throw ValidationError("group supports intersect");
        }
      }
    }
  }
}

std::size_t RegionClassifier::dimension() const {
  if (const auto* ga = std::get_if<GaussianLogDensityRule>(&rule_)) {
    return ga->group1.dimension();
  }
  return 1;
}

Region RegionClassifier::classify(Point x) const {
  if (x.size() != dimension()) {
    throw DomainError("point dimension does not match classifier");
  }
  return std::visit(
      [&](const auto& r) -> Region {
        using R = std::decay_t<decltype(r)>;
        double signed_value = 0.0;
        double eps = 0.0;
        if constexpr (std::is_same_v<R, GridSignRule>) {
          signed_value = interpolate(r.grid, r.difference, x[0]);
          eps = r.epsilon;
        } else if constexpr (std::is_same_v<R, GaussianLogDensityRule>) {
          signed_value = r.group1.log_density(x) - r.group2.log_density(x);
          eps = r.epsilon;
        } else {
          auto inside = [&](const std::vector<Interval>& s) {
            return std::any_of(s.begin(), s.end(), [&](const Interval& iv) {
              return x[0] >= iv.lo && x[0] <= iv.hi;
            });
          };
          if (inside(r.support1)) return Region::Plus;
          if (inside(r.support2)) return Region::Minus;
          return Region::Neutral;
        }
        if (signed_value > eps) return Region::Plus;
        if (signed_value < -eps) return Region::Minus;
        return Region::Neutral;
      },
      rule_);
}

JordanDecomposition jordan_decompose(const DensityGrid1D& p1,
                                     const DensityGrid1D& p2,
                                     const DecompositionOptions& options) {
  if (!(p1.grid() == p2.grid())) {
    throw GeometryError("group densities are on different grids");
  }
  const auto& grid = p1.grid();
  for (const auto* p : {&p1, &p2}) {
    if (std::abs(p->mass() - 1.0) > kMassTolerance) {
      throw ValidationError("group density is not a probability density");
    }
  }
  // Rescale residual normalization error so both groups integrate to the
  // same total and mu(R) = 0 holds to rounding.
  auto scaled = [](const DensityGrid1D& p) {
    std::vector<double> v(p.values().begin(), p.values().end());
    if (std::abs(p.mass() - 1.0) > 1e-12) {
      for (double& x : v) x /= p.mass();
    }
    return v;
  };
  const std::vector<double> a = scaled(p1);
  const std::vector<double> b = scaled(p2);

  std::vector<double> plus(a.size());
  std::vector<double> minus(a.size());
  std::vector<double> diff(a.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff[i] = a[i] - b[i];
    plus[i] = std::max(a[i] - b[i], 0.0);
    minus[i] = std::max(b[i] - a[i], 0.0);
    peak = std::max({peak, a[i], b[i]});
  }

  SubMeasureGrid mu_plus(grid, std::move(plus));
  SubMeasureGrid mu_minus(grid, std::move(minus));
  const double shared = 1.0 - mu_plus.mass();
  RegionClassifier classifier(
      GridSignRule{grid, std::move(diff), options.epsilon_rel * peak});
  return JordanDecomposition{std::move(mu_plus), std::move(mu_minus),
                             std::move(classifier), shared,
                             options.epsilon_mass};
}

std::pair<DensityGrid1D, double> normalize(const SubMeasureGrid& m,
                                           double epsilon_mass) {
  if (m.mass() <= epsilon_mass) {
    std::ostringstream msg;
    msg << "sub-measure mass " << m.mass() << " <= " << epsilon_mass
        << "; group feature laws coincide";
    throw DegenerateDecomposition(msg.str());
  }
  std::vector<double> v(m.values().begin(), m.values().end());
  for (double& x : v) x /= m.mass();
  return {DensityGrid1D(m.grid(), std::move(v)), m.mass()};
}

}  // namespace fairq
