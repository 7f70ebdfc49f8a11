#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fairq {

// A feature point; one-dimensional points are spans of length one.
using Point = std::span<const double>;

// Uniform grid of n_cells + 1 nodes spanning [lo, hi].
class GridGeometry {
 public:
  GridGeometry(double lo, double hi, std::size_t n_cells);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t n_cells() const { return n_cells_; }
  std::size_t n_nodes() const { return n_cells_ + 1; }
  double spacing() const { return (hi_ - lo_) / static_cast<double>(n_cells_); }
  double node(std::size_t i) const;
  bool contains(double x) const { return x >= lo_ && x <= hi_; }

  // Index of the cell containing x together with the fractional position
  // of x inside it. x must lie in [lo, hi].
  std::pair<std::size_t, double> locate(double x) const;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;

 private:
  double lo_;
  double hi_;
  std::size_t n_cells_;
};

// Trapezoidal integral of node values over the grid.
double trapezoid(const GridGeometry& grid, std::span<const double> values);

// Mass carried by each cell under the trapezoidal rule, h * (v_i + v_{i+1}) / 2.
// These sum to trapezoid(grid, values).
std::vector<double> cell_masses(const GridGeometry& grid,
                                std::span<const double> values);

// Piecewise-linear interpolation of node values; DomainError outside the grid.
double interpolate(const GridGeometry& grid, std::span<const double> values,
                   double x);

// Non-negative density tabulated at the nodes of a uniform grid.
class DensityGrid1D {
 public:
  // Validates non-negativity and that the trapezoidal mass is within a
  // relative 1e-6 of declared_mass.
  DensityGrid1D(GridGeometry grid, std::vector<double> values,
                double declared_mass = 1.0);

  // Evaluates `density` at every node and rescales so that the
  // trapezoidal mass is exactly one.
  static DensityGrid1D tabulate(GridGeometry grid,
                                const std::function<double(double)>& density);

  const GridGeometry& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double mass() const { return mass_; }
  double at(double x) const { return interpolate(grid_, values_, x); }

 private:
  GridGeometry grid_;
  std::vector<double> values_;
  double mass_;
};

// Non-negative (not necessarily normalized) measure on a grid: mu+ or mu-.
class SubMeasureGrid {
 public:
  SubMeasureGrid(GridGeometry grid, std::vector<double> values);

  const GridGeometry& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double mass() const { return mass_; }

 private:
  GridGeometry grid_;
  std::vector<double> values_;
  double mass_;
};

// Isotropic Gaussian N(mean, covariance_scale * I).
struct GaussianGroupParams {
  std::vector<double> mean;
  double covariance_scale = 1.0;

  void validate() const;
  std::size_t dimension() const { return mean.size(); }
  double log_density(Point x) const;
  double density(Point x) const;
};

enum class Region { Plus, Minus, Neutral };

std::string_view to_string(Region r);

// Sign of interpolated p1 - p2 on a grid, with an absolute neutrality band.
struct GridSignRule {
  GridGeometry grid;
  std::vector<double> difference;
  double epsilon = 0.0;
};

// Sign of log p1(x) - log p2(x) for two isotropic Gaussians; any dimension.
struct GaussianLogDensityRule {
  GaussianGroupParams group1;
  GaussianGroupParams group2;
  double epsilon = 0.0;
};

struct Interval {
  double lo;
  double hi;
};

// Group supports given as unions of closed intervals that do not meet.
struct DisjointSupportRule {
  std::vector<Interval> support1;
  std::vector<Interval> support2;
};

// Assigns every feature point to supp(mu+), supp(mu-) or the neutral rest.
class RegionClassifier {
 public:
  using Rule = std::variant<GridSignRule, GaussianLogDensityRule,
                            DisjointSupportRule>;

  explicit RegionClassifier(Rule rule);

  Region classify(Point x) const;
  Region classify(double x) const { return classify(Point(&x, 1)); }

  // Feature dimension the rule accepts.
  std::size_t dimension() const;
  const Rule& rule() const { return rule_; }

 private:
  Rule rule_;
};

inline Region classify(const RegionClassifier& c, Point x) {
  return c.classify(x);
}
inline Region classify(const RegionClassifier& c, double x) {
  return c.classify(x);
}

struct DecompositionOptions {
  // Neutral band for the grid-sign classifier, relative to the largest
  // group density value.
  double epsilon_rel = 1e-12;
  // Below this mass mu+ is treated as zero.
  double epsilon_mass = 1e-8;
};

struct JordanDecomposition {
  SubMeasureGrid mu_plus;
  SubMeasureGrid mu_minus;
  RegionClassifier classifier;
  // Mass of the part common to both groups, 1 - mass(mu+).
  double shared_mass;
  double epsilon_mass;

  bool degenerate() const { return mu_plus.mass() <= epsilon_mass; }
};

// Positive and negative parts of p1 - p2, node by node.
JordanDecomposition jordan_decompose(const DensityGrid1D& p1,
                                     const DensityGrid1D& p2,
                                     const DecompositionOptions& options = {});

// Projects a sub-measure onto probability measures: returns the rescaled
// density and the original mass. DegenerateDecomposition when the mass is
// at or below epsilon_mass.
std::pair<DensityGrid1D, double> normalize(const SubMeasureGrid& m,
                                           double epsilon_mass = 1e-8);

}  // namespace fairq
