#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "fairq/measures.hpp"

namespace fairq {

// Piecewise-linear distribution function. F is 0 left of the first knot,
// 1 from the last knot on, and linear between consecutive distinct knots.
// Knots may repeat once: the pair (x, v0), (x, v1) encodes an atom of mass
// v1 - v0 at x, and F is right-continuous there. A first value above zero
// is an atom at the first knot.
class Cdf {
 public:
  Cdf(std::vector<double> knots, std::vector<double> values);

  static Cdf point_mass(double at);

  double operator()(double t) const;
  double left_limit(double t) const;

  std::span<const double> knots() const { return knots_; }
  std::span<const double> values() const { return values_; }
  double lower() const { return knots_.front(); }
  double upper() const { return knots_.back(); }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

// Non-decreasing piecewise-linear map from [0, 1] to the reals, evaluated
// with the generalized-inverse convention: Q(t) = inf{u : F(u) >= t}. A
// repeated level encodes a jump; Q takes the lower (left-continuous) value
// there. Q(0) is the left end of the represented support.
class QuantileFn {
 public:
  QuantileFn(std::vector<double> levels, std::vector<double> values);

  // Samples an arbitrary non-decreasing q on n_points uniform levels.
  static QuantileFn tabulate(const std::function<double(double)>& q,
                             std::size_t n_points);

  // DomainError for t outside [0, 1].
  double operator()(double t) const;
  double right_limit(double t) const;

  std::span<const double> levels() const { return levels_; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> levels_;
  std::vector<double> values_;
};

// Distribution of map(X) when each grid cell's mass is spread uniformly
// over [map(x_i), map(x_{i+1})]. images has one entry per node, masses one
// per cell. Cells whose two node images coincide contribute an atom.
Cdf pushforward_cells(std::span<const double> images,
                      std::span<const double> masses);

// CDF of map # d, binned with trapezoidal cell weights.
Cdf cdf_from_density(const DensityGrid1D& d,
                     const std::function<double(double)>& map);

enum class EcdfStyle {
  Step,        // right-continuous empirical distribution
  Linearized,  // linear interpolation through (value, cumulative weight)
};

Cdf weighted_ecdf(std::span<const double> values,
                  std::span<const double> weights,
                  EcdfStyle style = EcdfStyle::Step);
Cdf empirical_cdf(std::span<const double> values,
                  EcdfStyle style = EcdfStyle::Step);

QuantileFn generalized_inverse(const Cdf& f);

// Law of Q(U) for U uniform on [0, 1].
Cdf cdf_of_quantile(const QuantileFn& q);

// Kolmogorov-Smirnov distance: sup_t |a(t) - b(t)|, including left limits
// at every knot.
double ks_distance(const Cdf& a, const Cdf& b);

enum class QuantileRule {
  // Composite trapezoid on a uniform level grid of `grid_points` points.
  Trapezoid,
  // Exact integral of the piecewise-quadratic integrand between merged
  // level breakpoints; no grid.
  Exact,
};

// Exact is the default: the trapezoid rule on 8193 levels misses Gaussian
// closed forms with unequal scales by ~3e-4 because of the quantile tails.
struct W2Options {
  QuantileRule rule = QuantileRule::Exact;
  std::size_t grid_points = 8193;
};

// Squared Wasserstein-2 distance on the line, int_0^1 (qa - qb)^2 dt.
double wasserstein2_sq(const QuantileFn& qa, const QuantileFn& qb,
                       const W2Options& options = {});
double wasserstein2_sq(const Cdf& a, const Cdf& b,
                       const W2Options& options = {});

// Quantile function of the two-measure Wasserstein-2 barycenter with
// weights (w, 1 - w): pointwise w * qa + (1 - w) * qb.
QuantileFn barycenter_quantile(const QuantileFn& qa, const QuantileFn& qb,
                               double w);

// A univariate law with both a distribution and a quantile function:
// either tabulated or Gaussian in closed form.
class ScalarLaw {
 public:
  struct Gaussian {
    double mean;
    double sd;
  };
  struct Tabulated {
    Cdf cdf;
    QuantileFn quantile;
  };

  static ScalarLaw tabulated(Cdf cdf);
  static ScalarLaw gaussian(double mean, double sd);

  double cdf(double t) const;
  double quantile(double u) const;

  bool is_gaussian() const { return std::holds_alternative<Gaussian>(law_); }
  const std::variant<Gaussian, Tabulated>& law() const { return law_; }

 private:
  explicit ScalarLaw(std::variant<Gaussian, Tabulated> law)
      : law_(std::move(law)) {}
  std::variant<Gaussian, Tabulated> law_;
};

}  // namespace fairq
