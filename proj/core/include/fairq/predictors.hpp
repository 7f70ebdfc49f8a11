#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "fairq/measures.hpp"
#include "fairq/transport.hpp"

namespace fairq {

// The Bayes regressor f*(x) = E[Y | X = x], or any fixed unaware score.
class BayesRegressor {
 public:
  struct Affine {
    std::vector<double> beta;
    double intercept = 0.0;
  };
  // 1 / (1 + exp(a * x)) on the real line.
  struct Logistic {
    double a = 1.0;
  };
  // Linear interpolation of node values, defined on the grid only.
  struct Tabulated {
    GridGeometry grid;
    std::vector<double> values;
  };
  using Form = std::variant<Affine, Logistic, Tabulated>;

  static BayesRegressor affine(std::vector<double> beta, double intercept);
  static BayesRegressor constant(double c, std::size_t dimension = 1);
  static BayesRegressor logistic(double a);
  static BayesRegressor tabulated(GridGeometry grid, std::vector<double> values);

  double operator()(Point x) const;
  double operator()(double x) const { return (*this)(Point(&x, 1)); }

  std::size_t dimension() const;
  const Form& form() const { return form_; }

 private:
  explicit BayesRegressor(Form form) : form_(std::move(form)) {}
  Form form_;
};

// f* pushed through the normalized parts of the Jordan decomposition.
struct SignedPushforwards {
  Cdf plus;
  Cdf minus;
  double mass;  // common mass of mu+ and mu-
};

// F+ and F- from a grid decomposition. Throws DegenerateDecomposition for
// an empty mu+, and AssumptionViolation when f* is flat on a cell that
// carries more than epsilon_mass of P mu+ or P mu-.
SignedPushforwards signed_pushforwards(const BayesRegressor& f_star,
                                       const JordanDecomposition& jd);

// Q* = (F+^-1 + F-^-1) / 2.
QuantileFn build_qstar(const Cdf& plus, const Cdf& minus);

struct QStar {};
using QChoice = std::variant<QStar, QuantileFn>;

// Continuous non-decreasing Q on [0, 1]: cumulative sums of `knots` seeded
// non-negative increments, rescaled to run from lo to hi.
QuantileFn random_quantile(std::uint64_t seed, std::size_t knots = 16,
                           double lo = 0.0, double hi = 1.0);

// The unaware predictor f_Q:
//   Q(F+(f*(x)))  on supp(mu+),
//   Q(F-(f*(x)))  on supp(mu-),
//   f*(x)         elsewhere.
// A passthrough predictor (identical group laws) returns f* everywhere.
class UnawarePredictor {
 public:
  UnawarePredictor(BayesRegressor f_star, RegionClassifier classifier,
                   Cdf plus, Cdf minus, QuantileFn q);

  static UnawarePredictor passthrough(BayesRegressor f_star);

  double predict(Point x) const;
  double predict(double x) const { return predict(Point(&x, 1)); }

  // Rule applied at x together with the value.
  std::pair<Region, double> predict_with_region(Point x) const;

  bool is_passthrough() const { return !fair_.has_value(); }
  const BayesRegressor& f_star() const { return f_star_; }
  const RegionClassifier& classifier() const;
  const Cdf& f_plus() const;
  const Cdf& f_minus() const;
  const QuantileFn& q() const;

 private:
  struct Fair {
    RegionClassifier classifier;
    Cdf plus;
    Cdf minus;
    QuantileFn q;
  };
  explicit UnawarePredictor(BayesRegressor f_star) : f_star_(std::move(f_star)) {}

  BayesRegressor f_star_;
  std::optional<Fair> fair_;
};

// Grid route: F+- are re-derived from jd. A degenerate jd yields the
// passthrough predictor.
UnawarePredictor build_unaware(const BayesRegressor& f_star,
                               const JordanDecomposition& jd,
                               const QChoice& q);

// General route (any dimension) with externally computed F+-.
UnawarePredictor build_unaware(const BayesRegressor& f_star,
                               RegionClassifier classifier,
                               const SignedPushforwards& pushforwards,
                               const QChoice& q);

inline double predict_unaware(const UnawarePredictor& p, Point x) {
  return p.predict(x);
}
inline double predict_unaware(const UnawarePredictor& p, double x) {
  return p.predict(x);
}

// g*(x, s) = (p1 G1^-1 + p2 G2^-1)(G_s(E[Y | X = x, S = s])).
class AwarePredictor {
 public:
  AwarePredictor(std::array<BayesRegressor, 2> regressors,
                 std::array<ScalarLaw, 2> laws, double p1);

  // group must be 1 or 2, else ValidationError.
  double predict(Point x, int group) const;
  double predict(double x, int group) const {
    return predict(Point(&x, 1), group);
  }

  const BayesRegressor& regressor(int group) const;
  const ScalarLaw& law(int group) const;
  double p1() const { return p1_; }

 private:
  std::array<BayesRegressor, 2> regressors_;
  std::array<ScalarLaw, 2> laws_;
  double p1_;
};

// p1 may be 0 or 1 (single-group limits); ValidationError outside [0, 1].
AwarePredictor build_aware(std::array<BayesRegressor, 2> regressors,
                           const Cdf& g1, const Cdf& g2, double p1);
AwarePredictor build_aware(std::array<BayesRegressor, 2> regressors,
                           ScalarLaw g1, ScalarLaw g2, double p1);

inline double predict_aware(const AwarePredictor& p, Point x, int group) {
  return p.predict(x, group);
}

struct AffineForm {
  std::vector<double> slope;
  double intercept = 0.0;

  double operator()(Point x) const;
};

// Closed form of g* when X | S=1 ~ N(m1, I), X | S=2 ~ N(m2, 2I) and the
// group regressors are <beta_s, x> + b_s with b_s the group mean of the
// regressor (features centred so that <beta_s, m_s> = 0).
std::pair<AffineForm, AffineForm> gaussian_affine_aware(
    const std::vector<double>& beta1, double b1,
    const std::vector<double>& beta2, double b2, double p1);

using AnyPredictor = std::variant<BayesRegressor, UnawarePredictor, AwarePredictor>;

// Prediction for a member of `group`; unaware predictors ignore the label.
double evaluate(const AnyPredictor& p, Point x, int group);
inline double evaluate(const AnyPredictor& p, double x, int group) {
  return evaluate(p, Point(&x, 1), group);
}

inline bool is_unaware(const AnyPredictor& p) {
  return !std::holds_alternative<AwarePredictor>(p);
}

}  // namespace fairq
