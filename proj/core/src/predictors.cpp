#include "fairq/predictors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fairq/errors.hpp"
#include "fairq/parallel.hpp"

namespace fairq {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void require_group(int group) {
  if (group != 1 && group != 2) {
    std::ostringstream msg;
    msg << "unknown group label " << group << " (expected 1 or 2)";
    throw ValidationError(msg.str());
  }
}

Cdf pushforward_checked(const DensityGrid1D& normalized,
                        std::span<const double> images, double epsilon_mass,
                        const char* which) {
  const auto masses = cell_masses(normalized.grid(), normalized.values());
  for (std::size_t c = 0; c < masses.size(); ++c) {
    if (images[c] == images[c + 1] && masses[c] > epsilon_mass) {
      std::ostringstream msg;
      msg << "f* is constant on a cell carrying mass " << masses[c] << " of P"
          << which << " near x=" << normalized.grid().node(c)
          << "; push-forward has an atom";
      throw AssumptionViolation(msg.str());
    }
  }
  return pushforward_cells(images, masses);
}

}  // namespace

// ------------------------------------------------------ BayesRegressor

BayesRegressor BayesRegressor::affine(std::vector<double> beta,
                                      double intercept) {
  if (beta.empty()) throw ValidationError("affine regressor needs a slope");
  for (double b : beta) {
    if (!std::isfinite(b)) throw ValidationError("affine slope not finite");
  }
  if (!std::isfinite(intercept)) throw ValidationError("intercept not finite");
  return BayesRegressor(Affine{std::move(beta), intercept});
}

BayesRegressor BayesRegressor::constant(double c, std::size_t dimension) {
  return affine(std::vector<double>(dimension, 0.0), c);
}

BayesRegressor BayesRegressor::logistic(double a) {
  if (!std::isfinite(a)) throw ValidationError("logistic slope not finite");
  return BayesRegressor(Logistic{a});
}

BayesRegressor BayesRegressor::tabulated(GridGeometry grid,
                                         std::vector<double> values) {
  if (values.size() != grid.n_nodes()) {
    throw GeometryError("tabulated regressor must cover every grid node");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("tabulated f* not finite");
  }
  return BayesRegressor(Tabulated{grid, std::move(values)});
}

std::size_t BayesRegressor::dimension() const {
  if (const auto* a = std::get_if<Affine>(&form_)) return a->beta.size();
  return 1;
}

double BayesRegressor::operator()(Point x) const {
  if (x.size() != dimension()) {
    throw DomainError("point dimension does not match regressor");
  }
  return std::visit(
      [&](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Affine>) {
          double s = f.intercept;
          for (std::size_t k = 0; k < x.size(); ++k) s += f.beta[k] * x[k];
          return s;
        } else if constexpr (std::is_same_v<F, Logistic>) {
          return 1.0 / (1.0 + std::exp(f.a * x[0]));
        } else {
          return interpolate(f.grid, f.values, x[0]);
        }
      },
      form_);
}

// -------------------------------------------------- unaware predictors

SignedPushforwards signed_pushforwards(const BayesRegressor& f_star,
                                       const JordanDecomposition& jd) {
  if (f_star.dimension() != 1) {
    throw ValidationError("grid decomposition needs a one-dimensional f*");
  }
  auto [plus, mass] = normalize(jd.mu_plus, jd.epsilon_mass);
  auto [minus, mass_minus] = normalize(jd.mu_minus, jd.epsilon_mass);
  (void)mass_minus;
  const auto& grid = jd.mu_plus.grid();
  std::vector<double> images(grid.n_nodes());
  for (std::size_t i = 0; i < images.size(); ++i) {
    images[i] = f_star(grid.node(i));
    if (!std::isfinite(images[i])) {
      throw NumericError("f* is not finite on the working range");
    }
  }
  Cdf f_plus = pushforward_checked(plus, images, jd.epsilon_mass, "mu+");
  Cdf f_minus = pushforward_checked(minus, images, jd.epsilon_mass, "mu-");
  return SignedPushforwards{std::move(f_plus), std::move(f_minus), mass};
}

QuantileFn build_qstar(const Cdf& plus, const Cdf& minus) {
  return barycenter_quantile(generalized_inverse(plus),
                             generalized_inverse(minus), 0.5);
}

QuantileFn random_quantile(std::uint64_t seed, std::size_t knots, double lo,
                           double hi) {
  if (knots < 2 || !(hi > lo)) {
    throw ValidationError("random quantile needs hi > lo and >= 2 knots");
  }
  auto rng = rng_for_partition(seed, 0x9a11, 0);
  std::exponential_distribution<double> step(1.0);
  std::vector<double> values(knots, 0.0);
  for (std::size_t k = 1; k < knots; ++k) values[k] = values[k - 1] + step(rng);
  const double total = values.back();
  std::vector<double> levels(knots);
  for (std::size_t k = 0; k < knots; ++k) {
    levels[k] = static_cast<double>(k) / static_cast<double>(knots - 1);
    values[k] = lo + (hi - lo) * values[k] / total;
  }
  levels.back() = 1.0;
  values.back() = hi;
  return QuantileFn(std::move(levels), std::move(values));
}

UnawarePredictor::UnawarePredictor(BayesRegressor f_star,
                                   RegionClassifier classifier, Cdf plus,
                                   Cdf minus, QuantileFn q)
    : f_star_(std::move(f_star)),
      fair_(Fair{std::move(classifier), std::move(plus), std::move(minus),
                 std::move(q)}) {
  if (fair_->classifier.dimension() != f_star_.dimension()) {
    throw ValidationError("classifier and f* differ in dimension");
  }
}

UnawarePredictor UnawarePredictor::passthrough(BayesRegressor f_star) {
  return UnawarePredictor(std::move(f_star));
}

std::pair<Region, double> UnawarePredictor::predict_with_region(Point x) const {
  const double base = f_star_(x);
  if (!fair_) return {Region::Neutral, base};
  const Region r = fair_->classifier.classify(x);
  switch (r) {
    case Region::Plus:
      return {r, fair_->q(fair_->plus(base))};
    case Region::Minus:
      return {r, fair_->q(fair_->minus(base))};
    case Region::Neutral:
      break;
  }
  return {Region::Neutral, base};
}

double UnawarePredictor::predict(Point x) const {
  return predict_with_region(x).second;
}

const RegionClassifier& UnawarePredictor::classifier() const {
  if (!fair_) throw ValidationError("passthrough predictor has no classifier");
  return fair_->classifier;
}
const Cdf& UnawarePredictor::f_plus() const {
  if (!fair_) throw ValidationError("passthrough predictor has no F+");
  return fair_->plus;
}
const Cdf& UnawarePredictor::f_minus() const {
  if (!fair_) throw ValidationError("passthrough predictor has no F-");
  return fair_->minus;
}
const QuantileFn& UnawarePredictor::q() const {
  if (!fair_) throw ValidationError("passthrough predictor has no Q");
  return fair_->q;
}

UnawarePredictor build_unaware(const BayesRegressor& f_star,
                               RegionClassifier classifier,
                               const SignedPushforwards& pushforwards,
                               const QChoice& q) {
  QuantileFn chosen = std::holds_alternative<QStar>(q)
                          ? build_qstar(pushforwards.plus, pushforwards.minus)
                          : std::get<QuantileFn>(q);
  return UnawarePredictor(f_star, std::move(classifier), pushforwards.plus,
                          pushforwards.minus, std::move(chosen));
}

UnawarePredictor build_unaware(const BayesRegressor& f_star,
                               const JordanDecomposition& jd,
                               const QChoice& q) {
  if (jd.degenerate()) return UnawarePredictor::passthrough(f_star);
  return build_unaware(f_star, jd.classifier, signed_pushforwards(f_star, jd),
                       q);
}

// ---------------------------------------------------- aware predictor

AwarePredictor::AwarePredictor(std::array<BayesRegressor, 2> regressors,
                               std::array<ScalarLaw, 2> laws, double p1)
    : regressors_(std::move(regressors)), laws_(std::move(laws)), p1_(p1) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) {
    throw ValidationError("group prior p1 must lie in [0, 1]");
  }
}

const BayesRegressor& AwarePredictor::regressor(int group) const {
  require_group(group);
  return regressors_[group - 1];
}

const ScalarLaw& AwarePredictor::law(int group) const {
  require_group(group);
  return laws_[group - 1];
}

double AwarePredictor::predict(Point x, int group) const {
  require_group(group);
  const double score = regressors_[group - 1](x);
  const double u = laws_[group - 1].cdf(score);
  const double p2 = 1.0 - p1_;
  double out = 0.0;
  if (p1_ > 0.0) out += p1_ * laws_[0].quantile(u);
  if (p2 > 0.0) out += p2 * laws_[1].quantile(u);
  return out;
}

AwarePredictor build_aware(std::array<BayesRegressor, 2> regressors,
                           ScalarLaw g1, ScalarLaw g2, double p1) {
  return AwarePredictor(std::move(regressors), {std::move(g1), std::move(g2)},
                        p1);
}

AwarePredictor build_aware(std::array<BayesRegressor, 2> regressors,
                           const Cdf& g1, const Cdf& g2, double p1) {
  return build_aware(std::move(regressors), ScalarLaw::tabulated(g1),
                     ScalarLaw::tabulated(g2), p1);
}

double AffineForm::operator()(Point x) const {
  if (x.size() != slope.size()) throw DomainError("dimension mismatch");
  double s = intercept;
  for (std::size_t k = 0; k < x.size(); ++k) s += slope[k] * x[k];
  return s;
}

std::pair<AffineForm, AffineForm> gaussian_affine_aware(
    const std::vector<double>& beta1, double b1,
    const std::vector<double>& beta2, double b2, double p1) {
  if (beta1.size() != beta2.size() || beta1.empty()) {
    throw ValidationError("group slopes must share a non-zero dimension");
  }
  if (!(p1 >= 0.0 && p1 <= 1.0)) {
    throw ValidationError("group prior p1 must lie in [0, 1]");
  }
  const double n1 = norm2(beta1);
  const double n2 = norm2(beta2);
  if (!(n1 > 0.0) || !(n2 > 0.0)) {
    throw ValidationError("group slopes must be non-zero");
  }
  const double p2 = 1.0 - p1;
  const double k1 = p1 + p2 * std::numbers::sqrt2 * n2 / n1;
  const double k2 = p2 + p1 * n1 / (std::numbers::sqrt2 * n2);
  const double c = p1 * b1 + p2 * b2;
  AffineForm g1{beta1, c};
  AffineForm g2{beta2, c};
  for (double& v : g1.slope) v *= k1;
  for (double& v : g2.slope) v *= k2;
  return {std::move(g1), std::move(g2)};
}

double evaluate(const AnyPredictor& p, Point x, int group) {
  require_group(group);
  return std::visit(
      [&](const auto& pred) -> double {
        using P = std::decay_t<decltype(pred)>;
        if constexpr (std::is_same_v<P, BayesRegressor>) {
          return pred(x);
        } else if constexpr (std::is_same_v<P, UnawarePredictor>) {
          return pred.predict(x);
        } else {
          return pred.predict(x, group);
        }
      },
      p);
}

}  // namespace fairq
