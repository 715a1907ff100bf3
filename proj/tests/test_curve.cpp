#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "censimp/breslow.hpp"
#include "censimp/cox.hpp"
#include "censimp/curve.hpp"
#include "censimp/rng.hpp"

using namespace censimp;

namespace {

BaselineSurvival step_baseline(std::vector<double> knots, std::vector<double> values) {
  BaselineSurvival base;
  base.knots = std::move(knots);
  base.values = std::move(values);
  base.event_flags.assign(base.knots.size(), 1);
  base.x_tilde = base.knots.back();
  base.eval_values = base.values;
  return base;
}

SurvivalCurve make_curve(BaselineSurvival base, ExtensionKind kind) {
  SurvivalCurve curve;
  curve.baseline = std::move(base);
  curve.lambda_hat = Eigen::VectorXd(0);
  curve.extension.kind = kind;
  if (kind == ExtensionKind::exponential || kind == ExtensionKind::weibull) {
    curve.extension.nu = 1.0;
    curve.extension.rho =
        -std::log(curve.baseline.value_at(curve.baseline.x_tilde)) / curve.baseline.x_tilde;
  }
  return curve;
}

const Eigen::VectorXd kNoCovariates = Eigen::VectorXd(0);

}  // namespace

TEST_CASE("trapezoid rule over knots reproduces the hand sum") {
  const BaselineSurvival base = step_baseline({1.0, 2.0, 3.0}, {0.9, 0.6, 0.2});
  CHECK(trapezoid_over_knots(base, 1.0, 1.0).value ==
        Catch::Approx(0.5 * ((0.6 + 0.9) + (0.2 + 0.6))).epsilon(1e-15));
  CHECK(trapezoid_over_knots(base, 1.0, 1.0).value == Catch::Approx(1.15).epsilon(1e-15));
  // Truncation: starting past the last knot gives an empty sum.
  CHECK(trapezoid_over_knots(base, 1.0, 3.5).value == 0.0);
  // Starting between knots drops the partial leading trapezoid entirely.
  CHECK(trapezoid_over_knots(base, 1.0, 1.5).value ==
        Catch::Approx(0.5 * (0.2 + 0.6)).epsilon(1e-15));
  const BaselineSurvival single = step_baseline({2.0}, {0.4});
  CHECK(trapezoid_over_knots(single, 1.0, 0.0).value == 0.0);
}

TEST_CASE("trapezoid rule respects the survival exponent") {
  const BaselineSurvival base = step_baseline({1.0, 2.0}, {0.9, 0.6});
  const double e = 2.0;
  CHECK(trapezoid_over_knots(base, e, 0.0).value ==
        Catch::Approx(0.5 * (0.36 + 0.81)).epsilon(1e-15));
}

TEST_CASE("step region integration is exact for piecewise-constant survival") {
  const SurvivalCurve drop = make_curve(step_baseline({1.0, 2.0}, {0.9, 0.6}),
                                        ExtensionKind::drop_off);
  const IntegralResult r = integrate_survival(drop, kNoCovariates, 1.0);
  CHECK(r.value == Catch::Approx(0.9).epsilon(1e-15));
  CHECK(r.abs_error_estimate == 0.0);

  // Starting below the first knot uses survival 1 on the leading stretch.
  CHECK(integrate_survival(drop, kNoCovariates, 0.5).value ==
        Catch::Approx(0.5 + 0.9).epsilon(1e-15));
  // Starting inside a step uses the running value for the partial rectangle.
  CHECK(integrate_survival(drop, kNoCovariates, 1.25).value ==
        Catch::Approx(0.75 * 0.9).epsilon(1e-15));
}

TEST_CASE("rectangles plus exponential tail match the worked value") {
  const SurvivalCurve curve = make_curve(step_baseline({1.0, 2.0}, {0.9, 0.6}),
                                         ExtensionKind::exponential);
  const double rate = -std::log(0.6) / 2.0;
  const double expected = 0.9 + std::exp(-rate * 2.0) / rate;
  const IntegralResult r = integrate_survival(curve, kNoCovariates, 1.0);
  CHECK(r.value == Catch::Approx(expected).epsilon(1e-12));
  CHECK(r.value == Catch::Approx(3.2491).margin(5e-4));
}

TEST_CASE("a unit exponential curve integrates to one from zero") {
  SurvivalCurve curve;
  curve.baseline.knots = {0.0};
  curve.baseline.values = {1.0};
  curve.baseline.event_flags = {1};
  curve.baseline.x_tilde = 0.0;
  curve.baseline.eval_values = {1.0};
  curve.lambda_hat = Eigen::VectorXd(0);
  curve.extension.kind = ExtensionKind::exponential;
  curve.extension.nu = 1.0;
  curve.extension.rho = 1.0;
  CHECK(integrate_survival(curve, kNoCovariates, 0.0).value ==
        Catch::Approx(1.0).margin(1e-8));
  CHECK(integrate_survival(curve, kNoCovariates, 2.0).value ==
        Catch::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("carry-forward tails diverge without a cap and integrate linearly with one") {
  SurvivalCurve curve = make_curve(step_baseline({1.0, 2.0}, {0.9, 0.6}),
                                   ExtensionKind::carry_forward);
  CHECK_THROWS_AS(integrate_survival(curve, kNoCovariates, 1.0), DivergentIntegralError);
  curve.upper_cap = 10.0;
  CHECK(integrate_survival(curve, kNoCovariates, 1.0).value ==
        Catch::Approx(0.9 + 0.6 * 8.0).epsilon(1e-12));
}

TEST_CASE("covariates enter through the exponentiated linear predictor") {
  Rng rng(88);
  Dataset data(40);
  for (auto& rec : data) {
    rec.z = Eigen::VectorXd(1);
    rec.z(0) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    rec.w = rng.weibull(1.0, 0.5 + 0.5 * rec.z(0));
    rec.delta = rng.bernoulli(0.8) ? 1 : 0;
  }
  const CoxFit fit = fit_cox(data);
  const BaselineSurvival base = breslow_baseline(data, fit);
  SurvivalCurve curve;
  curve.baseline = base;
  curve.lambda_hat = fit.lambda_hat;
  curve.extension = fit_extension(ExtensionKind::exponential, data, base);

  Eigen::VectorXd z1(1);
  z1 << 1.0;
  const double t = base.x_tilde * 0.5;
  const double e = std::exp(fit.lambda_hat(0));
  CHECK(eval_survival(curve, t, z1) ==
        Catch::Approx(std::pow(base.value_at(t), e)).epsilon(1e-12));

  Eigen::VectorXd bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(eval_survival(curve, t, bad), DimensionMismatchError);
  CHECK_THROWS_AS(integrate_survival(curve, bad, 0.0), DimensionMismatchError);
}

TEST_CASE("integration is additive across a split point inside the step region") {
  Rng rng(421);
  for (int rep = 0; rep < 20; ++rep) {
    Dataset data(30);
    for (auto& rec : data) {
      rec.z = Eigen::VectorXd(0);
      rec.w = rng.weibull(0.9, 1.0);
      rec.delta = rng.bernoulli(0.7) ? 1 : 0;
    }
    bool any_event = false;
    for (const auto& rec : data) any_event |= rec.delta == 1;
    if (!any_event) continue;
    const SurvivalCurve curve =
        make_curve(breslow_baseline(data, fit_cox(data)), ExtensionKind::exponential);
    const double a = rng.uniform(0.0, curve.baseline.x_tilde);
    const double b = rng.uniform(a, curve.baseline.x_tilde);
    const double whole = integrate_survival(curve, kNoCovariates, a).value;
    const double tail = integrate_survival(curve, kNoCovariates, b).value;
    // The [a, b] piece, evaluated through the same step function.
    SurvivalCurve capped = curve;
    capped.extension.kind = ExtensionKind::drop_off;
    capped.upper_cap = b;
    const double piece = integrate_survival(capped, kNoCovariates, a).value -
                         integrate_survival(capped, kNoCovariates, b).value;
    CHECK(whole == Catch::Approx(piece + tail).margin(1e-10));
  }
}

TEST_CASE("integration is non-increasing in the lower limit") {
  const SurvivalCurve curve = make_curve(step_baseline({0.5, 1.5, 2.5}, {0.8, 0.5, 0.3}),
                                         ExtensionKind::exponential);
  double prev = integrate_survival(curve, kNoCovariates, 0.0).value;
  for (double from = 0.25; from < 5.0; from += 0.25) {
    const double cur = integrate_survival(curve, kNoCovariates, from).value;
    CHECK(cur <= prev + 1e-14);
    prev = cur;
  }
}

TEST_CASE("refining the knot grid without changing the step function changes nothing") {
  const SurvivalCurve coarse = make_curve(step_baseline({1.0, 2.0}, {0.9, 0.6}),
                                          ExtensionKind::exponential);
  // Same step function sampled on a finer grid; inserted knots repeat the running value.
  const SurvivalCurve fine = make_curve(
      step_baseline({1.0, 1.25, 1.5, 1.75, 2.0}, {0.9, 0.9, 0.9, 0.9, 0.6}),
      ExtensionKind::exponential);
  for (double from : {0.0, 0.3, 1.0, 1.4, 1.9}) {
    CHECK(integrate_survival(coarse, kNoCovariates, from).value ==
          Catch::Approx(integrate_survival(fine, kNoCovariates, from).value)
              .epsilon(1e-13));
  }
}

TEST_CASE("both integral flavors sit inside the crude bounds") {
  Rng rng(777);
  for (int rep = 0; rep < 15; ++rep) {
    Dataset data(25);
    for (auto& rec : data) {
      rec.z = Eigen::VectorXd(0);
      rec.w = rng.weibull(1.2, 2.0);
      rec.delta = rng.bernoulli(0.6) ? 1 : 0;
    }
    bool any_event = false;
    for (const auto& rec : data) any_event |= rec.delta == 1;
    if (!any_event) continue;
    const BaselineSurvival base = breslow_baseline(data, fit_cox(data));
    SurvivalCurve drop;
    drop.baseline = base;
    drop.lambda_hat = Eigen::VectorXd(0);
    drop.extension.kind = ExtensionKind::drop_off;

    double w_max = 0.0;
    for (const auto& rec : data) w_max = std::max(w_max, rec.w);
    const double from = rng.uniform(0.0, base.x_tilde);
    const double s_from = eval_survival(drop, from, kNoCovariates);
    const double upper = (w_max - from) * s_from;
    const double rect = integrate_survival(drop, kNoCovariates, from).value;
    const double trap = trapezoid_over_knots(base, 1.0, from).value;
    CHECK(rect >= 0.0);
    CHECK(trap >= 0.0);
    CHECK(rect <= upper + 1e-12);
    CHECK(trap <= upper + 1e-12);
  }
}
