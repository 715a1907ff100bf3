#pragma once

// Conditional survival curve S(t|z) = S0(t)^exp(lambda'z) assembled from the
// step baseline and a tail extension, with both integration schemes: the
// knot-truncated trapezoid sum and the exact step-plus-tail integral.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

#include "censimp/breslow.hpp"
#include "censimp/errors.hpp"
#include "censimp/tail.hpp"

namespace censimp {

struct SurvivalCurve {
  BaselineSurvival baseline;
  Eigen::VectorXd lambda_hat;
  TailExtension extension;
  std::optional<double> upper_cap;
};

enum class IntegralMethod { trapezoid_knots, exact_step_plus_tail };

struct IntegralResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  IntegralMethod method = IntegralMethod::exact_step_plus_tail;
  int subdivisions = 0;
};

inline double eval_survival(const SurvivalCurve& curve, double t, const Eigen::VectorXd& z) {
  if (z.size() != curve.lambda_hat.size())
    throw DimensionMismatchError("covariate vector length does not match the fitted model");
  const double exponent = std::exp(curve.lambda_hat.dot(z));
  const double s0 = (t <= curve.baseline.x_tilde)
                        ? curve.baseline.value_at(t)
                        : eval_extension(curve.extension, curve.baseline, t);
  return std::pow(s0, exponent);
}

// Trapezoidal rule over the observed knots, truncated at the largest knot:
// (1/2) sum over consecutive knot pairs with W(j) >= from of
// (S0(W(j))^e + S0(W(j+1))^e)(W(j+1) - W(j)).
inline IntegralResult trapezoid_over_knots(const BaselineSurvival& baseline, double exponent,
                                           double from) {
  IntegralResult out;
  out.method = IntegralMethod::trapezoid_knots;
  const auto& knots = baseline.knots;
  const auto& vals = baseline.eval_values;
  const auto m = knots.size();
  auto it = std::lower_bound(knots.begin(), knots.end(), from);
  for (auto j = static_cast<std::size_t>(it - knots.begin()); j + 1 < m; ++j) {
    out.value += 0.5 * (std::pow(vals[j], exponent) + std::pow(vals[j + 1], exponent)) *
                 (knots[j + 1] - knots[j]);
  }
  return out;
}

// Exact integral of the conditional survival curve from `from` to the
// curve's cap (infinity when unset). The step region is a finite sum of
// rectangles; the region past the largest uncensored time is the extension's
// closed-form tail integral.
inline IntegralResult integrate_survival(const SurvivalCurve& curve, const Eigen::VectorXd& z,
                                         double from) {
  if (z.size() != curve.lambda_hat.size())
    throw DimensionMismatchError("covariate vector length does not match the fitted model");
  const double exponent = std::exp(curve.lambda_hat.dot(z));
  const double upper =
      curve.upper_cap ? *curve.upper_cap : std::numeric_limits<double>::infinity();

  IntegralResult out;
  out.method = IntegralMethod::exact_step_plus_tail;
  if (upper <= from) return out;

  const BaselineSurvival& b = curve.baseline;
  const double step_end = std::min(b.x_tilde, upper);
  if (from < step_end) {
    double pos = from;
    double cur = std::pow(b.value_at(from), exponent);
    auto it = std::upper_bound(b.knots.begin(), b.knots.end(), from);
    for (auto k = static_cast<std::size_t>(it - b.knots.begin());
         k < b.knots.size() && b.knots[k] <= step_end; ++k) {
      out.value += cur * (b.knots[k] - pos);
      pos = b.knots[k];
      cur = std::pow(b.eval_values[k], exponent);
    }
    out.value += cur * (step_end - pos);
  }
  if (upper > b.x_tilde) {
    out.value += tail_integral(curve.extension, b, std::max(from, b.x_tilde), exponent,
                               curve.upper_cap);
  }
  return out;
}

}  // namespace censimp
