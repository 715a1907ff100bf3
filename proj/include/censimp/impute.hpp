#pragma once

// Conditional-mean imputation of right-censored covariates. The censored
// value w is replaced by E(X | X > w, z) = w + (integral of S(x|z) from w
// up) / S(w|z), with the integral either truncated at the largest observed
// knot (trapezoid over knots, the pre-existing approach) or carried to
// infinity through a tail extension.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "censimp/breslow.hpp"
#include "censimp/cox.hpp"
#include "censimp/curve.hpp"
#include "censimp/data.hpp"
#include "censimp/errors.hpp"
#include "censimp/tail.hpp"

namespace censimp {

enum class Approach { extrapolated, non_extrapolated };

inline const char* to_string(Approach a) {
  return a == Approach::extrapolated ? "extrapolated" : "non-extrapolated";
}

struct ImputationConfig {
  Approach approach = Approach::extrapolated;
  ExtensionKind extension_kind = ExtensionKind::weibull;
  Interpolation interpolation = Interpolation::carry_forward;
  std::optional<double> upper_cap;
  // Relabel the largest observed w as an event before fitting, so the
  // truncated estimator behaves as if the tail were observed. Unset means:
  // true for the non-extrapolated approach without covariates, else false.
  std::optional<bool> treat_max_as_event;

  bool resolved_treat_max_as_event(Eigen::Index p) const {
    if (treat_max_as_event) return *treat_max_as_event;
    return approach == Approach::non_extrapolated && p == 0;
  }
};

struct ImputationDiagnostic {
  bool imputed = false;
  double conditional_mean = std::numeric_limits<double>::quiet_NaN();
  double survival_at_w = std::numeric_limits<double>::quiet_NaN();
  double integral_value = std::numeric_limits<double>::quiet_NaN();
  bool used_fallback_extension = false;
  bool w_beyond_x_tilde = false;
  bool zero_integral = false;
  std::string error;  // empty when the record imputed cleanly
};

struct ImputedDataset {
  Dataset records;
  std::vector<ImputationDiagnostic> diagnostics;
  CoxFit cox;
  SurvivalCurve curve;
  bool used_fallback_extension = false;
};

inline double conditional_mean(const SurvivalCurve& curve, double w, const Eigen::VectorXd& z,
                               const ImputationConfig& config) {
  const double survival = eval_survival(curve, w, z);
  if (!(survival > 0.0))
    throw ZeroSurvivalError("survival at the censored value is zero, conditional mean undefined");
  double integral;
  if (config.approach == Approach::non_extrapolated) {
    const double exponent = std::exp(curve.lambda_hat.dot(z));
    integral = trapezoid_over_knots(curve.baseline, exponent, w).value;
  } else {
    integral = integrate_survival(curve, z, w).value;
  }
  return w + integral / survival;
}

inline ImputedDataset impute_dataset(const Dataset& records, const ImputationConfig& config) {
  const Eigen::Index p = records.empty() ? 0 : records.front().z.size();
  const bool relabel_max = config.resolved_treat_max_as_event(p);

  Dataset fit_records = records;
  std::vector<char> relabeled(records.size(), 0);
  if (relabel_max && !records.empty()) {
    double max_w = -std::numeric_limits<double>::infinity();
    for (const auto& r : records) max_w = std::max(max_w, r.w);
    for (std::size_t i = 0; i < fit_records.size(); ++i) {
      if (fit_records[i].w == max_w && fit_records[i].delta == 0) {
        fit_records[i].delta = 1;
        relabeled[i] = 1;
      }
    }
  }

  ImputedDataset out;
  out.records = records;
  out.diagnostics.resize(records.size());

  out.cox = fit_cox(fit_records);
  out.curve.baseline = breslow_baseline(fit_records, out.cox, config.interpolation);
  out.curve.lambda_hat = out.cox.lambda_hat;
  out.curve.upper_cap = config.upper_cap;
  if (config.approach == Approach::extrapolated) {
    try {
      out.curve.extension =
          fit_extension(config.extension_kind, fit_records, out.curve.baseline,
                        out.cox.lambda_hat);
    } catch (const WeibullNonConvergenceError&) {
      out.curve.extension =
          fit_extension(ExtensionKind::exponential, fit_records, out.curve.baseline);
      out.used_fallback_extension = true;
    }
  } else {
    // The pre-existing approach evaluates Breslow's estimator as-is past the
    // last event, which is exactly the carry-forward extension.
    out.curve.extension = fit_extension(ExtensionKind::carry_forward, fit_records,
                                        out.curve.baseline);
  }

  // With covariates, the truncated approach integrates one pooled table over
  // all observed values: each observed value enters at the hazard scale of
  // the subject who contributed it, and only the denominator conditions on
  // the subject being imputed. Suffix sums make every lookup O(log m).
  // Without covariates the table collapses to the plain baseline trapezoid.
  std::vector<double> pooled_suffix;
  if (config.approach == Approach::non_extrapolated && p > 0) {
    const auto& knots = out.curve.baseline.knots;
    const auto& vals = out.curve.baseline.eval_values;
    const std::size_t m = knots.size();
    std::vector<double> sv(m, 0.0);
    std::vector<char> seen(m, 0);
    for (const auto& r : records) {
      const auto it = std::lower_bound(knots.begin(), knots.end(), r.w);
      if (it == knots.end() || *it != r.w) continue;
      const auto j = static_cast<std::size_t>(it - knots.begin());
      if (seen[j]) continue;
      seen[j] = 1;
      sv[j] = std::pow(vals[j], std::exp(out.cox.lambda_hat.dot(r.z)));
    }
    pooled_suffix.assign(m, 0.0);
    for (std::size_t j = m; j > 1; --j)
      pooled_suffix[j - 2] =
          pooled_suffix[j - 1] + 0.5 * (sv[j - 2] + sv[j - 1]) * (knots[j - 1] - knots[j - 2]);
  }

  std::size_t n_targets = 0, n_failed = 0;
  std::exception_ptr first_error;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& diag = out.diagnostics[i];
    diag.used_fallback_extension = out.used_fallback_extension;
    if (records[i].delta != 0 || relabeled[i]) continue;
    ++n_targets;
    diag.w_beyond_x_tilde = records[i].w > out.curve.baseline.x_tilde;
    try {
      diag.survival_at_w = eval_survival(out.curve, records[i].w, records[i].z);
      if (!(diag.survival_at_w > 0.0))
        throw ZeroSurvivalError(
            "survival at the censored value is zero, conditional mean undefined");
      if (config.approach == Approach::non_extrapolated && p > 0) {
        const auto& knots = out.curve.baseline.knots;
        const auto it = std::lower_bound(knots.begin(), knots.end(), records[i].w);
        const auto j = static_cast<std::size_t>(it - knots.begin());
        diag.integral_value = j < pooled_suffix.size() ? pooled_suffix[j] : 0.0;
      } else if (config.approach == Approach::non_extrapolated) {
        const double exponent = std::exp(out.curve.lambda_hat.dot(records[i].z));
        diag.integral_value =
            trapezoid_over_knots(out.curve.baseline, exponent, records[i].w).value;
      } else {
        diag.integral_value = integrate_survival(out.curve, records[i].z, records[i].w).value;
      }
      diag.conditional_mean = records[i].w + diag.integral_value / diag.survival_at_w;
      diag.zero_integral = diag.integral_value == 0.0;
      diag.imputed = true;
      out.records[i].w = diag.conditional_mean;
    } catch (const Error& e) {
      diag.error = e.what();
      if (!first_error) first_error = std::current_exception();
      ++n_failed;
    }
  }
  if (n_targets > 0 && n_failed == n_targets) std::rethrow_exception(first_error);
  return out;
}

}  // namespace censimp
