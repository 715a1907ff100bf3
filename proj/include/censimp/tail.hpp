#pragma once

// Parametric and degenerate extensions of the baseline survival estimator
// beyond the largest uncensored time, plus closed-form tail integrals.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "censimp/breslow.hpp"
#include "censimp/data.hpp"
#include "censimp/errors.hpp"
#include "censimp/special.hpp"

namespace censimp {

enum class ExtensionKind { carry_forward, drop_off, exponential, weibull };

inline const char* to_string(ExtensionKind kind) {
  switch (kind) {
    case ExtensionKind::carry_forward: return "carry-forward";
    case ExtensionKind::drop_off: return "drop-off";
    case ExtensionKind::exponential: return "exponential";
    case ExtensionKind::weibull: return "weibull";
  }
  return "?";
}

struct TailExtension {
  ExtensionKind kind = ExtensionKind::weibull;
  std::optional<double> nu;    // shape, S0(t) = exp(-rho t^nu)
  std::optional<double> rho;   // rate
  std::optional<bool> fit_converged;
  // Time where the parametric curve takes over. The fitted Weibull is pinned
  // through the carried baseline value at the largest observed time, so the
  // spliced curve stays flat on (x_tilde, anchor] before the parametric
  // decay begins. Zero means the parametric form applies immediately, which
  // is how manually constructed extensions behave.
  double anchor = 0.0;
};

namespace detail {

// Censored-data Weibull log-likelihood with the rate profiled out by the
// pin rho(nu) = -log S0(x_tilde) / t_anchor^nu, which forces the parametric
// curve through the carried baseline value at the anchor time. The fitted
// shape describes the baseline curve of a proportional hazards model, so each
// record contributes on its own hazard scale exp(lambda'z); multipliers holds
// those factors, all 1 when there are no covariates. Records at w <= 0 carry
// no usable tail information and are skipped.
inline double weibull_profile_loglik(const Dataset& records,
                                     const std::vector<double>& multipliers, double nu,
                                     double t_anchor, double log_s_tilde) {
  const double rho = -log_s_tilde / std::pow(t_anchor, nu);
  if (!(rho > 0.0) || !std::isfinite(rho)) return -std::numeric_limits<double>::infinity();
  const double log_rho_nu = std::log(rho) + std::log(nu);
  double ll = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!(r.w > 0.0)) continue;
    const double wn = std::pow(r.w, nu);
    ll -= multipliers[i] * rho * wn;
    if (r.delta != 0) ll += log_rho_nu + (nu - 1.0) * std::log(r.w);
  }
  return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

// Fits the tail extension beyond the largest uncensored time. For the Weibull
// splice the profiled likelihood runs over all records; pass the Cox
// coefficients so censored contributions enter on their fitted hazard scale.
// An empty lambda_hat treats every record as baseline.
inline TailExtension fit_extension(ExtensionKind kind, const Dataset& records,
                                   const BaselineSurvival& baseline,
                                   const Eigen::VectorXd& lambda_hat = Eigen::VectorXd()) {
  TailExtension ext;
  ext.kind = kind;
  if (kind == ExtensionKind::carry_forward || kind == ExtensionKind::drop_off) return ext;

  const double x_tilde = baseline.x_tilde;
  const double s_tilde = baseline.value_at(x_tilde);
  if (!(x_tilde > 0.0) || s_tilde >= 1.0)
    throw DegenerateTailError("baseline survival has no usable drop at the largest event time");
  const double log_s_tilde = std::log(s_tilde);

  if (kind == ExtensionKind::exponential) {
    ext.nu = 1.0;
    ext.rho = -log_s_tilde / x_tilde;
    ext.anchor = x_tilde;
    ext.fit_converged = true;
    return ext;
  }

  // Weibull: the parametric curve is pinned through the carried baseline
  // value at the largest observed time, censored or not, matching the usual
  // constrained tie-in for completing a survival estimator. When the largest
  // observation is an event this reduces to pinning at x_tilde. The shape
  // maximizes the profiled likelihood, bracketed on a log-spaced grid and
  // refined by golden-section search.
  double anchor = x_tilde;
  for (const auto& r : records) anchor = std::max(anchor, r.w);

  std::vector<double> multipliers(records.size(), 1.0);
  if (lambda_hat.size() > 0)
    for (std::size_t i = 0; i < records.size(); ++i)
      multipliers[i] = std::exp(lambda_hat.dot(records[i].z));

  constexpr double nu_lo = 0.05, nu_hi = 20.0;
  constexpr int grid_points = 50;
  std::vector<double> grid(grid_points);
  const double la = std::log(nu_lo), lb = std::log(nu_hi);
  for (int k = 0; k < grid_points; ++k)
    grid[static_cast<std::size_t>(k)] = std::exp(la + (lb - la) * k / (grid_points - 1));

  int best = -1;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid_points; ++k) {
    const double ll = detail::weibull_profile_loglik(records, multipliers,
                                                     grid[static_cast<std::size_t>(k)],
                                                     anchor, log_s_tilde);
    if (ll > best_ll) {
      best_ll = ll;
      best = k;
    }
  }
  if (best <= 0 || best >= grid_points - 1 || !std::isfinite(best_ll))
    throw WeibullNonConvergenceError();

  double a = grid[static_cast<std::size_t>(best - 1)];
  double b = grid[static_cast<std::size_t>(best + 1)];
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = detail::weibull_profile_loglik(records, multipliers, x1, anchor, log_s_tilde);
  double f2 = detail::weibull_profile_loglik(records, multipliers, x2, anchor, log_s_tilde);
  while (b - a > 1e-10 * (1.0 + b)) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = detail::weibull_profile_loglik(records, multipliers, x1, anchor, log_s_tilde);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = detail::weibull_profile_loglik(records, multipliers, x2, anchor, log_s_tilde);
    }
  }
  const double nu_hat = 0.5 * (a + b);
  const double ll_hat = detail::weibull_profile_loglik(records, multipliers, nu_hat, anchor, log_s_tilde);
  if (!std::isfinite(ll_hat)) throw WeibullNonConvergenceError();

  ext.nu = nu_hat;
  ext.rho = -log_s_tilde / std::pow(anchor, nu_hat);
  ext.anchor = anchor;
  ext.fit_converged = true;
  return ext;
}

// Baseline-scale extension value at t, only valid beyond the largest
// uncensored time.
inline double eval_extension(const TailExtension& ext, const BaselineSurvival& baseline,
                             double t) {
  if (t <= baseline.x_tilde)
    throw OutOfRangeError("extension evaluated at or below the largest uncensored time");
  switch (ext.kind) {
    case ExtensionKind::carry_forward:
      return baseline.value_at(baseline.x_tilde);
    case ExtensionKind::drop_off:
      return 0.0;
    case ExtensionKind::exponential:
    case ExtensionKind::weibull:
      if (t <= ext.anchor) return baseline.value_at(baseline.x_tilde);
      return std::exp(-(*ext.rho) * std::pow(t, *ext.nu));
  }
  return 0.0;
}

// Integral of S0(t)^exponent over [from, upper_cap or infinity), from at or
// beyond the largest uncensored time. Closed forms throughout: exponent is
// absorbed into the rate, the Weibull case reduces to upper incomplete gamma
// differences, and any flat stretch before the anchor is a rectangle.
inline double tail_integral(const TailExtension& ext, const BaselineSurvival& baseline,
                            double from, double exponent,
                            std::optional<double> upper_cap = std::nullopt) {
  const double upper = upper_cap ? *upper_cap : std::numeric_limits<double>::infinity();
  if (upper <= from) return 0.0;

  switch (ext.kind) {
    case ExtensionKind::drop_off:
      return 0.0;
    case ExtensionKind::carry_forward: {
      if (!std::isfinite(upper))
        throw DivergentIntegralError("carry-forward tail has no finite integral to infinity");
      const double level = std::pow(baseline.value_at(baseline.x_tilde), exponent);
      return level * (upper - from);
    }
    case ExtensionKind::exponential: {
      const double rate = exponent * (*ext.rho);
      const double head = std::exp(-rate * from);
      const double tail_v = std::isfinite(upper) ? std::exp(-rate * upper) : 0.0;
      return (head - tail_v) / rate;
    }
    case ExtensionKind::weibull: {
      double total = 0.0;
      double lo = from;
      if (lo < ext.anchor) {
        // Flat stretch between the last event and the splice point: the curve
        // carries the baseline value until the parametric decay takes over.
        const double level = std::pow(baseline.value_at(baseline.x_tilde), exponent);
        const double flat_hi = std::min(ext.anchor, upper);
        total += level * (flat_hi - lo);
        lo = ext.anchor;
      }
      if (upper > lo) {
        const double nu = *ext.nu;
        const double rate = exponent * (*ext.rho);
        const double s = 1.0 / nu;
        const double g_lo = upper_incomplete_gamma(s, rate * std::pow(lo, nu));
        const double g_upper =
            std::isfinite(upper) ? upper_incomplete_gamma(s, rate * std::pow(upper, nu)) : 0.0;
        total += std::pow(rate, -s) * s * (g_lo - g_upper);
      }
      return total;
    }
  }
  return 0.0;
}

}  // namespace censimp
