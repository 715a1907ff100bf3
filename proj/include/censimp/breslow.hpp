#pragma once

// Breslow baseline survival estimator for a fitted proportional hazards
// model. Knots are the distinct observed times; the cumulative hazard jumps
// at each knot by (events at knot) / (risk-set sum of exp(lambda'z)).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "censimp/cox.hpp"
#include "censimp/data.hpp"
#include "censimp/errors.hpp"

namespace censimp {

enum class Interpolation { carry_forward, mean };

struct BaselineSurvival {
  std::vector<double> knots;        // distinct observed times, ascending
  std::vector<double> values;       // S0 at each knot, raw step estimate
  std::vector<char> event_flags;    // any uncensored observation at the knot
  double x_tilde = 0.0;             // largest uncensored time
  Interpolation interpolation = Interpolation::carry_forward;
  std::vector<double> eval_values;  // knot values after interpolation rule

  // Baseline survival at t: 1 before the first knot, else the value at the
  // last knot not exceeding t. Mean interpolation replaces the value at a
  // censored knot by the average of the surrounding event-knot values.
  double value_at(double t) const {
    if (knots.empty() || t < knots.front()) return 1.0;
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    const auto k = static_cast<std::size_t>(it - knots.begin()) - 1;
    return eval_values[k];
  }
};

inline BaselineSurvival breslow_baseline(const Dataset& records, const CoxFit& fit,
                                         Interpolation interpolation = Interpolation::carry_forward) {
  const auto n = records.size();
  bool any_event = false;
  for (const auto& r : records) any_event = any_event || (r.delta != 0);
  if (!any_event) throw NoEventsError();

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&records](std::size_t a, std::size_t b) { return records[a].w < records[b].w; });

  Eigen::VectorXd risk_weight(n);
  for (std::size_t i = 0; i < n; ++i)
    risk_weight(static_cast<Eigen::Index>(i)) = std::exp(fit.lambda_hat.dot(records[i].z));

  BaselineSurvival out;
  out.interpolation = interpolation;

  // Suffix sums of the risk weights give the at-risk denominator at each
  // distinct time in one ascending pass.
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;)
    suffix[i] = suffix[i + 1] + risk_weight(static_cast<Eigen::Index>(order[i]));

  double cum_hazard = 0.0;
  std::size_t idx = 0;
  while (idx < n) {
    const double t = records[order[idx]].w;
    const double at_risk = suffix[idx];
    int d = 0;
    while (idx < n && records[order[idx]].w == t) {
      d += records[order[idx]].delta;
      ++idx;
    }
    cum_hazard += static_cast<double>(d) / at_risk;
    out.knots.push_back(t);
    out.values.push_back(std::exp(-cum_hazard));
    out.event_flags.push_back(d > 0 ? 1 : 0);
    if (d > 0) out.x_tilde = t;
  }

  out.eval_values = out.values;
  if (interpolation == Interpolation::mean) {
    const auto m = out.knots.size();
    // Next event-knot value looking rightward; none means carry forward.
    std::vector<double> next_event(m, -1.0);
    double seen = -1.0;
    for (std::size_t k = m; k-- > 0;) {
      next_event[k] = seen;
      if (out.event_flags[k]) seen = out.values[k];
    }
    double prev_event = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (out.event_flags[k]) {
        prev_event = out.values[k];
      } else if (next_event[k] >= 0.0) {
        out.eval_values[k] = 0.5 * (prev_event + next_event[k]);
      }
    }
  }
  return out;
}

}  // namespace censimp
