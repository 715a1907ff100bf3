#pragma once

// Adaptive Gauss-Kronrod quadrature. 15-point Kronrod rule with the embedded
// 7-point Gauss rule for the error estimate, bisecting the worst panel first.

#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "censimp/errors.hpp"

namespace censimp {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

namespace detail {

// Nodes/weights of the (G7, K15) pair on [-1, 1], as in QUADPACK dqk15.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
  double a, b;
  double value;   // K15 estimate
  double error;   // |K15 - G7|
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel eval_panel(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double fsum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * fsum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fsum;
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = kronrod * half;
  p.error = std::abs((kronrod - gauss) * half);
  return p;
}

}  // namespace detail

template <typename F>
QuadratureResult integrate_adaptive(F&& f, double a, double b,
                                    double abs_tol = 1e-12, double rel_tol = 1e-8,
                                    int max_subdivisions = 200) {
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<detail::Panel> panels;
  panels.push(detail::eval_panel(f, a, b));
  double total = panels.top().value;
  double total_err = panels.top().error;
  while (total_err > abs_tol && total_err > rel_tol * std::abs(total) &&
         out.subdivisions < max_subdivisions) {
    detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    detail::Panel left = detail::eval_panel(f, worst.a, mid);
    detail::Panel right = detail::eval_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++out.subdivisions;
  }
  out.value = total;
  out.error_estimate = total_err;
  out.converged = total_err <= abs_tol || total_err <= rel_tol * std::abs(total);
  return out;
}

// Integral over [a, infinity) via the substitution x = a + u / (1 - u),
// dx = du / (1 - u)^2, mapping to u in (0, 1).
template <typename F>
QuadratureResult integrate_to_infinity(F&& f, double a,
                                       double abs_tol = 1e-12, double rel_tol = 1e-8,
                                       int max_subdivisions = 200) {
  auto mapped = [&f, a](double u) {
    const double om = 1.0 - u;
    return f(a + u / om) / (om * om);
  };
  return integrate_adaptive(mapped, 0.0, 1.0, abs_tol, rel_tol, max_subdivisions);
}

}  // namespace censimp
