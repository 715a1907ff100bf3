#pragma once

// Proportional hazards fit by Newton-Raphson on the partial log-likelihood,
// Breslow convention for tied observation times.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "censimp/data.hpp"
#include "censimp/errors.hpp"

namespace censimp {

struct CoxFit {
  Eigen::VectorXd lambda_hat;
  double loglik = 0.0;
  int n_iter = 0;
  bool converged = false;
};

namespace detail {

// One pass over the data at a fixed coefficient vector. Walks observation
// times from largest to smallest so the risk-set sums accumulate as suffix
// sums; all subjects tied at a time join the risk set before that time's
// event terms are taken (Breslow).
struct PartialLikPass {
  double loglik = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd info;  // negative Hessian
};

inline PartialLikPass cox_pass(const Dataset& records,
                               const std::vector<std::size_t>& order_desc,
                               const Eigen::VectorXd& lambda, bool with_derivs) {
  const auto n = records.size();
  const Eigen::Index p = lambda.size();
  PartialLikPass out;
  out.grad = Eigen::VectorXd::Zero(p);
  out.info = Eigen::MatrixXd::Zero(p, p);

  Eigen::VectorXd eta(n);
  for (std::size_t i = 0; i < n; ++i) eta(static_cast<Eigen::Index>(i)) = lambda.dot(records[i].z);
  const double shift = (n > 0) ? eta.maxCoeff() : 0.0;

  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);

  std::size_t idx = 0;
  while (idx < n) {
    const double t = records[order_desc[idx]].w;
    std::size_t group_end = idx;
    while (group_end < n && records[order_desc[group_end]].w == t) {
      const std::size_t i = order_desc[group_end];
      const double ew = std::exp(eta(static_cast<Eigen::Index>(i)) - shift);
      s0 += ew;
      if (with_derivs && p > 0) {
        s1.noalias() += ew * records[i].z;
        s2.noalias() += ew * records[i].z * records[i].z.transpose();
      }
      ++group_end;
    }
    for (std::size_t k = idx; k < group_end; ++k) {
      const std::size_t i = order_desc[k];
      if (records[i].delta == 0) continue;
      out.loglik += (eta(static_cast<Eigen::Index>(i)) - shift) - std::log(s0);
      if (with_derivs && p > 0) {
        const Eigen::VectorXd mean = s1 / s0;
        out.grad.noalias() += records[i].z - mean;
        out.info.noalias() += s2 / s0 - mean * mean.transpose();
      }
    }
    idx = group_end;
  }
  return out;
}

}  // namespace detail

inline CoxFit fit_cox(const Dataset& records, double tol = 1e-8, int max_iter = 100) {
  const auto n = records.size();
  bool any_event = false;
  for (const auto& r : records) any_event = any_event || (r.delta != 0);
  if (!any_event) throw NoEventsError();

  const Eigen::Index p = records.empty() ? 0 : records.front().z.size();
  for (const auto& r : records)
    if (r.z.size() != p) throw DimensionMismatchError("covariate vectors have unequal lengths");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&records](std::size_t a, std::size_t b) { return records[a].w > records[b].w; });

  CoxFit fit;
  fit.lambda_hat = Eigen::VectorXd::Zero(p);
  if (p == 0) {
    fit.loglik = detail::cox_pass(records, order, fit.lambda_hat, false).loglik;
    fit.converged = true;
    return fit;
  }

  for (int iter = 0; iter < max_iter; ++iter) {
    auto pass = detail::cox_pass(records, order, fit.lambda_hat, true);
    fit.loglik = pass.loglik;
    fit.n_iter = iter;
    if (pass.grad.lpNorm<Eigen::Infinity>() <= tol) {
      fit.converged = true;
      return fit;
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(pass.info);
    if (lu.rank() < p) {
      // Identify a column involved in the collinearity from the null space.
      Eigen::MatrixXd kernel = lu.kernel();
      Eigen::Index worst = 0;
      kernel.col(0).cwiseAbs().maxCoeff(&worst);
      throw SingularInformationError(static_cast<int>(worst));
    }
    Eigen::VectorXd step = lu.solve(pass.grad);

    double scale = 1.0;
    Eigen::VectorXd candidate = fit.lambda_hat + step;
    double cand_loglik = detail::cox_pass(records, order, candidate, false).loglik;
    int halvings = 0;
    while (!(cand_loglik > fit.loglik) && halvings < 20) {
      scale *= 0.5;
      candidate = fit.lambda_hat + scale * step;
      cand_loglik = detail::cox_pass(records, order, candidate, false).loglik;
      ++halvings;
    }
    if (!(cand_loglik > fit.loglik)) {
      // The surface is flat at float resolution around the current point.
      // When the gradient is already tiny, or the quadratic model predicts a
      // gain below the log-likelihood's own rounding noise, the maximizer is
      // resolved as finely as double arithmetic allows; otherwise the fit
      // truly stalled.
      const double predicted_gain = 0.5 * pass.grad.dot(step);
      const double resolution =
          8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fit.loglik));
      if (pass.grad.lpNorm<Eigen::Infinity>() <= 1e-5 || predicted_gain <= resolution) {
        fit.converged = true;
        return fit;
      }
      throw NotConvergedError("partial likelihood step-halving exhausted without improvement");
    }
    fit.lambda_hat = candidate;
  }
  throw NotConvergedError("partial likelihood Newton iterations exceeded max_iter");
}

// Partial log-likelihood at an arbitrary coefficient vector, exposed for
// testing against brute-force maximizers.
inline double cox_partial_loglik(const Dataset& records, const Eigen::VectorXd& lambda) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&records](std::size_t a, std::size_t b) { return records[a].w > records[b].w; });
  return detail::cox_pass(records, order, lambda, false).loglik;
}

}  // namespace censimp
