#pragma once

// Ordinary least squares with classical and heteroskedasticity-robust
// (sandwich) covariance estimates, plus Wald intervals on normal quantiles.

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "censimp/errors.hpp"
#include "censimp/special.hpp"

namespace censimp {

struct RegressionFit {
  Eigen::VectorXd theta;          // coefficients in design-column order
  double sigma2 = 0.0;            // RSS / (n - k)
  Eigen::Index n = 0;
  Eigen::Index k = 0;
  Eigen::MatrixXd cov_classical;  // sigma2 (X'X)^-1
  Eigen::MatrixXd cov_sandwich;   // HC0 by default
  Eigen::VectorXd residuals;
};

enum class SandwichFlavor { hc0, hc1 };

inline Eigen::MatrixXd sandwich_cov(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                                    SandwichFlavor flavor = SandwichFlavor::hc0) {
  const Eigen::Index n = X.rows(), k = X.cols();
  Eigen::MatrixXd xtx = X.transpose() * X;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
  if (lu.rank() < k) {
    Eigen::MatrixXd kernel = lu.kernel();
    Eigen::Index worst = 0;
    kernel.col(0).cwiseAbs().maxCoeff(&worst);
    throw RankDeficientError(static_cast<int>(worst));
  }
  Eigen::MatrixXd bread = lu.inverse();
  Eigen::MatrixXd meat =
      X.transpose() * residuals.array().square().matrix().asDiagonal() * X;
  Eigen::MatrixXd cov = bread * meat * bread;
  if (flavor == SandwichFlavor::hc1 && n > k)
    cov *= static_cast<double>(n) / static_cast<double>(n - k);
  // Symmetrize against round-off.
  return 0.5 * (cov + cov.transpose());
}

inline RegressionFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             SandwichFlavor flavor = SandwichFlavor::hc0) {
  const Eigen::Index n = X.rows(), k = X.cols();
  if (y.size() != n) throw DimensionMismatchError("response length does not match design rows");
  if (n <= k) throw TooFewRowsError();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < k) {
    // The first column the pivoting declined to use is the redundant one.
    const auto& perm = qr.colsPermutation().indices();
    throw RankDeficientError(static_cast<int>(perm(qr.rank())));
  }

  RegressionFit fit;
  fit.n = n;
  fit.k = k;
  fit.theta = qr.solve(y);
  fit.residuals = y - X * fit.theta;
  const double rss = fit.residuals.squaredNorm();
  fit.sigma2 = rss / static_cast<double>(n - k);

  Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  fit.cov_classical = fit.sigma2 * 0.5 * (xtx_inv + xtx_inv.transpose());
  fit.cov_sandwich = sandwich_cov(X, fit.residuals, flavor);
  return fit;
}

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
};

inline std::vector<ConfidenceInterval> wald_ci(const RegressionFit& fit, double level = 0.95) {
  const double q = norm_quantile(0.5 + 0.5 * level);
  std::vector<ConfidenceInterval> out(static_cast<std::size_t>(fit.k));
  for (Eigen::Index j = 0; j < fit.k; ++j) {
    const double se = std::sqrt(std::max(0.0, fit.cov_sandwich(j, j)));
    out[static_cast<std::size_t>(j)] = {fit.theta(j) - q * se, fit.theta(j) + q * se};
  }
  return out;
}

}  // namespace censimp
