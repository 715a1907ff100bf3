#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "censimp/cox.hpp"
#include "censimp/rng.hpp"

using namespace censimp;

namespace {

Dataset make_dataset(const std::vector<double>& w, const std::vector<int>& delta,
                     const std::vector<std::vector<double>>& z_cols) {
  Dataset data(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    data[i].w = w[i];
    data[i].delta = delta[i];
    data[i].z = Eigen::VectorXd(static_cast<Eigen::Index>(z_cols.size()));
    for (std::size_t k = 0; k < z_cols.size(); ++k)
      data[i].z(static_cast<Eigen::Index>(k)) = z_cols[k][i];
  }
  return data;
}

// Brute-force 1-d maximizer of the partial likelihood on a grid.
double grid_maximizer(const Dataset& data, double lo, double hi, double step) {
  double best_l = lo, best_v = -1e300;
  for (double l = lo; l <= hi + 1e-12; l += step) {
    const double v = cox_partial_loglik(data, Eigen::VectorXd::Constant(1, l));
    if (v > best_v) {
      best_v = v;
      best_l = l;
    }
  }
  return best_l;
}

}  // namespace

TEST_CASE("fit matches an external Breslow-ties fit with two covariates") {
  // Frozen from an independent proportional-hazards implementation on data
  // with 12 tied times and 7 censored records.
  const std::vector<double> w = {0.2, 2.1, 1.4000000000000001, 1.5,
                                 0.2, 0.5, 6.8999999999999995, 1.3,
                                 0.1, 0.7999999999999999, 0.30000000000000004, 0.1,
                                 2.6, 1.0, 0.6, 0.1,
                                 0.2, 2.2, 0.6, 0.30000000000000004,
                                 1.0, 0.7999999999999999, 0.7, 2.3000000000000003,
                                 0.7, 3.4, 0.7, 0.9,
                                 0.30000000000000004, 0.6};
  const std::vector<int> delta = {1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 1, 1, 1, 1, 1,
                                  1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 1, 1, 0};
  const std::vector<double> z1 = {1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 1, 1, 0, 1, 0,
                                  0, 1, 1, 1, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0};
  const std::vector<double> z2 = {-0.431, 0.272, 0.057,  0.425,  0.225,  1.658,
                                  -0.664, 1.199, -0.403, -0.958, 1.211,  -0.44,
                                  -0.388, -1.389, -2.098, 0.634,  -1.165, 0.778,
                                  1.848,  -0.115, -1.127, 0.394,  0.762,  -0.262,
                                  0.017,  1.335,  1.265,  0.71,   -0.866, -0.054};
  const Dataset data = make_dataset(w, delta, {z1, z2});
  const CoxFit fit = fit_cox(data);
  REQUIRE(fit.converged);
  CHECK(fit.lambda_hat(0) == Catch::Approx(0.5483056007443107).margin(1e-6));
  CHECK(fit.lambda_hat(1) == Catch::Approx(-0.223697697006733).margin(1e-6));
  CHECK(fit.loglik == Catch::Approx(-56.21320728893663).margin(1e-8));
}

TEST_CASE("maximizer agrees with a fine grid search on small datasets") {
  Rng rng(500);
  int tested = 0;
  for (int attempt = 0; attempt < 60 && tested < 10; ++attempt) {
    const int n = 12;
    std::vector<double> w(n), z(n);
    std::vector<int> delta(n);
    for (int i = 0; i < n; ++i) {
      w[static_cast<std::size_t>(i)] = rng.uniform(0.1, 5.0);
      z[static_cast<std::size_t>(i)] = rng.bernoulli(0.5) ? 1.0 : 0.0;
      delta[static_cast<std::size_t>(i)] = rng.bernoulli(0.7) ? 1 : 0;
    }
    if (std::accumulate(delta.begin(), delta.end(), 0) < 3) continue;
    const Dataset data = make_dataset(w, delta, {z});
    const double grid = grid_maximizer(data, -5.0, 5.0, 1e-4);
    // Skip monotone-likelihood draws where the maximizer sits on the
    // boundary; the estimate is not finite there.
    if (std::fabs(std::fabs(grid) - 5.0) < 1e-6) continue;
    const CoxFit fit = fit_cox(data);
    REQUIRE(fit.converged);
    CHECK(fit.lambda_hat(0) == Catch::Approx(grid).margin(1e-4));
    ++tested;
  }
  REQUIRE(tested == 10);
}

TEST_CASE("four-record interleaved dataset matches the grid oracle") {
  const Dataset data = make_dataset({1, 2, 3, 4}, {1, 1, 1, 1}, {{0, 1, 0, 1}});
  const double grid = grid_maximizer(data, -5.0, 5.0, 1e-4);
  const CoxFit fit = fit_cox(data);
  REQUIRE(fit.converged);
  CHECK(fit.lambda_hat(0) == Catch::Approx(grid).margin(1e-4));
}

TEST_CASE("perfectly separated groups push the estimate past any grid value") {
  // All z=0 events precede every z=1 event, so the likelihood is monotone and
  // the finite-gradient stopping point dominates the whole grid.
  const Dataset data = make_dataset({1, 2, 3, 4}, {1, 1, 1, 1}, {{0, 0, 1, 1}});
  const CoxFit fit = fit_cox(data);
  REQUIRE(fit.converged);
  const double grid = grid_maximizer(data, -5.0, 5.0, 1e-3);
  CHECK(grid == Catch::Approx(-5.0).margin(1e-9));
  CHECK(cox_partial_loglik(data, fit.lambda_hat) >=
        cox_partial_loglik(data, Eigen::VectorXd::Constant(1, grid)) - 1e-8);
}

TEST_CASE("no covariates yields an empty converged fit") {
  Dataset data(3);
  for (int i = 0; i < 3; ++i) {
    data[static_cast<std::size_t>(i)].w = i + 1.0;
    data[static_cast<std::size_t>(i)].delta = 1;
    data[static_cast<std::size_t>(i)].z = Eigen::VectorXd(0);
  }
  const CoxFit fit = fit_cox(data);
  CHECK(fit.converged);
  CHECK(fit.lambda_hat.size() == 0);
}

TEST_CASE("identically zero covariate fits to zero") {
  const Dataset data = make_dataset({1, 2, 3, 4}, {1, 0, 1, 1}, {{0, 0, 0, 0}});
  const CoxFit fit = fit_cox(data);
  REQUIRE(fit.converged);
  CHECK(fit.lambda_hat(0) == 0.0);
}

TEST_CASE("score vanishes at the fitted coefficients") {
  Rng rng(81);
  const int n = 40;
  std::vector<double> w(n), z1(n), z2(n);
  std::vector<int> delta(n);
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] = rng.exponential(1.0);
    z1[static_cast<std::size_t>(i)] = rng.normal();
    z2[static_cast<std::size_t>(i)] = rng.bernoulli(0.4) ? 1.0 : 0.0;
    delta[static_cast<std::size_t>(i)] = rng.bernoulli(0.8) ? 1 : 0;
  }
  const Dataset data = make_dataset(w, delta, {z1, z2});
  const CoxFit fit = fit_cox(data);
  REQUIRE(fit.converged);
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd up = fit.lambda_hat, dn = fit.lambda_hat;
    up(k) += h;
    dn(k) -= h;
    const double num_grad =
        (cox_partial_loglik(data, up) - cox_partial_loglik(data, dn)) / (2 * h);
    CHECK(num_grad == Catch::Approx(0.0).margin(1e-4));
  }
}

TEST_CASE("fit is invariant to record order") {
  Rng rng(12);
  const int n = 25;
  std::vector<double> w(n), z(n);
  std::vector<int> delta(n);
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] = rng.uniform(0.0, 3.0);
    z[static_cast<std::size_t>(i)] = rng.normal();
    delta[static_cast<std::size_t>(i)] = rng.bernoulli(0.75) ? 1 : 0;
  }
  Dataset data = make_dataset(w, delta, {z});
  const CoxFit fit = fit_cox(data);
  Dataset shuffled = data;
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[3], shuffled[17]);
  const CoxFit fit2 = fit_cox(shuffled);
  // Summation order differs between the two record orders, so agreement is
  // limited by the optimizer's gradient tolerance, not by float identity.
  CHECK(fit.lambda_hat(0) == Catch::Approx(fit2.lambda_hat(0)).margin(1e-6));
}

TEST_CASE("degenerate inputs raise typed errors") {
  const Dataset no_events = make_dataset({1, 2}, {0, 0}, {{0.5, 1.0}});
  CHECK_THROWS_AS(fit_cox(no_events), NoEventsError);

  // Duplicated covariate column makes the information matrix singular.
  const Dataset collinear =
      make_dataset({1, 2, 3, 4, 5}, {1, 1, 1, 1, 0},
                   {{0, 1, 0, 1, 1}, {0, 1, 0, 1, 1}});
  CHECK_THROWS_AS(fit_cox(collinear), SingularInformationError);
}
