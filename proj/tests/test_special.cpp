#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "censimp/quadrature.hpp"
#include "censimp/rng.hpp"
#include "censimp/special.hpp"

using namespace censimp;

TEST_CASE("log_gamma matches high-precision oracle values") {
  CHECK(log_gamma(1.0) == Catch::Approx(0.0).margin(1e-14));
  CHECK(log_gamma(2.0) == Catch::Approx(0.0).margin(1e-14));
  CHECK(log_gamma(0.5) == Catch::Approx(0.572364942924700087).epsilon(1e-14));
  CHECK(log_gamma(5.0) == Catch::Approx(3.178053830347945620).epsilon(1e-14));
  CHECK(log_gamma(12.3) == Catch::Approx(18.238983407092241942).epsilon(1e-14));
}

TEST_CASE("log_gamma agrees with libm lgamma on random arguments") {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(0.05, 50.0);
    CHECK(log_gamma(x) == Catch::Approx(std::lgamma(x)).epsilon(1e-12).margin(1e-12));
  }
}

TEST_CASE("upper incomplete gamma matches closed forms and oracle values") {
  // Gamma(1,x) = exp(-x); Gamma(2,x) = exp(-x)(1+x); Gamma(s,0) = Gamma(s).
  CHECK(upper_incomplete_gamma(1.0, 2.0) ==
        Catch::Approx(0.135335283236612692).epsilon(1e-13));
  CHECK(upper_incomplete_gamma(2.0, 3.0) ==
        Catch::Approx(std::exp(-3.0) * 4.0).epsilon(1e-13));
  CHECK(upper_incomplete_gamma(3.0, 0.0) == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(upper_incomplete_gamma(0.5, 0.25) ==
        Catch::Approx(0.849891838079931130).epsilon(1e-13));
  CHECK(upper_incomplete_gamma(2.5, 1.7) ==
        Catch::Approx(0.848876789458320643).epsilon(1e-13));
  // The shape that appears for a Weibull tail with nu = 0.75.
  CHECK(upper_incomplete_gamma(4.0 / 3.0, 0.9) ==
        Catch::Approx(0.491367067460582251).epsilon(1e-13));
}

TEST_CASE("upper incomplete gamma agrees with adaptive quadrature of its integrand") {
  Rng rng(7);
  for (int i = 0; i < 60; ++i) {
    const double s = rng.uniform(0.2, 6.0);
    const double x = rng.uniform(0.0, 8.0);
    const auto quad = integrate_to_infinity(
        [s](double t) { return std::pow(t, s - 1.0) * std::exp(-t); }, x, 1e-13, 1e-11, 400);
    REQUIRE(quad.converged);
    CHECK(upper_incomplete_gamma(s, x) ==
          Catch::Approx(quad.value).epsilon(1e-8).margin(1e-12));
  }
}

TEST_CASE("normal quantile matches AS241 oracle values") {
  CHECK(norm_quantile(0.5) == Catch::Approx(0.0).margin(1e-15));
  CHECK(norm_quantile(0.975) == Catch::Approx(1.959963984540054236).epsilon(1e-14));
  CHECK(norm_quantile(0.75) == Catch::Approx(0.674489750196081743).epsilon(1e-14));
  CHECK(norm_quantile(0.9) == Catch::Approx(1.281551565544600467).epsilon(1e-14));
  CHECK(norm_quantile(0.0001) == Catch::Approx(-3.719016485455680564).epsilon(1e-12));
}

TEST_CASE("normal quantile is antisymmetric and inverts the CDF") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double p = rng.uniform(1e-6, 1.0 - 1e-6);
    CHECK(norm_quantile(p) == Catch::Approx(-norm_quantile(1.0 - p)).margin(1e-12));
    CHECK(norm_cdf(norm_quantile(p)) == Catch::Approx(p).epsilon(1e-10).margin(1e-12));
  }
}

TEST_CASE("domain errors are rejected") {
  CHECK_THROWS(log_gamma(0.0));
  CHECK_THROWS(log_gamma(-1.0));
  CHECK_THROWS(gamma_q(0.0, 1.0));
  CHECK_THROWS(gamma_q(1.0, -0.5));
  CHECK_THROWS(norm_quantile(0.0));
  CHECK_THROWS(norm_quantile(1.0));
}
