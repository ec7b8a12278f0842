#include "doctest.h"

#include "orgutil/numeric.hpp"
#include "orgutil/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace orgutil;

TEST_CASE("gauss-legendre is exact for polynomials up to degree 2n-1") {
  for (int n : {1, 2, 5, 12, 40}) {
    const GaussRule rule = gauss_legendre(n);
    CHECK(rule.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
    const int degree = 2 * n - 2;  // even, so the integral is nonzero
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * std::pow(rule.nodes[i], degree);
    CHECK(acc == doctest::Approx(2.0 / (degree + 1)).epsilon(1e-12));
  }
}

TEST_CASE("gauss-hermite moments of the normal distribution") {
  const GaussRule rule = gauss_hermite(61);
  CHECK(rule.weights.sum() == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
  CHECK(normal_expectation([](double x) { return x; }, 1.5, 2.0, rule) ==
        doctest::Approx(1.5).epsilon(1e-13));
  CHECK(normal_expectation([](double x) { return x * x; }, 1.0, 2.0, rule) ==
        doctest::Approx(5.0).epsilon(1e-13));
  // E[exp(tX)] = exp(t mu + t^2 s^2 / 2)
  CHECK(normal_expectation([](double x) { return std::exp(-0.5 * x); }, 2.0, 3.0, rule) ==
        doctest::Approx(std::exp(-1.0 + 0.25 * 9.0 / 2.0)).epsilon(1e-12));
}

TEST_CASE("composite and trapezoid integration") {
  const GaussRule gl = gauss_legendre(12);
  CHECK(integrate_composite([](double x) { return std::exp(x); }, 0.0, 1.0, gl, 4) ==
        doctest::Approx(std::numbers::e - 1.0).epsilon(1e-14));
  CHECK(integrate_trapezoid([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
        doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("logistic helpers stay finite in the tails") {
  CHECK(logistic(0.0) == 0.5);
  CHECK(logistic(-800.0) >= 0.0);
  CHECK(log_logistic(-800.0) == doctest::Approx(-800.0));
  CHECK(log_logistic(800.0) == 0.0);
  CHECK(softplus(1000.0) == doctest::Approx(1000.0));
  CHECK(logit(0.25) == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-15));
  CHECK(log1mexp(-1e-20) == doctest::Approx(std::log(1e-20)));
  CHECK(log1mexp(-50.0) == doctest::Approx(-std::exp(-50.0)).epsilon(1e-12));
  CHECK(log_add_exp(-1000.0, -1000.0) == doctest::Approx(-1000.0 + std::log(2.0)));
  Eigen::Vector3d v(1000.0, 1000.0, 1000.0);
  CHECK(log_sum_exp(v) == doctest::Approx(1000.0 + std::log(3.0)));
}
