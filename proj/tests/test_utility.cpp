#include "doctest.h"

#include "orgutil/aggregation.hpp"
#include "orgutil/error.hpp"
#include "orgutil/json_io.hpp"
#include "orgutil/utility.hpp"

#include <cmath>
#include <random>

using namespace orgutil;

namespace {

Eigen::VectorXd at(double x) { return Eigen::VectorXd::Constant(1, x); }

// Fraction of logistic draws with u + eps > 0.
double monte_carlo_acceptance(double u, long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  long hits = 0;
  for (long i = 0; i < n; ++i) {
    double v = unif(rng);
    while (v == 0.0) v = unif(rng);
    if (u + std::log(v / (1.0 - v)) > 0.0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace

TEST_CASE("eval_utility") {
  CHECK(eval_utility(UtilityExpr::affine(0.5, {0.25}), at(0.0)) == 0.5);
  CHECK(eval_utility(UtilityExpr::affine(5.0, {1.0}), at(4.0)) == 9.0);
  CHECK(eval_utility(UtilityExpr::exp_cara(10.0, 10.0), at(10.0)) ==
        doctest::Approx(6.321205588285577).epsilon(1e-14));
  CHECK(eval_utility(UtilityExpr::var(1), Eigen::Vector2d(3.0, -2.0)) == -2.0);
}

TEST_CASE("short outcome vectors are rejected") {
  const auto u = UtilityExpr::affine(0.0, {1.0, 2.0});
  CHECK(u.dimension() == 2);
  try {
    (void)eval_utility(u, at(1.0));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension_mismatch);
  }
  CHECK_THROWS_AS((void)eval_utility(UtilityExpr::var(3), at(1.0)), Error);
}

TEST_CASE("screening_prob examples") {
  CHECK(screening_prob(UtilityExpr::constant(0.0), at(7.0)) == 0.5);
  CHECK(screening_prob(UtilityExpr::affine(1.0, {1.0}), at(-1.0)) == 0.5);
  const double p = screening_prob(UtilityExpr::affine(0.5, {0.25}), at(0.0));
  CHECK(p == doctest::Approx(0.6224593312018546).epsilon(1e-15));
}

TEST_CASE("screening_prob agrees with simulated logistic noise") {
  const double p = screening_prob(UtilityExpr::affine(0.5, {0.25}), at(0.0));
  CHECK(std::abs(monte_carlo_acceptance(0.5, 10'000'000, 7) - p) < 3e-4);

  const long n = 1'000'000;
  for (double u : {-3.0, -0.7, 0.0, 1.2, 4.0}) {
    const double q = screening_prob(UtilityExpr::constant(u), at(0.0));
    const double se = std::sqrt(q * (1.0 - q) / static_cast<double>(n));
    CHECK(std::abs(monte_carlo_acceptance(u, n, 11) - q) < 3.0 * se);
  }
}

TEST_CASE("utility_from_prob") {
  CHECK(utility_from_prob(0.5) == 0.0);
  const double u = utility_from_prob(0.25);
  CHECK(u == doctest::Approx(-1.0986122886681098).epsilon(1e-15));
  CHECK(screening_prob(UtilityExpr::constant(u), at(0.0)) == doctest::Approx(0.25).epsilon(1e-15));
  for (double p : {0.0, 1.0, -0.1, 1.5}) {
    try {
      (void)utility_from_prob(p);
      FAIL("expected DegenerateProbability");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::degenerate_probability);
    }
  }
}

TEST_CASE("logit round trip on [-30, 30]") {
  double worst = 0.0;
  for (int i = 0; i <= 6000; ++i) {
    const double u = -30.0 + 0.01 * i;
    const double back = utility_from_prob(screening_prob(UtilityExpr::constant(u), at(0.0)));
    worst = std::max(worst, std::abs(back - u));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("logit round trip through a double probability while 1 - p is resolvable") {
  double worst = 0.0;
  for (int i = 0; i <= 4500; ++i) {
    const double u = -30.0 + 0.01 * i;
    const double back = utility_from_prob(screening_prob(UtilityExpr::constant(u), at(0.0)));
    worst = std::max(worst, std::abs(back - u));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("log-space screening round trip on [-30, 30]") {
  double worst = 0.0;
  for (int i = 0; i <= 6000; ++i) {
    const double u = -30.0 + 0.01 * i;
    worst = std::max(worst, std::abs(LogScreening::from_utility(u).utility() - u));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("screening is strictly increasing in utility") {
  const auto u = UtilityExpr::affine(0.0, {1.0});
  double prev = -1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double s = screening_prob(u, at(-30.0 + 0.03 * i));
    CHECK(s > prev);
    prev = s;
  }
}

TEST_CASE("sum, scale and negate are exact") {
  const auto a = UtilityExpr::affine(5.0, {1.0});
  const auto b = UtilityExpr::exp_cara(10.0, 5.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-20.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const auto x = at(dist(rng));
    CHECK(eval_utility(UtilityExpr::negate(b), x) == -eval_utility(b, x));
    CHECK(eval_utility(a + b, x) == eval_utility(a, x) + eval_utility(b, x));
    CHECK(eval_utility(2.5 * b, x) == 2.5 * eval_utility(b, x));
  }
}

TEST_CASE("affine_form reduces nested affine expressions") {
  const auto u = UtilityExpr::affine(5.0, {1.0}) + 2.0 * UtilityExpr::affine(-5.0, {3.0}) -
                 UtilityExpr::var(0) + UtilityExpr::constant(1.0);
  const auto form = u.affine_form();
  REQUIRE(form.has_value());
  CHECK(form->alpha == -4.0);
  CHECK(form->beta.size() == 1);
  CHECK(form->beta[0] == 6.0);
  CHECK_FALSE(UtilityExpr::exp_cara(1.0, 1.0).affine_form().has_value());
}

TEST_CASE("error_rates") {
  SUBCASE("always-approve evaluator") {
    const ErrorRates r = error_rates(UtilityExpr::affine(1000.0, {0.0}), {-1.0, 1.0});
    CHECK(r.omission == doctest::Approx(0.0));
    CHECK(r.commission == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("odd utility gives equal error rates") {
    const ErrorRates r = error_rates(UtilityExpr::affine(0.0, {0.5}), {-10.0, 10.0});
    CHECK(r.omission == doctest::Approx(r.commission).epsilon(1e-9));
    CHECK(r.omission > 0.0);
  }
  SUBCASE("steeper evaluator makes fewer errors") {
    const ErrorRates flat = error_rates(UtilityExpr::affine(0.0, {0.5}), {-10.0, 10.0});
    const ErrorRates steep = error_rates(UtilityExpr::affine(0.0, {2.0}), {-10.0, 10.0});
    CHECK(steep.omission < flat.omission);
    CHECK(steep.commission < flat.commission);
  }
  SUBCASE("closed form for a linear evaluator") {
    // (1/20) * int_0^10 logistic(-x/2) dx = (1/20) * 2 * (log 2 - log(1 + e^-5))
    const ErrorRates r = error_rates(UtilityExpr::affine(0.0, {0.5}), {-10.0, 10.0});
    const double exact = 0.1 * (std::log(2.0) - std::log1p(std::exp(-5.0)));
    CHECK(r.omission == doctest::Approx(exact).epsilon(1e-6));
  }
  SUBCASE("custom density") {
    const ErrorRates r = error_rates(UtilityExpr::affine(0.0, {1.0}), {-1.0, 3.0},
                                     [](double x) { return x > 0.0 ? 1.0 / 3.0 : 0.0; });
    CHECK(r.commission == doctest::Approx(0.0));
  }
  SUBCASE("domain must straddle zero") {
    try {
      (void)error_rates(UtilityExpr::affine(0.0, {1.0}), {0.5, 2.0});
      FAIL("expected BadDomain");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::bad_domain);
    }
  }
}

TEST_CASE("json round trip is bit exact") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1e3, 1e3);
  for (int i = 0; i < 100; ++i) {
    const double a = dist(rng) / 3.0, b = dist(rng) / 7.0, c = std::ldexp(dist(rng), -40);
    const auto u = UtilityExpr::sum({UtilityExpr::affine(a, {b, c}),
                                     UtilityExpr::scaled(c, UtilityExpr::exp_cara(b, 3.0)),
                                     UtilityExpr::negate(UtilityExpr::var(1))});
    const json text = parse_json(to_json(u).dump());
    const auto back = utility_from_json(text);
    CHECK(to_json(back) == to_json(u));
    const Eigen::Vector2d x(dist(rng), dist(rng));
    CHECK(back(x) == u(x));
  }
  const double tricky = 0.1 + 0.2;
  CHECK(parse_json(json(tricky).dump()).get<double>() == tricky);
  CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
}

TEST_CASE("malformed utility json") {
  CHECK_THROWS_AS((void)utility_from_json(parse_json(R"({"kind":"affine","alpha":1})")), Error);
  CHECK_THROWS_AS((void)utility_from_json(parse_json(R"({"kind":"spline"})")), Error);
  try {
    (void)parse_json("{\"kind\":", "u.json");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
    CHECK(std::string(e.what()).find("u.json:1:") != std::string::npos);
  }
}
