#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "entperc/dynamics.hpp"
#include "entperc/errors.hpp"
#include "entperc/rng.hpp"
#include "oracles.hpp"

using namespace entperc;
using std::numbers::pi;

namespace {

const double kPInf = 1.0 - 2.0 / pi;

// k-th term of the |cos| Fourier series for Gaussian frequencies.
double series_term(int k, double t, double mean, double sd) {
  const double sign = k % 2 == 0 ? 1.0 : -1.0;
  return 4.0 / pi * sign / (4.0 * k * k - 1.0) * std::cos(2.0 * mean * k * t) * std::exp(-2.0 * sd * sd * t * t * k * k);
}

}  // namespace

TEST_CASE("schmidt_lambda") {
  TwoQubitState product;
  product.amplitudes = {1.0, 0.0, 0.0, 0.0};
  CHECK(schmidt_lambda(product) == doctest::Approx(1.0));

  TwoQubitState bell;
  bell.amplitudes = {1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0)};
  CHECK(schmidt_lambda(bell) == doctest::Approx(0.5));

  TwoQubitState s;
  s.amplitudes = {std::cos(pi / 6), 0.0, 0.0, std::complex<double>(0.0, -std::sin(pi / 6))};
  CHECK(schmidt_lambda(s) == doctest::Approx(0.75).epsilon(1e-12));

  TwoQubitState bad;
  bad.amplitudes = {1.0, 1.0, 0.0, 0.0};
  CHECK_THROWS_AS(schmidt_lambda(bad), DomainError);
}

TEST_CASE("edge states reproduce the closed-form Schmidt coefficient and conversion probability") {
  for (int i = 0; i <= 2000; ++i) {
    const double wt = 0.01 * i;
    for (double omega : {0.5, 1.0, 2.3}) {
      const double t = wt / omega;
      const auto st = edge_state(omega, t);
      CHECK(st.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::abs(st.det()) <= 0.5 + 1e-15);
      const double lam = schmidt_lambda(st);
      CHECK(lam == doctest::Approx((1.0 + std::abs(std::cos(wt))) / 2.0).epsilon(1e-9));
      CHECK(conversion_probability(omega, t) ==
            doctest::Approx(conversion_probability_from_lambda(lam)).epsilon(1e-7));
    }
  }
}

TEST_CASE("conversion_probability") {
  CHECK(conversion_probability(1.0, 0.0) == 0.0);
  CHECK(conversion_probability(1.0, pi / 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(conversion_probability(2.0, pi / 6) == doctest::Approx(0.5).epsilon(1e-14));
  for (double t = 0; t < 10; t += 0.37)
    CHECK(conversion_probability(1.7, t) == doctest::Approx(conversion_probability(1.7, t + pi / 1.7)).epsilon(1e-12));
}

TEST_CASE("p_bernoulli") {
  CHECK(p_bernoulli(0.0, 0.3, 1.0, 2.0) == 0.0);
  CHECK(p_bernoulli(pi / 2, 0.5, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
  for (double t = 0; t < 20; t += 0.173) {
    CHECK(p_bernoulli(t, 1.0, 1.3, 7.0) == doctest::Approx(conversion_probability(1.3, t)).epsilon(1e-14));
    const double p = p_bernoulli(t, 0.37, 1.0, 2.5);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  CHECK_THROWS_AS(p_bernoulli(1.0, -0.1, 1.0, 2.0), DomainError);
}

TEST_CASE("p_gaussian") {
  CHECK(std::abs(p_gaussian(0.0, 1.0, 0.3, 200)) < 1e-3);
  CHECK(std::abs(p_gaussian(20.0, 1.0, 0.3) - kPInf) < 1e-8);
  for (double t = 10.0; t < 40.0; t += 0.5) CHECK(std::abs(p_gaussian(t, 1.3, 0.3) - kPInf) < 1e-8);

  // At sigma t = 0.9 the k >= 2 terms are not below 1e-4; the gap to the
  // leading-order form equals their sum.
  double tail = 0;
  for (int k = 2; k <= kDefaultSeriesTerms; ++k) tail += series_term(k, 3.0, 1.0, 0.3);
  CHECK(p_gaussian(3.0, 1.0, 0.3) - p_asymptotic_gaussian(3.0, 1.0, 0.3) == doctest::Approx(tail).epsilon(1e-9));

  for (double t = 0.0; t < 15.0; t += 0.05) {
    const double p = p_gaussian(t, 1.0, 0.2);
    CHECK(p >= -1e-3);
    CHECK(p <= 1.0 + 1e-3);
  }
  CHECK_THROWS_AS(p_gaussian(1.0, 1.0, 0.1, 0), DomainError);
}

TEST_CASE("p_asymptotic_gaussian") {
  CHECK(p_asymptotic_gaussian(100.0, 1.0, 0.2) == doctest::Approx(kPInf).epsilon(1e-14));
  CHECK(p_asymptotic_gaussian(0.0, 1.0, 0.2) == doctest::Approx(1 - 2 / pi - 4 / (3 * pi)).epsilon(1e-14));
  CHECK(p_asymptotic_gaussian(0.0, 1.0, 0.2) == doctest::Approx(-0.0610).epsilon(1e-3));
  CHECK(std::abs(p_asymptotic_gaussian(10.0, 1.0, 0.2) - p_gaussian(10.0, 1.0, 0.2, 50)) < 1e-6);
}

TEST_CASE("p_numeric") {
  CHECK(std::abs(p_numeric(gaussian_density(1.0, 1e-5), pi / 2) - 1.0) < 1e-4);
  CHECK(std::abs(p_numeric(gaussian_density(1.0, 0.1), 5.0) - p_gaussian(5.0, 1.0, 0.1)) < 1e-6);
  for (double t = 0.0; t < 12.0; t += 0.41)
    CHECK(p_numeric(two_point_density(0.5, 1.0, 2.0), t) == doctest::Approx(p_bernoulli(t, 0.5, 1.0, 2.0)).epsilon(1e-9));

  FrequencyDensity half;
  half.pdf = [](double) { return 0.5; };
  half.lower = 0.0;
  half.upper = 1.0;
  CHECK_THROWS_AS(p_numeric(half, 1.0), DomainError);

  // uniform on [a, b] has a closed-form integral of |cos(x t)| away from kinks
  const double t = 0.7;
  const double exact = 1.0 - (std::sin(1.5 * t) - std::sin(0.5 * t)) / t;
  CHECK(p_numeric(uniform_density(0.5, 1.5), t) == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("series and quadrature agree once sigma t >= 0.5") {
  Rng gen(5);
  for (int i = 0; i < 40; ++i) {
    const double sd = 0.05 + 0.4 * gen.uniform();
    const double mean = 0.5 + 1.5 * gen.uniform();
    const double t = (0.5 + 3.0 * gen.uniform()) / sd;
    CAPTURE(sd);
    CAPTURE(t);
    CHECK(std::abs(p_gaussian(t, mean, sd) - p_numeric(gaussian_density(mean, sd), t)) < 1e-6);
  }
}

TEST_CASE("bernoulli_period") {
  REQUIRE(bernoulli_period(1.0, 2.0).has_value());
  CHECK(*bernoulli_period(1.0, 2.0) == doctest::Approx(pi));
  REQUIRE(bernoulli_period(1.0, 2.5).has_value());
  CHECK(*bernoulli_period(1.0, 2.5) == doctest::Approx(2 * pi));
  CHECK_FALSE(bernoulli_period(1.0, pi).has_value());
  for (double t = 0; t < 10; t += 0.31)
    CHECK(p_bernoulli(t, 0.5, 1.0, 2.5) == doctest::Approx(p_bernoulli(t + 2 * pi, 0.5, 1.0, 2.5)).epsilon(1e-9));
}

TEST_CASE("curves pass through (1/2, 1/2) for rational ratios 2 and 5/2") {
  for (double ratio : {2.0, 2.5}) {
    const auto t = half_half_crossing(ratio, 4 * pi);
    REQUIRE(t.has_value());
    CHECK(conversion_probability(1.0, *t) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(conversion_probability(ratio, *t) == doctest::Approx(0.5).epsilon(1e-8));
  }
  CHECK(*half_half_crossing(2.0, 4 * pi) == doctest::Approx(pi / 3).epsilon(1e-8));
}
