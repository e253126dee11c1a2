#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bsde/error.hpp"
#include "bsde/moments.hpp"
#include "bsde/rng.hpp"
#include "doctest.h"

using namespace bsde;

TEST_CASE("log-sum-exp avoids overflow") {
  std::vector<double> w = {1000.0, 1000.0};
  CHECK(log_sum_exp(w) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_mean_exp(w) == doctest::Approx(1000.0));
  CHECK(std::isinf(log_sum_exp(std::vector<double>{})));
}

TEST_CASE("constant samples give exact moments") {
  std::vector<double> ones(100, 1.0), zeros(100, 0.0);
  const auto e = subexp_moment_estimate(ones, 2.0, 3.0);
  CHECK(e.log_mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(e.value() == doctest::Approx(std::exp(2.0)));
  CHECK(e.rel_se == doctest::Approx(0.0));
  const auto z = subexp_moment_estimate(zeros, 2.0, 3.0);
  CHECK(z.value() == doctest::Approx(1.0));
}

TEST_CASE("moment estimator rejects bad input") {
  std::vector<double> neg = {1.0, -0.5};
  CHECK_THROWS_AS(subexp_moment_estimate(neg, 2.0, 3.0), Error);
  std::vector<double> ok = {1.0};
  CHECK_THROWS_AS(subexp_moment_estimate(ok, 1.0, 3.0), Error);
}

TEST_CASE("Gaussian sub-exponential moment matches quadrature") {
  const std::size_t m = 200000;
  const CounterRng rng(21);
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = std::abs(rng.normal(0, i));
  const auto est = subexp_moment_estimate(x, 1.5, 3.0);
  using boost::math::quadrature::gauss_kronrod;
  const double exact = 2.0 * gauss_kronrod<double, 61>::integrate(
                                 [](double u) {
                                   return std::exp(1.5 * std::cbrt(u * u) - 0.5 * u * u) /
                                          std::sqrt(2.0 * M_PI);
                                 },
                                 0.0, 40.0, 15, 1e-12);
  const double se = est.rel_se * est.value();
  CHECK(std::abs(est.value() - exact) < 3.0 * se);
  CHECK_FALSE(est.overflow);
}

TEST_CASE("huge exponents saturate instead of overflowing") {
  std::vector<double> w = {800.0, 1.0, 2.0};
  const auto e = log_moment(w);
  CHECK(e.overflow);
  CHECK(std::isfinite(e.log_mean));
}

TEST_CASE("log_add sums two estimates") {
  std::vector<double> a(10, 0.0), b(10, std::log(3.0));
  const auto s = log_add(log_moment(a), log_moment(b));
  CHECK(s.value() == doctest::Approx(4.0));
}

TEST_CASE("heavy tail flag needs a dominating top percentile") {
  std::vector<double> w(1000, 0.0);
  CHECK_FALSE(log_moment(w).heavy_tail);
  w[0] = 20.0;
  CHECK(log_moment(w).heavy_tail);
}
