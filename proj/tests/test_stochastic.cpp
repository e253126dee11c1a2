#include <cmath>
#include <numeric>

#include "bsde/error.hpp"
#include "bsde/stochastic.hpp"
#include "doctest.h"

using namespace bsde;

TEST_CASE("uniform grid nodes") {
  const auto g = build_grid(1.0, 4);
  const std::vector<double> want = {0, 0.25, 0.5, 0.75, 1.0};
  REQUIRE(g.nodes().size() == want.size());
  for (std::size_t j = 0; j < want.size(); ++j)
    CHECK(g.node(j) == doctest::Approx(want[j]).epsilon(1e-15));
  const auto one = build_grid(1.0, 1);
  CHECK(one.steps() == 1);
  CHECK(one.node(1) == 1.0);
}

TEST_CASE("geometric grid is strictly increasing and ends at the horizon") {
  const auto g = build_grid(2.0, 8, GridScheme::Geometric, 0.5);
  CHECK(g.steps() == 8);
  CHECK(g.node(0) == 0.0);
  CHECK(g.horizon() == doctest::Approx(2.0).epsilon(1e-14));
  for (std::size_t j = 0; j < g.steps(); ++j) CHECK(g.dt(j) > 0.0);
  // steps shrink towards the horizon
  CHECK(g.dt(7) < g.dt(0));
}

TEST_CASE("grid rejects bad input") {
  CHECK_THROWS_AS(build_grid(1.0, 0), Error);
  CHECK_THROWS_AS(build_grid(-1.0, 4), Error);
}

TEST_CASE("path sampling is deterministic per seed") {
  const auto g = build_grid(1.0, 8);
  const auto a = sample_paths(g, 1, 100, 42);
  const auto b = sample_paths(g, 1, 100, 42);
  const auto c = sample_paths(g, 1, 100, 43);
  bool same = true, differs = false;
  for (std::size_t j = 0; j <= g.steps(); ++j)
    for (std::size_t i = 0; i < 100; ++i) {
      same = same && a.position(j, i)[0] == b.position(j, i)[0];
      differs = differs || a.position(j, i)[0] != c.position(j, i)[0];
    }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("paths start at zero and positions accumulate increments") {
  const auto g = build_grid(1.0, 5);
  const auto p = sample_paths(g, 2, 50, 9);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(p.position(0, i)[0] == 0.0);
    for (std::size_t j = 0; j < 5; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        CHECK(p.position(j + 1, i)[k] ==
              doctest::Approx(p.position(j, i)[k] + p.increment(j, i)[k]).epsilon(1e-14));
  }
}

TEST_CASE("increment variance matches dt within five standard errors") {
  const auto g = build_grid(1.0, 1);
  const std::size_t m = 100000;
  const auto p = sample_paths(g, 1, m, 5);
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = p.increment(0, i)[0];
    s += x;
    s2 += x * x;
  }
  const double mean = s / m;
  const double var = s2 / m - mean * mean;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(double(m)));
  // sd of the sample variance of N(0,1) is sqrt(2/m)
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / m));
}

TEST_CASE("coordinates are uncorrelated") {
  const auto g = build_grid(1.0, 4);
  const std::size_t m = 10000;
  const auto p = sample_paths(g, 3, m, 77);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) {
      double c = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        c += p.increment(2, i)[a] * p.increment(2, i)[b];
      c /= m;
      const double dt = g.dt(2);
      CHECK(std::abs(c) < 5.0 * dt / std::sqrt(double(m)));
    }
}

TEST_CASE("constant targets regress to the constant") {
  Eigen::MatrixXd x(50, 2);
  std::vector<double> y(50, 3.25);
  for (int i = 0; i < 50; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = i * 0.1;
  }
  const auto fit = regress_conditional(y, x);
  for (double v : fit.fitted) CHECK(v == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("exact linear fit recovers coefficients") {
  Eigen::MatrixXd x(20, 2);
  std::vector<double> y(20);
  for (int i = 0; i < 20; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = i - 7.5;
    y[i] = 2.0 * x(i, 1);
  }
  const auto fit = regress_conditional(y, x);
  CHECK(std::abs(fit.coefficients(0)) < 1e-10);
  CHECK(std::abs(fit.coefficients(1) - 2.0) < 1e-10);
}

TEST_CASE("rank deficient design gives the minimum-norm answer") {
  Eigen::MatrixXd x(10, 2);
  std::vector<double> y(10, 4.0);
  for (int i = 0; i < 10; ++i) x(i, 0) = x(i, 1) = 1.0;
  const auto fit = regress_conditional(y, x);
  CHECK(fit.coefficients(0) == doctest::Approx(2.0));
  CHECK(fit.coefficients(1) == doctest::Approx(2.0));
}

TEST_CASE("bin regression of x^2 matches bin means") {
  const std::size_t m = 100000;
  RegressionBasis basis = RegressionBasis::bins(10);
  basis.bin_range = std::make_pair(0.0, 1.0);
  std::vector<double> xs(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = (i + 0.5) / m;
    y[i] = xs[i] * xs[i];
  }
  const auto design = design_matrix(basis, 1.0, xs, 1);
  const auto fit = regress_conditional(y, design);
  for (std::size_t i = 0; i < m; i += 997) {
    const int b = bin_index(xs[i], 0.0, 1.0, 10);
    const double mid = (b + 0.5) / 10.0;
    CHECK(std::abs(fit.fitted[i] - mid * mid) < 0.02);
  }
}

TEST_CASE("bin index clamps to the range") {
  CHECK(bin_index(-5.0, 0.0, 1.0, 10) == 0);
  CHECK(bin_index(5.0, 0.0, 1.0, 10) == 9);
  CHECK(bin_index(0.55, 0.0, 1.0, 10) == 5);
}
