#include <cmath>
#include <vector>

#include "bsde/error.hpp"
#include "bsde/expression.hpp"
#include "bsde/generators.hpp"
#include "bsde/rng.hpp"
#include "doctest.h"

using namespace bsde;

namespace {

EvalPoint at(double t, const std::vector<double>& b) {
  EvalPoint p;
  p.t = t;
  p.b = b;
  return p;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Independent transcriptions of the two worked generators.
double ex1_oracle(double t, const std::vector<double>& b, double y,
                  const std::vector<double>& z, double be, double ga) {
  const double ly = y <= 0.0 ? std::cbrt(y) : std::sin(y);
  double qs = 0.0;
  for (double zi : z) qs += zi <= -2.0 ? -zi : zi >= 2.0 ? -2.0 * zi : -1.5 * zi - 1.0;
  (void)t;
  return norm2(b) + be * ly + ga * qs + ga * std::pow(norm2(z), 1.5);
}

double ex2_oracle(const std::vector<double>& b, double y,
                  const std::vector<double>& z, double be, double ga) {
  double ls = 0.0;
  for (double zi : z) ls += std::pow(std::log(std::exp(1.0) + std::abs(zi)), 1.5);
  return norm2(b) + be * (y <= 0.0 ? std::sqrt(-y) : 0.0) + ga * ls +
         2.0 * ga * std::pow(norm2(z), 1.5);
}

}  // namespace

TEST_CASE("q values") {
  CHECK(example1_q(-2.0) == 2.0);
  CHECK(example1_q(2.0) == -4.0);
  CHECK(example1_q(0.0) == -1.0);
  CHECK(example1_q(-3.0) == 3.0);
  CHECK(example1_q(1.0) == -2.5);
  // continuous at the knots
  CHECK(std::abs(example1_q(-2.0 + 1e-12) - 2.0) < 1e-9);
  CHECK(std::abs(example1_q(2.0 - 1e-12) + 4.0) < 1e-9);
}

TEST_CASE("log growth") {
  CHECK(log_growth(0.0, 3.0) == doctest::Approx(1.0));
  CHECK(log_growth(-2.0, 3.0) == doctest::Approx(log_growth(2.0, 3.0)));
}

TEST_CASE("example 2 hand values") {
  const auto g = builtin_example_2(TimeFunction::constant(1.0), TimeFunction::constant(1.0), 1);
  std::vector<double> b = {0.0}, z = {0.0};
  CHECK(g(at(0.0, b), -4.0, z) == doctest::Approx(2.0 + 1.0));
  CHECK(g(at(0.0, b), 4.0, z) == doctest::Approx(1.0));
  b = {-3.0};
  CHECK(g(at(0.5, b), 0.0, z) == doctest::Approx(4.0));
}

TEST_CASE("worked generators match independent formulas") {
  const auto beta = TimeFunction::exponential(0.5, 1.0);
  const auto gamma = TimeFunction::exponential(0.2, 1.0);
  const CounterRng rng(17);
  for (std::size_t d : {1u, 2u, 3u}) {
    const auto g1 = builtin_example_1(beta, gamma, d);
    const auto g2 = builtin_example_2(beta, gamma, d);
    for (std::uint64_t i = 0; i < 300; ++i) {
      const std::uint64_t c = i * 16;
      const double t = rng.uniform(0, c);
      const double y = 20.0 * rng.uniform(0, c + 1) - 10.0;
      std::vector<double> b(d), z(d);
      for (std::size_t k = 0; k < d; ++k) {
        b[k] = 2.0 * rng.normal(0, c + 2 + k);
        z[k] = 8.0 * rng.normal(0, c + 8 + k);
      }
      const double e1 = ex1_oracle(t, b, y, z, beta(t), gamma(t));
      const double e2 = ex2_oracle(b, y, z, beta(t), gamma(t));
      CHECK(std::abs(g1(at(t, b), y, z) - e1) <= 1e-12 * (1.0 + std::abs(e1)));
      CHECK(std::abs(g2(at(t, b), y, z) - e2) <= 1e-12 * (1.0 + std::abs(e2)));
    }
  }
}

TEST_CASE("catalog generators") {
  GeneratorSpec s;
  for (const auto& id : generator_catalog()) {
    s.id = id;
    s.expression = "y";
    CHECK_NOTHROW(make_generator(s));
  }
  s.id = "nope";
  CHECK_THROWS_AS(make_generator(s), Error);
  const auto lin = linear_generator(2.0, 3.0, 2);
  std::vector<double> b = {0.0, 0.0}, z = {1.0, -2.0};
  CHECK(lin(at(0.0, b), 1.5, z) == doctest::Approx(3.0 - 3.0));
  const auto cp = convex_power_generator(TimeFunction::constant(2.0), 1);
  std::vector<double> b1 = {0.0}, z1 = {4.0};
  CHECK(cp(at(0.0, b1), 0.0, z1) == doctest::Approx(16.0));
}

TEST_CASE("terminal data") {
  std::vector<double> b = {5.0};
  CHECK(make_terminal("clamp_bt(3)")(b) == 3.0);
  CHECK(make_terminal("clamp_bt_shift(2,1)")(b) == 3.0);
  CHECK(make_terminal("bt")(b) == 5.0);
  CHECK(make_terminal("const(2.5)")(b) == 2.5);
  b = {-5.0};
  CHECK(make_terminal("abs_bt")(b) == 5.0);
  CHECK(make_terminal("zero")(b) == 0.0);
  CHECK_THROWS_AS(make_terminal("foo"), Error);
}

TEST_CASE("truncation") {
  const auto bt = make_terminal("bt");
  std::vector<double> b = {5.0};
  CHECK(truncate_terminal(bt, {3, 10})(b) == 3.0);
  b = {-5.0};
  CHECK(truncate_terminal(bt, {3, 10})(b) == -5.0);
  CHECK(truncate_terminal(bt, {3, 2})(b) == -2.0);
  CHECK_THROWS_AS(truncate_terminal(bt, {0, 2}), Error);

  std::vector<double> b0 = {0.0}, z = {0.0};
  const auto ten = expression_generator("10", CoefficientProfile{});
  const auto mten = expression_generator("-10", CoefficientProfile{});
  const auto t1 = truncate_generator(ten, {2, 5});
  CHECK(t1(at(0.0, b0), 0.0, z) == 2.0);
  CHECK(t1.has(flags::kBounded));
  const auto t2 = truncate_generator(mten, {1, 4});
  CHECK(t2(at(std::log(2.0), b0), 0.0, z) == doctest::Approx(-2.0));
}

TEST_CASE("reflection is an involution") {
  const auto g = builtin_example_1(TimeFunction::constant(0.5), TimeFunction::constant(0.5), 2);
  const auto r = reflect_generator(g);
  const auto rr = reflect_generator(r);
  const CounterRng rng(8);
  for (std::uint64_t i = 0; i < 100; ++i) {
    std::vector<double> b = {rng.normal(0, 6 * i), rng.normal(0, 6 * i + 1)};
    std::vector<double> z = {3 * rng.normal(0, 6 * i + 2), 3 * rng.normal(0, 6 * i + 3)};
    std::vector<double> mz = {-z[0], -z[1]};
    const double y = 4 * rng.normal(0, 6 * i + 4);
    CHECK(r(at(0.3, b), y, z) == doctest::Approx(-g(at(0.3, b), -y, mz)));
    CHECK(rr(at(0.3, b), y, z) == doctest::Approx(g(at(0.3, b), y, z)));
  }
}

TEST_CASE("theta difference on the diagonal") {
  // With (y, z) = (Y', Z') the primary variant reduces to g(Y',Z') + th/(1-th) (g - g')(Y',Z').
  const auto g = builtin_example_2(TimeFunction::constant(0.5), TimeFunction::constant(0.5), 1);
  const auto gp = linear_generator(1.0, 0.5, 1);
  auto y = std::make_shared<std::vector<double>>(std::vector<double>{1.5, -0.7});
  auto z = std::make_shared<std::vector<double>>(std::vector<double>{0.3});
  PathField prime;
  prime.count = 1;
  prime.dims = 1;
  prime.steps = 1;
  prime.y = y;
  prime.z = z;
  for (double th : {0.1, 0.5, 0.9}) {
    const auto d = theta_difference_generator(g, gp, th, prime);
    std::vector<double> b = {0.2};
    EvalPoint p = at(0.0, b);
    p.step = 0;
    p.path = 0;
    const std::vector<double> zz = {0.3};
    const double gv = g(p, 1.5, zz), gpv = gp(p, 1.5, zz);
    CHECK(d(p, 1.5, zz) == doctest::Approx(gv + th / (1 - th) * (gv - gpv)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(theta_difference_generator(g, gp, 1.0, prime), Error);
}

TEST_CASE("combinations") {
  const auto a = linear_generator(1.0, 0.0);
  const auto b = linear_generator(-1.0, 0.0);
  std::vector<double> b0 = {0.0}, z = {0.0};
  CHECK(combine_sum(2.0, a, 3.0, b)(at(0, b0), 1.0, z) == doctest::Approx(-1.0));
  CHECK(combine_max(a, b)(at(0, b0), -2.0, z) == 2.0);
  CHECK(combine_min(a, b)(at(0, b0), -2.0, z) == -2.0);
}

TEST_CASE("expression grammar") {
  std::vector<double> z = {3.0, 4.0}, b = {1.0};
  ExprVars v;
  v.t = 0.5;
  v.y = -2.0;
  v.z = z;
  v.b = b;
  CHECK(Expression::parse("1 + 2 * 3")(v) == 7.0);
  CHECK(Expression::parse("2 ^ 3 ^ 2")(v) == doctest::Approx(512.0));
  CHECK(Expression::parse("-y")(v) == 2.0);
  CHECK(Expression::parse("|y| + znorm")(v) == 7.0);
  CHECK(Expression::parse("z2 - z1")(v) == 1.0);
  CHECK(Expression::parse("max(y, t) + ind(y)")(v) == 0.5);
  CHECK(Expression::parse("sqrt(1 + z1^2 * 0)")(v) == 1.0);
  CHECK(Expression::parse("2·y − 1")(v) == -5.0);
  CHECK(Expression::parse("z2").max_z_index() == 2);
  CHECK_THROWS_AS(Expression::parse("1 +"), Error);
  CHECK_THROWS_AS(Expression::parse("foo(1)"), Error);
  CHECK_THROWS_AS(Expression::parse("(1"), Error);
}

TEST_CASE("process parsing") {
  const auto f = parse_process("const(2) + abs_b(3)", TimeFunction::zero(), TimeFunction::zero());
  std::vector<double> b = {-1.0};
  CHECK(f(at(0.0, b)) == 5.0);
  CHECK_THROWS_AS(parse_process("bogus(1)", TimeFunction::zero(), TimeFunction::zero()), Error);
}
