#include <cmath>

#include "bsde/constants.hpp"
#include "bsde/error.hpp"
#include "bsde/rng.hpp"
#include "doctest.h"

using namespace bsde;

TEST_CASE("conjugate exponent") {
  CHECK(conjugate_exponent(1.5) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(conjugate_exponent(4.0 / 3.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(conjugate_exponent(1.9) == doctest::Approx(19.0 / 9.0).epsilon(1e-14));
  CHECK_THROWS_AS(conjugate_exponent(2.0), Error);
  CHECK_THROWS_AS(conjugate_exponent(1.0), Error);
  const CounterRng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double a = 1.01 + 0.98 * rng.uniform(0, i);
    CHECK(std::abs(1.0 / a + 1.0 / conjugate_exponent(a) - 1.0) < 1e-12);
  }
}

TEST_CASE("beta integral") {
  CHECK(beta_integral(TimeFunction::constant(0.3), 2.0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(beta_integral(TimeFunction::zero(), 7.0) == 0.0);
  CHECK(beta_integral(TimeFunction::exponential(1.0, 1.0), 1.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  // generic integrand goes through quadrature
  const TimeFunction generic([](double t) { return std::exp(-t); }, "generic");
  CHECK(std::abs(beta_integral(generic, 1.0) - (1.0 - std::exp(-1.0))) < 1e-8);
  const TimeFunction negative([](double t) { return t - 0.5; }, "neg");
  CHECK_THROWS_AS(beta_integral(negative, 1.0), Error);
}

TEST_CASE("quadrature") {
  const auto r = integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(std::abs(r.value - (std::exp(1.0) - 1.0)) < 1e-12);
  CHECK_FALSE(r.capped);
  CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("khat") {
  CHECK(khat(1.5) == doctest::Approx(45.5625).epsilon(1e-13));
  const CounterRng rng(4);
  for (int i = 0; i < 100; ++i) {
    const double a = 1.01 + 0.98 * rng.uniform(0, i);
    CHECK(khat(a) > 0.0);
  }
  CHECK_THROWS_AS(khat(2.5), Error);
}

TEST_CASE("khat certifies the Young step at alpha 1.5") {
  const double a = 1.5, as = 3.0, kh = khat(a);
  double worst = 1e300;
  for (int i = 1; i <= 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int l = 0; l < 10; ++l) {
        const double g = 0.2 * i, y = 1.0 + j, z = 10.0 * l / 9.0;
        const double lhs = 2.0 * g * y * std::pow(z, a);
        const double rhs = std::pow(y, 2.0 / as) * z * z / as +
                           kh * std::pow(g, 2.0 / (2.0 - a)) * y * y;
        worst = std::min(worst, rhs - lhs);
      }
  CHECK(worst >= -1e-9);
}

TEST_CASE("k threshold") {
  CHECK(k_threshold(1.5) == doctest::Approx(std::pow(12.0, 1.5)).epsilon(1e-14));
  const CounterRng rng(5);
  for (int i = 0; i < 100; ++i) {
    const double a = 1.01 + 0.98 * rng.uniform(0, i);
    const double as = conjugate_exponent(a), k = k_threshold(a);
    CHECK(std::pow(k, 2.0 / as) >= 2.0 * std::log(k));
    CHECK(k > std::pow(as / 2.0, as / 2.0));
  }
}

TEST_CASE("mu schedule") {
  const auto flat = mu_schedule(1.5, TimeFunction::zero(), TimeFunction::zero(), 2.0);
  CHECK(flat(0.0) == 2.0);
  CHECK(flat(3.0) == 2.0);
  const auto mu = mu_schedule(1.5, TimeFunction::constant(1.0), TimeFunction::zero(), 1.0);
  for (double s : {0.0, 0.1, 0.5, 1.0})
    CHECK(mu(s) == doctest::Approx(std::exp(15.1875 * s)).epsilon(1e-10));
  CHECK_THROWS_AS(mu_schedule(1.5, TimeFunction::zero(), TimeFunction::zero(), 0.5), Error);

  const CounterRng rng(6);
  for (int i = 0; i < 20; ++i) {
    const auto m = mu_schedule(1.2 + 0.6 * rng.uniform(0, 3 * i),
                               TimeFunction::exponential(rng.uniform(0, 3 * i + 1), 1.0),
                               TimeFunction::constant(rng.uniform(0, 3 * i + 2)), 1.0);
    double prev = m(0.0);
    CHECK(prev == 1.0);
    for (double s = 0.05; s <= 1.0; s += 0.05) {
      CHECK(m(s) >= prev);
      prev = m(s);
    }
  }
}

TEST_CASE("bound constant K") {
  const auto K = bound_constant_K(1.5, 1.0, TimeFunction::zero(), TimeFunction::zero());
  CHECK(K.log_value == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(K.value == doctest::Approx(162754.791419).epsilon(1e-10));
  double prev = 0.0;
  for (double T : {0.25, 0.5, 1.0, 2.0}) {
    const auto k = bound_constant_K(1.5, T, TimeFunction::constant(0.3),
                                    TimeFunction::exponential(0.2, 1.0));
    CHECK(k.log_value >= prev);
    CHECK(k.log_value >= 0.0);
    prev = k.log_value;
  }
}

TEST_CASE("bound constant K_p") {
  // (p/(p-1))^p ((8 mu)^p e^{pA} + 1) e^{p mu k^{2/alpha*}} with mu=1, A=0:
  // 4 * 65 * e^24
  const auto Kp = bound_constant_Kp(2.0, 1.5, 1.0, TimeFunction::zero(), TimeFunction::zero());
  CHECK(Kp.log_value == doctest::Approx(std::log(260.0) + 24.0).epsilon(1e-14));
  for (double p : {1.01, 3.0}) {
    const double expect = p * std::log(p / (p - 1.0)) + std::log(std::pow(8.0, p) + 1.0) + 12.0 * p;
    CHECK(bound_constant_Kp(p, 1.5, 1.0, TimeFunction::zero(), TimeFunction::zero()).log_value ==
          doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK_THROWS_AS(bound_constant_Kp(1.0, 1.5, 1.0, TimeFunction::zero(), TimeFunction::zero()), Error);
  const ConstantSet cs(1.5, 1.0, TimeFunction::constant(0.4), TimeFunction::constant(0.1));
  for (double p : {1.5, 2.0, 4.0})
    CHECK(cs.K_p(p).log_value >= std::log(p * cs.mu_T()) + cs.A_T() - 1e-12);
}

TEST_CASE("theta constants") {
  const auto t = theta_constants(2.0, TimeFunction::constant(1.0), 1.5, 1.0);
  CHECK(t.k_alpha == doctest::Approx(std::exp(1.5)).epsilon(1e-15));
  CHECK(t.delta_p == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(theta_constants(2.0, TimeFunction::zero(), 1.5, 1.0), Error);
  // (ln(k_alpha + x))^{alpha*/2} is concave on R+
  const double ka = t.k_alpha, h = 0.01;
  auto fn = [&](double x) { return std::pow(std::log(ka + x), 1.5); };
  double worst = -1e300;
  for (double x = h; x < 100.0; x += h)
    worst = std::max(worst, fn(x - h) - 2.0 * fn(x) + fn(x + h));
  CHECK(worst <= 1e-9);
}

TEST_CASE("constant set invariants and dump stability") {
  const ConstantSet a(1.5, 1.0, TimeFunction::exponential(0.5, 1.0), TimeFunction::exponential(0.2, 1.0));
  const ConstantSet b(1.5, 1.0, TimeFunction::exponential(0.5, 1.0), TimeFunction::exponential(0.2, 1.0));
  CHECK(a.dump() == b.dump());
  CHECK(std::abs(1.0 / a.alpha() + 1.0 / a.alpha_star() - 1.0) < 1e-12);
  CHECK(a.mu(0.0) == 1.0);
  CHECK(a.A(0.0) == 0.0);
  CHECK(a.mu_T() >= 1.0);
  CHECK(a.K().log_value >= 0.0);
  CHECK(a.dump().find("\"log_K\"") != std::string::npos);
}

TEST_CASE("time function parsing round trips") {
  for (const char* s : {"zero", "const(0.3)", "exp(0.5,1)"}) {
    const auto f = parse_time_function(s);
    CHECK(parse_time_function(f.description()).description() == f.description());
  }
  CHECK_THROWS_AS(parse_time_function("exp(1)"), Error);
  CHECK_THROWS_AS(parse_time_function("const(x)"), Error);
}
