#include <cmath>

#include "bsde/error.hpp"
#include "bsde/verify.hpp"
#include "doctest.h"

using namespace bsde;

namespace {

struct Fixture {
  TimeGrid grid = build_grid(1.0, 32);
  PathBundle bundle = sample_paths(grid, 1, 20000, 3);
  RegressionBasis basis = RegressionBasis::polynomial(3, true);
};

}  // namespace

TEST_CASE("fhat of a zero solution is f") {
  Fixture fx;
  const auto sol = solve_bounded(zero_generator(), make_terminal("zero"), fx.bundle, fx.basis);
  CoefficientProfile p;
  p.f = FProcess::of_time(TimeFunction::constant(2.0));
  const auto fh = fhat_process(p, sol);
  CHECK(fh.size() == (fx.grid.steps() + 1) * fx.bundle.count());
  CHECK(fh[5] == doctest::Approx(2.0));
  // beta |Y'| + gamma ln(e + |Z'|)^{alpha*/2} with Y' = 3, Z' = 0
  const auto s3 = solve_bounded(zero_generator(), make_terminal("const(3)"), fx.bundle, fx.basis);
  p.beta = TimeFunction::constant(1.0);
  p.gamma = TimeFunction::constant(1.0);
  CHECK(fhat_process(p, s3)[7] == doctest::Approx(2.0 + 3.0 + 1.0).epsilon(1e-6));
}

TEST_CASE("fhat moments") {
  const auto grid = build_grid(1.0, 4);
  const std::size_t M = 50;
  std::vector<double> zero((grid.steps() + 1) * M, 0.0), one((grid.steps() + 1) * M, 1.0);
  CHECK(verify_fhat_moment(zero, grid, M, 2.0, 2.0).fhat.value() == doctest::Approx(1.0));
  // (int_0^1 1)^{2/2} = 1, times p = 2
  CHECK(verify_fhat_moment(one, grid, M, 2.0, 2.0).fhat.value() == doctest::Approx(std::exp(2.0)));
}

TEST_CASE("zero problem satisfies the moment bounds") {
  Fixture fx;
  const auto xi = make_terminal("clamp_bt(3)");
  const auto sol = solve_bounded(zero_generator(), xi, fx.bundle, fx.basis);
  const ConstantSet cs(1.5, 1.0, TimeFunction::zero(), TimeFunction::zero());
  const auto pw = verify_pointwise_bound(sol, cs, xi, FProcess::zero());
  CHECK(pw.verdict == BoundVerdict::Satisfied);
  CHECK(pw.log_scale);
  const auto os = verify_pointwise_bound(sol, cs, xi, FProcess::zero(), PointwiseVariant::OneSided);
  CHECK(os.verdict == BoundVerdict::Satisfied);
  const auto sb = verify_sup_bound(sol, cs, xi, FProcess::zero(), 2.0);
  CHECK(sb.verdict == BoundVerdict::Satisfied);
  CHECK(bound_csv(sb).rfind("time,log_lhs,log_rhs,se,verdict", 0) == 0);
}

TEST_CASE("margins grow with the constant") {
  Fixture fx;
  const auto xi = make_terminal("clamp_bt(3)");
  const auto sol = solve_bounded(zero_generator(), xi, fx.bundle, fx.basis);
  const ConstantSet small(1.5, 1.0, TimeFunction::zero(), TimeFunction::zero());
  const ConstantSet large(1.5, 1.0, TimeFunction::constant(1.0), TimeFunction::constant(1.0));
  REQUIRE(large.K().log_value > small.K().log_value);
  const auto a = verify_pointwise_bound(sol, small, xi, FProcess::zero());
  const auto b = verify_pointwise_bound(sol, large, xi, FProcess::zero());
  CHECK(b.worst_margin >= a.worst_margin);
}

TEST_CASE("comparison") {
  Fixture fx;
  const auto xi = make_terminal("clamp_bt(3)");
  const auto s = solve_bounded(zero_generator(), xi, fx.bundle, fx.basis);
  const auto same = verify_comparison(s, s);
  CHECK(same.verdict == BoundVerdict::Satisfied);
  CHECK(same.violations == 0);
  CHECK_FALSE(same.log_scale);

  const auto lower = solve_bounded(expression_generator("-abs(y)", CoefficientProfile{}), xi,
                                   fx.bundle, fx.basis);
  CHECK(verify_comparison(lower, s).verdict == BoundVerdict::Satisfied);

  const auto up = solve_bounded(zero_generator(), make_terminal("clamp_bt_shift(3,1)"), fx.bundle, fx.basis);
  CHECK(verify_comparison(s, up).verdict == BoundVerdict::Satisfied);
  // reversed order breaks the terminal precondition
  try {
    verify_comparison(up, s);
    FAIL("expected a precondition violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionViolation);
  }
  CHECK(comparison_epsilon(s, up, {}) > 0.0);
}
