// One line per acceptance criterion; exit status is nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bsde/appendix.hpp"
#include "bsde/conditions.hpp"
#include "bsde/constants.hpp"
#include "bsde/error.hpp"
#include "bsde/experiment.hpp"
#include "bsde/rng.hpp"
#include "bsde/solver.hpp"
#include "bsde/verify.hpp"

using namespace bsde;

namespace {

// Tolerances and budgets.
constexpr double kLemmaScaleTol = 1e-9;
constexpr std::size_t kLemmaSamples = 10000;
constexpr double kLemmaBudget = 30.0;
constexpr double kExactTol = 1e-12;
constexpr double kConvexBudget = 30.0;
constexpr double kConstantsBudget = 10.0;
constexpr double kConstantOracleTol = 1e-6;
constexpr double kOracleTol = 5e-3;
constexpr std::size_t kPaths = 100000;
constexpr int kSteps = 64;
constexpr double kOrderTol = 0.005;
constexpr double kUniquenessTol = 5e-3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

const std::string kConfigs = BSDEKIT_CONFIGS;

// ---- 1: appendix inequalities ----
Outcome criterion1() {
  const auto t0 = Clock::now();
  std::vector<std::string> failed;
  std::size_t checks = 0;
  int families_min = 1 << 30;
  for (LemmaId lem : {LemmaId::A1, LemmaId::A2, LemmaId::A3}) {
    const auto& fams = lemma_family_catalog(lem);
    families_min = std::min<int>(families_min, static_cast<int>(fams.size()));
    for (const auto& id : fams) {
      const auto f = lemma_family(lem, id, derive_seed(1, "lemma"));
      const auto s = lemma_samples(kLemmaSamples, derive_seed(1, "lemma-sweep"), f.a.value_or(1.0));
      const LemmaReport r = lem == LemmaId::A1   ? lemmaA1_check(f, *f.k1, *f.k2, s)
                            : lem == LemmaId::A2 ? lemmaA2_check(f, s)
                                                 : lemmaA3_check(f, s);
      for (const auto& c : r.checks) {
        ++checks;
        // Verdict::Fail already encodes margin < -tol * (1 + |rhs|).
        if (c.verdict != Verdict::Pass) {
          const std::string tag = c.condition + "/" + id;
          failed.push_back(tag + "(" + fmt(c.worst_margin) + ")");
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = failed.empty() && families_min >= 6 && secs < kLemmaBudget;
  std::ostringstream os;
  os << checks << " checks, " << failed.size() << " failing, " << fmt(secs) << " s";
  if (!failed.empty()) {
    os << ":";
    for (std::size_t i = 0; i < failed.size() && i < 12; ++i) os << " " << failed[i];
    if (failed.size() > 12) os << " ...";
  }
  o.detail = os.str();
  (void)kLemmaScaleTol;
  return o;
}

// ---- 2: construction exactness ----
Outcome criterion2() {
  const auto t0 = Clock::now();
  double worst_off_band = 0.0, worst_convex = 0.0;
  bool gbar_zero = true;
  int built = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (LemmaId lem : {LemmaId::A2, LemmaId::A3}) {
      const auto f = random_admissible(lem, derive_seed(seed, "admissible"));
      const auto c = lem == LemmaId::A2 ? construct_A2_envelope(f) : construct_A3_envelope(f);
      ++built;
      for (double x = -20.0; x <= 20.0; x += 0.005) {
        if (std::abs(x) < c.a) continue;
        worst_off_band = std::max(worst_off_band, std::abs(c.g(x) - f(x)) / (1.0 + std::abs(f(x))));
      }
      if (lem == LemmaId::A2) {
        gbar_zero = gbar_zero && c.gbar(0.0) == 0.0;
        worst_convex = std::min({worst_convex, min_second_difference(c.gbar1, -10.0, 10.0, 1000),
                                 min_second_difference(c.gbar2, -10.0, 10.0, 1000)});
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst_off_band <= kExactTol && gbar_zero && worst_convex >= 0.0 && secs < kConvexBudget;
  o.detail = std::to_string(built) + " constructions, off-band error " + fmt(worst_off_band) +
             ", gbar(0)=0 " + (gbar_zero ? "yes" : "no") + ", min second difference " +
             fmt(worst_convex) + ", " + fmt(secs) + " s";
  return o;
}

// ---- 3: constants ----
Outcome criterion3() {
  const auto t0 = Clock::now();
  const CounterRng rng(derive_seed(3, "alpha"));
  double worst_young = 1e300, worst_conj = 0.0;
  bool k_ok = true;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const double a = 1.05 + 0.9 * rng.uniform(0, i);
    const double as = conjugate_exponent(a), kh = khat(a), k = k_threshold(a);
    worst_conj = std::max(worst_conj, std::abs(1.0 / a + 1.0 / as - 1.0));
    k_ok = k_ok && std::pow(k, 2.0 / as) >= 2.0 * std::log(k) && k > std::pow(as / 2.0, as / 2.0);
    // 10 x 10 x 10 grid in (gamma, y >= 1, |z|)
    for (int gi = 1; gi <= 10; ++gi)
      for (int yi = 0; yi < 10; ++yi)
        for (int zi = 0; zi < 10; ++zi) {
          const double g = 0.25 * gi, y = std::pow(2.0, yi), z = std::pow(3.0, zi) / 3.0;
          const double lhs = 2.0 * g * y * std::pow(z, a);
          const double rhs = std::pow(y, 2.0 / as) * z * z / as +
                             kh * std::pow(g, 2.0 / (2.0 - a)) * y * y;
          worst_young = std::min(worst_young, (rhs - lhs) / (1.0 + rhs));
        }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst_young >= -kLemmaScaleTol && k_ok && worst_conj <= kExactTol && secs < kConstantsBudget;
  o.detail = "young relative margin " + fmt(worst_young) + ", k properties " + (k_ok ? "ok" : "FAIL") +
             ", conjugate error " + fmt(worst_conj) + ", " + fmt(secs) + " s";
  return o;
}

double sup_gap(const SolutionField& a, const SolutionField& b) {
  double g = 0.0;
  for (std::size_t j = 0; j <= a.steps(); ++j)
    for (std::size_t i = 0; i < a.count(); ++i) g = std::max(g, std::abs(a.Y(j, i) - b.Y(j, i)));
  return g;
}

// ---- 4: solver oracles ----
Outcome criterion4() {
  const auto t0 = Clock::now();
  const auto grid = build_grid(1.0, kSteps);
  const auto bundle = sample_paths(grid, 1, kPaths, derive_seed(4, "paths"));
  const auto basis = RegressionBasis::polynomial(3, true);

  const auto c0 = solve_bounded(zero_generator(), make_terminal("const(1.7)"), bundle, basis);
  double e0 = 0.0;
  for (std::size_t j = 0; j <= kSteps; ++j)
    for (std::size_t i = 0; i < kPaths; ++i) {
      e0 = std::max(e0, std::abs(c0.Y(j, i) - 1.7));
      if (j < kSteps) e0 = std::max(e0, std::abs(c0.Z(j, i)[0]));
    }

  const auto ode = expression_generator("-y", CoefficientProfile{});
  const auto lz = linear_generator(0.0, 0.5);
  const auto one = make_terminal("const(1)"), bt = make_terminal("bt");
  const auto s2 = solve_bounded(ode, one, bundle, basis);
  const auto s3 = solve_bounded(lz, bt, bundle, basis);
  double e2 = 0.0, e3 = 0.0;
  for (std::size_t j = 0; j <= kSteps; ++j) {
    const double t = grid.node(j);
    for (std::size_t i = 0; i < kPaths; ++i) {
      e2 = std::max(e2, std::abs(s2.Y(j, i) - std::exp(t - 1.0)));
      e3 = std::max(e3, std::abs(s3.Y(j, i) - bundle.position(j, i)[0] - 0.5 * (1.0 - t)));
      if (j < kSteps) e3 = std::max(e3, std::abs(s3.Z(j, i)[0] - 1.0));
    }
  }
  const double p2 = sup_gap(s2, picard_solve(ode, one, bundle, basis));
  const double p3 = sup_gap(s3, picard_solve(lz, bt, bundle, basis));
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = e0 <= kConstantOracleTol && e2 <= kOracleTol && e3 <= kOracleTol && p2 <= kOracleTol &&
           p3 <= kOracleTol && secs < 300.0;
  o.detail = "constant " + fmt(e0) + ", ode " + fmt(e2) + ", linear-z " + fmt(e3) + ", picard gaps " +
             fmt(p2) + " / " + fmt(p3) + ", " + fmt(secs) + " s";
  return o;
}

// ---- 5: truncation ladder ----
Outcome criterion5() {
  const auto t0 = Clock::now();
  const auto c = load_config(kConfigs + "/ladder.ini");
  const auto grid = build_grid(c.horizon, c.steps, c.scheme, c.ratio);
  const auto bundle = experiment_paths(c, c.problem.generator.dims);
  const auto g = make_generator(c.problem.generator);
  const auto r = solve_ladder(g, make_terminal(c.problem.terminal), bundle, experiment_basis(c),
                              c.ladder_n, c.ladder_q);
  bool down = true;
  std::string gaps;
  for (std::size_t k = 1; k < r.diagonal_gaps.size(); ++k) {
    if (k >= 2) down = down && r.diagonal_gaps[k] < r.diagonal_gaps[k - 1];
    gaps += (k > 1 ? " " : "") + fmt(r.diagonal_gaps[k]);
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = c.paths >= kPaths && r.violation_fraction <= kOrderTol && down && secs < 600.0;
  o.detail = std::to_string(r.violations) + "/" + std::to_string(r.comparisons) +
             " order violations, diagonal gaps [" + gaps + "], " + fmt(secs) + " s";
  (void)grid;
  return o;
}

// ---- 6: a priori bounds ----
Outcome criterion6() {
  const auto t0 = Clock::now();
  const auto grid = build_grid(1.0, kSteps);
  const auto bundle = sample_paths(grid, 1, kPaths, derive_seed(6, "paths"));
  const auto basis = RegressionBasis::polynomial(3, true);
  const auto beta = TimeFunction::exponential(0.5, 1.0), gamma = TimeFunction::exponential(0.2, 1.0);
  const ConstantSet cs(1.5, 1.0, beta, gamma);
  const auto xi = make_terminal("clamp_bt(3)");
  bool ok = true;
  std::string detail;
  for (int ex = 1; ex <= 2; ++ex) {
    const auto g = ex == 1 ? builtin_example_1(beta, gamma, 1) : builtin_example_2(beta, gamma, 1);
    const auto sol = solve_bounded(g, xi, bundle, basis);
    const auto pw = verify_pointwise_bound(sol, cs, xi, g.profile().f);
    const auto sb = verify_sup_bound(sol, cs, xi, g.profile().f, 2.0);
    ok = ok && pw.verdict == BoundVerdict::Satisfied && sb.verdict == BoundVerdict::Satisfied;
    detail += "example" + std::to_string(ex) + " pointwise " + to_string(pw.verdict) + " (margin " +
              fmt(pw.worst_margin) + "), sup " + to_string(sb.verdict) + " (margin " +
              fmt(sb.worst_margin) + "); ";
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = ok && secs < 600.0;
  o.detail = detail + "log K " + fmt(cs.K().log_value) + ", log K_2 " + fmt(cs.K_p(2.0).log_value) +
             ", " + fmt(secs) + " s";
  return o;
}

// ---- 7: comparison ----
Outcome criterion7() {
  const auto t0 = Clock::now();
  const auto grid = build_grid(1.0, kSteps);
  const auto bundle = sample_paths(grid, 1, kPaths, derive_seed(7, "paths"));
  const auto basis = RegressionBasis::polynomial(3, true);
  const auto beta = TimeFunction::exponential(0.5, 1.0), gamma = TimeFunction::exponential(0.2, 1.0);
  const auto xi = make_terminal("clamp_bt(3)");
  const auto zero = solve_bounded(zero_generator(), xi, bundle, basis);
  const auto negabs =
      solve_bounded(expression_generator("-abs(y)", CoefficientProfile{}), xi, bundle, basis);
  const auto e2 = builtin_example_2(beta, gamma, 1);
  const auto a = solve_bounded(e2, make_terminal("clamp_bt(2)"), bundle, basis);
  const auto b = solve_bounded(e2, make_terminal("clamp_bt_shift(2,1)"), bundle, basis);
  const std::pair<const SolutionField*, const SolutionField*> pairs[] = {
      {&zero, &zero}, {&negabs, &zero}, {&a, &b}};
  const char* names[] = {"trivial", "-|y| vs 0", "example2 shifted"};
  bool ok = true;
  std::string detail;
  for (int k = 0; k < 3; ++k) {
    const auto r = verify_comparison(*pairs[k].first, *pairs[k].second);
    ok = ok && r.violation_fraction <= kOrderTol;
    detail += std::string(names[k]) + " " + std::to_string(r.violations) + "/" +
              std::to_string(r.comparisons) + "; ";
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = ok && secs < 600.0;
  o.detail = detail + fmt(secs) + " s";
  return o;
}

// ---- 8: condition checkers ----
Outcome criterion8() {
  const auto t0 = Clock::now();
  const auto beta = TimeFunction::exponential(0.5, 1.0), gamma = TimeFunction::exponential(0.2, 1.0);
  const auto cloud = make_cloud(CloudStrategy::AdversarialCorner, 10000, derive_seed(8, "cloud"));
  const auto e1 = builtin_example_1(beta, gamma, 1);
  const auto e2 = builtin_example_2(beta, gamma, 1);
  std::vector<std::string> bad;
  auto expect = [&](const Generator& g, const std::string& id, const SampleCloud& c, Verdict v) {
    const auto r = check_condition(g, id, c);
    if (r.verdict != v) bad.push_back(g.name() + ":" + id);
    return r;
  };
  for (const char* id : {"EX1", "EX2", "UNprime-i"}) expect(e1, id, cloud, Verdict::Pass);
  for (const char* id : {"EX1", "EX2", "UN-i"}) expect(e2, id, cloud, Verdict::Pass);
  expect(reflect_generator(e2), "UN-ii", reflect_cloud(cloud), Verdict::Pass);
  CoefficientProfile p{1.5, 1, TimeFunction::constant(1.0), TimeFunction::constant(1.0)};
  const auto quad = expression_generator("znorm^2", p);
  const auto qr = expect(quad, "EX1", cloud, Verdict::Fail);
  if (qr.witnesses.empty()) bad.push_back("no witness for znorm^2");

  const auto e1b = builtin_example_1(TimeFunction::constant(0.3), TimeFunction::constant(0.4), 1);
  for (const auto& g : {combine_sum(0.7, e1, 1.8, e1b), combine_max(e1, e1b), combine_min(e1, e1b)})
    expect(g, "UNprime-i", cloud, Verdict::Pass);
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = bad.empty() && secs < 120.0;
  o.detail = bad.empty() ? "all expected verdicts" : "unexpected:";
  for (const auto& b : bad) o.detail += " " + b;
  o.detail += ", " + fmt(secs) + " s";
  return o;
}

// ---- 9: uniqueness proxy ----
Outcome criterion9() {
  const auto t0 = Clock::now();
  const auto grid = build_grid(1.0, kSteps);
  const auto basis = RegressionBasis::polynomial(3, true);
  const auto g = expression_generator("-0.5*y + 0.3*sqrt(1 + znorm^2)", CoefficientProfile{});
  const auto xi = make_terminal("clamp_bt(3)");
  double worst = 0.0;
  std::string detail;
  for (std::uint64_t seed : {91u, 92u}) {
    const auto bundle = sample_paths(grid, 1, kPaths, derive_seed(seed, "paths"));
    const auto a = solve_bounded(g, xi, bundle, basis);
    const auto b = picard_solve(g, xi, bundle, basis);
    const double gap = sup_gap(a, b);
    // Reported only; the verdict uses the sup.
    std::vector<double> all;
    all.reserve((kSteps + 1) * kPaths);
    for (std::size_t j = 0; j <= kSteps; ++j)
      for (std::size_t i = 0; i < kPaths; ++i) all.push_back(std::abs(a.Y(j, i) - b.Y(j, i)));
    std::nth_element(all.begin(), all.begin() + all.size() * 99 / 100, all.end());
    worst = std::max(worst, gap);
    detail += "seed " + std::to_string(seed) + " sup gap " + fmt(gap) + " (q99 " +
              fmt(all[all.size() * 99 / 100]) + "); ";
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst <= kUniquenessTol && secs < 300.0;
  o.detail = detail + fmt(secs) + " s";
  return o;
}

// ---- 10: reproducibility ----
Outcome criterion10() {
  const auto t0 = Clock::now();
  std::string detail;
  bool same = true;
  for (const char* name : {"example1.ini", "example2_comparison.ini"}) {
    const auto c = load_config(kConfigs + "/" + name);
    const auto a = run_experiment(c), b = run_experiment(c);
    bool eq = a.summary_csv == b.summary_csv && a.text() == b.text() && a.checks.size() == b.checks.size();
    for (std::size_t k = 0; eq && k < a.checks.size(); ++k) eq = a.checks[k].csv == b.checks[k].csv;
    same = same && eq;
    detail += std::string(name) + (eq ? " identical; " : " DIFFERS; ");
  }
  Outcome o;
  o.pass = same;
  o.detail = detail + fmt(seconds_since(t0)) + " s";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("criterion %zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
