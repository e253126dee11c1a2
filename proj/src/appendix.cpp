#include "bsde/appendix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bsde/error.hpp"
#include "bsde/format.hpp"
#include "bsde/rng.hpp"

namespace bsde {
namespace {

using Fn = std::function<double(double)>;

double grid_tol(double scale) { return kConditionTol * (1.0 + std::abs(scale)); }

CloudPoint as_point(const LemmaSample& s) {
  CloudPoint p;
  p.y1 = s.x1;
  p.y2 = s.x2;
  p.theta = s.theta;
  return p;
}

CloudPoint at_x(double x) {
  CloudPoint p;
  p.y1 = x;
  return p;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

double test_span(double a) { return std::max(10.0, 4.0 * a); }

[[noreturn]] void bad_hypothesis(const ScalarFunction& f, const std::string& what,
                                 double x) {
  fail(ErrorKind::InvalidHypothesis,
       f.name + ": " + what + " fails near x=" + fmt_num(x));
}

double need(const std::optional<double>& v, const ScalarFunction& f,
            const char* what) {
  if (!v)
    fail(ErrorKind::Configuration, f.name + " does not declare " + what);
  return *v;
}

// Piecewise-linear interpolant through (xs, ys), extended linearly.
Fn piecewise_linear(std::vector<double> xs, std::vector<double> ys) {
  return [xs = std::move(xs), ys = std::move(ys)](double x) {
    std::size_t i = 1;
    while (i + 1 < xs.size() && x > xs[i]) ++i;
    const double s = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + s * (x - xs[i - 1]);
  };
}

}  // namespace

std::string to_string(LemmaId id) {
  switch (id) {
    case LemmaId::A1: return "A1";
    case LemmaId::A2: return "A2";
    case LemmaId::A3: return "A3";
  }
  return "?";
}

LemmaId parse_lemma(const std::string& s) {
  if (s == "A1" || s == "A.1") return LemmaId::A1;
  if (s == "A2" || s == "A.2") return LemmaId::A2;
  if (s == "A3" || s == "A.3") return LemmaId::A3;
  fail(ErrorKind::Configuration, "unknown lemma '" + s + "' (A1, A2, A3)");
}

double band_sup(const Fn& f, double a, double k) {
  if (a <= 0.0) return std::abs(f(0.0));
  constexpr std::size_t n = 4001;
  double m = 0.0;
  for (double x : linspace(-a, a, n)) m = std::max(m, std::abs(f(x)));
  return m + k * (2.0 * a / static_cast<double>(n - 1)) / 2.0;
}

double min_second_difference(const Fn& f, double lo, double hi,
                             std::size_t nodes) {
  require(nodes >= 3 && hi > lo, ErrorKind::InvalidArgument,
          "second difference needs at least 3 nodes on a proper interval");
  const auto xs = linspace(lo, hi, nodes);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < nodes; ++i) {
    const double d = f(xs[i - 1]) - 2.0 * f(xs[i]) + f(xs[i + 1]);
    worst = std::min(worst, d + grid_tol(f(xs[i])));
  }
  return worst;
}

namespace {

// Location of the most negative second difference, for messages.
double worst_convexity_node(const Fn& f, double lo, double hi,
                            std::size_t nodes) {
  const auto xs = linspace(lo, hi, nodes);
  double worst = std::numeric_limits<double>::infinity(), at = lo;
  for (std::size_t i = 1; i + 1 < nodes; ++i) {
    const double d = f(xs[i - 1]) - 2.0 * f(xs[i]) + f(xs[i + 1]) +
                     grid_tol(f(xs[i]));
    if (d < worst) {
      worst = d;
      at = xs[i];
    }
  }
  return at;
}

void check_phi(const ScalarFunction& f, double span) {
  require(static_cast<bool>(f.phi), ErrorKind::Configuration,
          f.name + " does not declare a growth envelope phi");
  double prev = f.phi(0.0);
  for (double r : linspace(0.0, span, 2001)) {
    const double p = f.phi(r);
    if (p < -grid_tol(p)) bad_hypothesis(f, "phi >= 0", r);
    if (p < prev - grid_tol(p)) bad_hypothesis(f, "phi nondecreasing", r);
    prev = p;
    for (double x : {r, -r})
      if (std::abs(f(x)) > p + grid_tol(p)) bad_hypothesis(f, "|f| <= phi", x);
  }
}

void check_lipschitz(const ScalarFunction& f, double lo, double hi, double k,
                     const char* what) {
  if (!(hi > lo)) return;
  const auto xs = linspace(lo, hi, 4001);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double d = std::abs(f(xs[i + 1]) - f(xs[i]));
    if (d > k * (xs[i + 1] - xs[i]) + grid_tol(f(xs[i])))
      bad_hypothesis(f, what, xs[i]);
  }
}

}  // namespace

void validate_hypotheses(const ScalarFunction& f, LemmaId lemma) {
  require(static_cast<bool>(f.eval), ErrorKind::Configuration,
          "scalar function has no evaluator");
  switch (lemma) {
    case LemmaId::A1: {
      const double k1 = need(f.k1, f, "k1"), k2 = need(f.k2, f, "k2");
      require(k1 > 0.0 && k2 > 0.0, ErrorKind::InvalidHypothesis,
              f.name + ": k1 and k2 must be positive");
      const auto neg = linspace(-10.0, 0.0, 4001);
      for (std::size_t i = 0; i + 1 < neg.size(); ++i) {
        // sgn(x1 - x2)(f(x1) - f(x2)) <= k1 |x1 - x2| for neighbours
        const double d = f(neg[i + 1]) - f(neg[i]);
        if (d > k1 * (neg[i + 1] - neg[i]) + grid_tol(f(neg[i])))
          bad_hypothesis(f, "monotonicity on R-", neg[i]);
      }
      check_lipschitz(f, 0.0, 10.0, k2, "Lipschitz on R+");
      break;
    }
    case LemmaId::A2: {
      const double a = need(f.a, f, "a"), k = need(f.k, f, "k");
      require(a >= 0.0 && k > 0.0, ErrorKind::InvalidHypothesis,
              f.name + ": need a >= 0 and k > 0");
      require(f.convex_rays, ErrorKind::InvalidHypothesis,
              f.name + " does not declare convex rays");
      check_lipschitz(f, -a, a, k, "Lipschitz on the band");
      const double L = test_span(a);
      for (auto [lo, hi] : {std::pair{-a - L, -a}, std::pair{a, a + L}})
        if (min_second_difference(f.eval, lo, hi, 2001) < 0.0)
          bad_hypothesis(f, "convexity on the rays",
                         worst_convexity_node(f.eval, lo, hi, 2001));
      check_phi(f, a + L);
      break;
    }
    case LemmaId::A3: {
      const double a = need(f.a, f, "a"), k = need(f.k, f, "k");
      require(a >= 0.0 && k > 0.0, ErrorKind::InvalidHypothesis,
              f.name + ": need a >= 0 and k > 0");
      require(f.monotone_rays, ErrorKind::InvalidHypothesis,
              f.name + " does not declare monotone rays");
      const double L = test_span(a);
      check_lipschitz(f, -a - L, a + L, k, "global Lipschitz");
      const auto right = linspace(a, a + L, 2001);
      for (std::size_t i = 0; i + 1 < right.size(); ++i)
        if (f(right[i + 1]) < f(right[i]) - grid_tol(f(right[i])))
          bad_hypothesis(f, "increasing on [a, inf)", right[i]);
      const auto left = linspace(-a - L, -a, 2001);
      for (std::size_t i = 0; i + 1 < left.size(); ++i)
        if (f(left[i + 1]) > f(left[i]) + grid_tol(f(left[i])))
          bad_hypothesis(f, "decreasing on (-inf, -a]", left[i]);
      check_phi(f, a + L);
      break;
    }
  }
}

ShiftedEnvelope construct_A2_shift(const Fn& g, double x0, double k0) {
  const double gx0 = g(x0);
  Fn gbar = [g, x0, gx0](double x) { return g(x + x0) - gx0; };
  Fn gbar1 = [gbar, k0](double x) { return x >= 0.0 ? gbar(x) : -k0 * x; };
  Fn gbar2 = [gbar, k0](double x) { return x <= 0.0 ? gbar(x) : k0 * x; };
  return {gbar, gbar1, gbar2};
}

EnvelopeConstruction construct_A2_envelope(const ScalarFunction& f) {
  const double a = need(f.a, f, "a"), k = need(f.k, f, "k");
  require(a >= 0.0 && k > 0.0, ErrorKind::InvalidHypothesis,
          f.name + ": need a >= 0 and k > 0");
  const Fn fn = f.eval;
  const double dl = f.left_derivative ? *f.left_derivative
                                      : one_sided_derivative(fn, -a, false);
  const double dr = f.right_derivative ? *f.right_derivative
                                       : one_sided_derivative(fn, a, true);
  require(std::isfinite(dl) && std::isfinite(dr), ErrorKind::InvalidHypothesis,
          f.name + ": one-sided derivatives at the band edges are not finite");

  EnvelopeConstruction c;
  c.lemma = LemmaId::A2;
  c.a = a;
  c.k = k;
  c.k0 = std::max({std::abs(dl), std::abs(dr), k});
  c.f = fn;
  if (a == 0.0) {
    c.x0 = 0.0;
    c.g = fn;
  } else {
    const double fa = fn(a), fma = fn(-a), k0 = c.k0;
    c.x0 = (fa - fma) / (2.0 * k0);
    if (std::abs(c.x0) > a * (1.0 + 1e-12))
      fail(ErrorKind::InvalidHypothesis,
           f.name + ": kink x0=" + fmt_num(c.x0) +
               " leaves the band; the declared Lipschitz constant is too small");
    const double x0 = c.x0;
    c.g = [fn, a, x0, k0, fa, fma](double x) {
      if (x <= -a || x >= a) return fn(x);
      if (x <= x0) return k0 * (x + a) + fma;
      return -k0 * (x - a) + fa;
    };
  }
  const Fn g = c.g;
  c.h = [fn, g](double x) { return fn(x) - g(x); };
  c.sup_f = band_sup(fn, a, k);
  c.M = c.k0 * a + 3.0 * c.sup_f;

  const double L = test_span(a);
  for (auto [lo, hi] : {std::pair{c.x0 - L, c.x0}, std::pair{c.x0, c.x0 + L}})
    if (min_second_difference(g, lo, hi, 1001) < 0.0)
      fail(ErrorKind::InvalidHypothesis,
           f.name + ": envelope not convex near x=" +
               fmt_num(worst_convexity_node(g, lo, hi, 1001)) +
               " (rays of f are not convex)");

  auto shifted = construct_A2_shift(g, c.x0, c.k0);
  c.gbar = shifted.gbar;
  c.gbar1 = shifted.gbar1;
  c.gbar2 = shifted.gbar2;
  for (const auto* fnp : {&c.gbar1, &c.gbar2})
    if (min_second_difference(*fnp, -10.0, 10.0, 1000) < 0.0)
      fail(ErrorKind::ConstructionBug,
           f.name + ": shifted extension not convex near x=" +
               fmt_num(worst_convexity_node(*fnp, -10.0, 10.0, 1000)));
  return c;
}

EnvelopeConstruction construct_A3_envelope(const ScalarFunction& f) {
  const double a = need(f.a, f, "a"), k = need(f.k, f, "k");
  require(a >= 0.0 && k > 0.0, ErrorKind::InvalidHypothesis,
          f.name + ": need a >= 0 and k > 0");
  const Fn fn = f.eval;
  EnvelopeConstruction c;
  c.lemma = LemmaId::A3;
  c.a = a;
  c.k = k;
  c.f = fn;
  if (a == 0.0) {
    c.g = fn;
  } else {
    // Build for f(a) < f(-a); otherwise work on f(-x) and reflect back.
    c.mirrored = !(fn(a) < fn(-a));
    const Fn base =
        c.mirrored ? Fn([fn](double x) { return fn(-x); }) : fn;
    const double fa = base(a), fma = base(-a);
    c.k0 = std::abs(fa - fma) / a;
    const double k0 = c.k0;
    const Fn g0 = [base, a, k0, fa, fma](double x) {
      if (x <= -a || x >= a) return base(x);
      if (x <= 0.0) return -k0 * (x + a) + fma;
      return fa;
    };
    c.g = c.mirrored ? Fn([g0](double x) { return g0(-x); }) : g0;
  }
  const Fn g = c.g;
  c.h = [fn, g](double x) { return fn(x) - g(x); };
  c.sup_f = band_sup(fn, a, k);
  c.M = 2.0 * c.sup_f;

  const double L = test_span(a);
  const auto left = linspace(-a - L, 0.0, 2001);
  for (std::size_t i = 0; i + 1 < left.size(); ++i)
    if (g(left[i + 1]) > g(left[i]) + grid_tol(g(left[i])))
      fail(ErrorKind::InvalidHypothesis,
           f.name + ": envelope not decreasing near x=" + fmt_num(left[i]));
  const auto right = linspace(0.0, a + L, 2001);
  for (std::size_t i = 0; i + 1 < right.size(); ++i)
    if (g(right[i + 1]) < g(right[i]) - grid_tol(g(right[i])))
      fail(ErrorKind::InvalidHypothesis,
           f.name + ": envelope not increasing near x=" + fmt_num(right[i]));
  return c;
}

std::vector<LemmaSample> lemma_samples(std::size_t count, std::uint64_t seed,
                                       double a) {
  const double s = std::max(a, 1.0);
  const CounterRng rng(derive_seed(seed, "lemma-samples"));
  const double knots[] = {0.0,     0.5 * a, -0.5 * a, a,      -a,
                          2.0 * a, -2.0 * a, 4.0 * s, -4.0 * s};
  const double thetas[] = {0.01, 0.5, 0.9, 0.99};
  const std::size_t n_uniform = count / 2, n_near = count / 4;
  std::vector<LemmaSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto u = [&](std::uint64_t j) { return rng.uniform(i, j); };
    LemmaSample p;
    if (i < n_uniform) {
      p.x1 = (2.0 * u(0) - 1.0) * 4.0 * s;
      p.x2 = (2.0 * u(1) - 1.0) * 4.0 * s;
      p.theta = u(2);
    } else if (i < n_uniform + n_near) {
      // theta in (1 - 1e-1, 1 - 1e-4), points near the band
      p.x1 = (2.0 * u(0) - 1.0) * 1.5 * s;
      p.x2 = (2.0 * u(1) - 1.0) * 1.5 * s;
      p.theta = 1.0 - std::pow(10.0, -(1.0 + 3.0 * u(2)));
    } else {
      const std::size_t j = i - n_uniform - n_near;
      const std::size_t combos = 9 * 9 * 4;
      const std::size_t c = j % combos;
      const double jitter = j < combos ? 0.0 : 0.01 * s;
      p.x1 = knots[c % 9] + jitter * (2.0 * u(0) - 1.0);
      p.x2 = knots[(c / 9) % 9] + jitter * (2.0 * u(1) - 1.0);
      p.theta = thetas[c / 81];
    }
    out.push_back(p);
  }
  return out;
}

const ConditionReport* LemmaReport::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.condition == id) return &c;
  return nullptr;
}

bool LemmaReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConditionReport& c) {
    return c.verdict == Verdict::Pass;
  });
}

std::string format_lemma_report(const LemmaReport& r) {
  std::ostringstream os;
  os << "lemma: " << to_string(r.lemma) << "\n";
  os << "family: " << r.family << "\n";
  if (r.construction) {
    const auto& c = *r.construction;
    os << "construction: a=" << fmt_num(c.a) << " k=" << fmt_num(c.k)
       << " k0=" << fmt_num(c.k0) << " x0=" << fmt_num(c.x0)
       << " M=" << fmt_num(c.M) << " mirrored=" << (c.mirrored ? 1 : 0)
       << "\n";
  }
  for (const auto& c : r.checks) {
    os << "check " << c.condition << ": " << to_string(c.verdict)
       << " worst_margin=" << fmt_num(c.worst_margin)
       << " failures=" << c.failures << "/" << c.samples_used << "\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(3, c.witnesses.size());
         ++i) {
      const auto& w = c.witnesses[i];
      os << "  witness: x1=" << fmt_num(w.point.y1)
         << " x2=" << fmt_num(w.point.y2)
         << " theta=" << fmt_num(w.point.theta) << " lhs=" << fmt_num(w.lhs)
         << " rhs=" << fmt_num(w.rhs) << "\n";
    }
  }
  return os.str();
}

LemmaReport lemmaA1_check(const ScalarFunction& f, double k1, double k2,
                          const std::vector<LemmaSample>& samples) {
  ScalarFunction declared = f;
  declared.k1 = k1;
  declared.k2 = k2;
  validate_hypotheses(declared, LemmaId::A1);
  ReportBuilder main("A.1", f.name);
  for (const auto& s : samples) {
    main.sample();
    const double eta = 1.0 - s.theta;
    const double d = (s.x1 - s.theta * s.x2) / eta;
    const double lhs =
        s.x1 > s.theta * s.x2 ? (f(s.x1) - s.theta * f(s.x2)) / eta : 0.0;
    const double rhs =
        (k1 + k2) * std::abs(d) + (k1 + k2) * std::abs(s.x2) + f(s.x2);
    main.add(as_point(s), lhs, rhs);
  }
  LemmaReport r;
  r.lemma = LemmaId::A1;
  r.family = f.name;
  r.checks.push_back(main.finish());
  return r;
}

ConditionReport remainder_check(const EnvelopeConstruction& c,
                                const std::vector<LemmaSample>& samples) {
  ReportBuilder rb("remainder", to_string(c.lemma));
  const double split =
      c.lemma == LemmaId::A2 ? 4.0 * c.M + 2.0 * c.k0 * c.a
                             : 4.0 * c.M + 4.0 * c.k * c.a;
  for (const auto& s : samples) {
    rb.sample();
    const auto p = as_point(s);
    for (double x : {s.x1, s.x2}) {
      if (std::abs(x) >= c.a) rb.add(at_x(x), std::abs(c.h(x)), 0.0, "h=0 off band");
      rb.add(at_x(x), std::abs(c.h(x)), c.M, "|h|<=M");
    }
    rb.add(p, std::abs(c.h(s.theta * s.x2) - c.h(s.x2)),
           (1.0 - s.theta) * split, "theta-split");
  }
  return rb.finish();
}

LemmaReport lemmaA2_check(const ScalarFunction& f,
                          const std::vector<LemmaSample>& samples,
                          bool intermediates) {
  validate_hypotheses(f, LemmaId::A2);
  const auto c = construct_A2_envelope(f);
  const double a = c.a, k0 = c.k0;
  const auto& phi = f.phi;
  const double pa = phi(a);

  ReportBuilder main("A.2", f.name);
  ReportBuilder r3("A.3", f.name), r4("A.4", f.name), r5("A.5", f.name),
      r6("A.6", f.name), r7("A.7", f.name), r8("A.8", f.name),
      r9("A.9", f.name), r10("A.10", f.name), r11("A.11", f.name);
  for (const auto& s : samples) {
    const double th = s.theta, eta = 1.0 - th;
    const double d = (s.x1 - th * s.x2) / eta, ad = std::abs(d);
    const auto p = as_point(s);
    main.sample();
    main.add(p, (f(s.x1) - th * f(s.x2)) / eta,
             phi(ad + 2.0 * a) + 2.0 * k0 * ad + 11.0 * k0 * a + 22.0 * pa);
    if (!intermediates) continue;
    for (auto* rb : {&r3, &r4, &r5, &r6, &r7, &r8, &r9, &r10, &r11})
      rb->sample();
    r3.add(p, std::abs(c.g(s.x1)), phi(std::abs(s.x1)) + k0 * a + 2.0 * pa);
    r4.add(p, (c.gbar(s.x1) - th * c.gbar(s.x2)) / eta,
           phi(ad + a) + k0 * ad + 2.0 * k0 * a + 5.0 * pa);
    r5.add(p, std::abs(c.gbar(s.x1)),
           phi(std::abs(s.x1) + a) + 2.0 * k0 * a + 5.0 * pa);
    // Case splits through gbar(0) = 0.
    const double u = std::abs(s.x1), v = std::abs(s.x2);
    r6.add(p, c.gbar(u) / eta, c.gbar(u / eta));
    r7.add(p, -th * c.gbar(-v) / eta, k0 * th * v / eta);
    r8.add(p, c.gbar(-u) / eta, c.gbar(-u / eta));
    r9.add(p, -th * c.gbar(v) / eta, k0 * th * v / eta);
    r10.add(p, (c.g(s.x1) - th * c.g(s.x2)) / eta,
            phi(ad + 2.0 * a) + k0 * ad + 4.0 * k0 * a + 7.0 * pa);
    r11.add(p, (c.h(s.x1) - th * c.h(s.x2)) / eta,
            k0 * ad + 7.0 * k0 * a + 15.0 * pa);
  }
  LemmaReport r;
  r.lemma = LemmaId::A2;
  r.family = f.name;
  r.construction = c;
  r.checks.push_back(main.finish());
  if (intermediates) {
    for (auto* rb : {&r3, &r4, &r5, &r6, &r7, &r8, &r9, &r10, &r11})
      r.checks.push_back(rb->finish());
    r.checks.push_back(remainder_check(c, samples));
  }
  return r;
}

LemmaReport lemmaA3_check(const ScalarFunction& f,
                          const std::vector<LemmaSample>& samples,
                          bool intermediates) {
  validate_hypotheses(f, LemmaId::A3);
  const auto c = construct_A3_envelope(f);
  const double a = c.a, k = c.k;
  const auto& phi = f.phi;
  const double pa = phi(a);

  ReportBuilder main("A.12", f.name);
  ReportBuilder r13("A.13", f.name), r14("A.14", f.name), r15("A.15", f.name),
      r16("A.16", f.name);
  for (const auto& s : samples) {
    const double th = s.theta, eta = 1.0 - th;
    const double d = (s.x1 - th * s.x2) / eta, ad = std::abs(d);
    const auto p = as_point(s);
    main.sample();
    main.add(p, (f(s.x1) - th * f(s.x2)) / eta,
             4.0 * k * ad + 4.0 * k * a + 11.0 * pa + phi(std::abs(s.x2)));
    if (!intermediates) continue;
    for (auto* rb : {&r13, &r14, &r15, &r16}) rb->sample();
    r13.add(p, std::abs(c.g(s.x1) - c.g(s.x2)),
            2.0 * k * std::abs(s.x1 - s.x2));
    r14.add(p, c.g(s.x1), phi(std::abs(s.x1)) + pa);
    r15.add(p, (c.g(s.x1) - th * c.g(s.x2)) / eta,
            2.0 * k * ad + phi(std::abs(s.x2)) + pa);
    r16.add(p, (c.h(s.x1) - th * c.h(s.x2)) / eta,
            2.0 * k * ad + 4.0 * k * a + 10.0 * pa);
  }
  LemmaReport r;
  r.lemma = LemmaId::A3;
  r.family = f.name;
  r.construction = c;
  r.checks.push_back(main.finish());
  if (intermediates) {
    for (auto* rb : {&r13, &r14, &r15, &r16}) r.checks.push_back(rb->finish());
    r.checks.push_back(remainder_check(c, samples));
  }
  return r;
}

// ---- test families ----

const std::vector<std::string>& lemma_family_catalog(LemmaId lemma) {
  static const std::vector<std::string> a1 = {
      "abs", "linear", "sine", "cubic-sine", "exp-decay", "abs-shifted",
      "spline"};
  static const std::vector<std::string> a2 = {
      "abs", "square", "square-band", "q", "sine-band", "concave-band",
      "logcosh", "spline"};
  static const std::vector<std::string> a3 = {
      "abs", "dist", "log-growth", "sine-band", "tilted", "bump",
      "constant", "spline"};
  switch (lemma) {
    case LemmaId::A1: return a1;
    case LemmaId::A2: return a2;
    case LemmaId::A3: return a3;
  }
  return a1;
}

namespace {

ScalarFunction make(std::string name, Fn f) {
  ScalarFunction s;
  s.name = std::move(name);
  s.eval = std::move(f);
  return s;
}

ScalarFunction a1_family(const std::string& id) {
  auto abs_fn = [](double x) { return std::abs(x); };
  ScalarFunction s;
  if (id == "abs") {
    s = make("abs", abs_fn);
  } else if (id == "linear") {
    s = make("linear", [](double x) { return 0.7 * x; });
  } else if (id == "sine") {
    s = make("sine", [](double x) { return std::sin(x); });
  } else if (id == "cubic-sine") {
    s = make("cubic-sine",
             [](double x) { return x <= 0.0 ? -x * x * x : std::sin(x); });
    s.k1 = 0.5;
  } else if (id == "exp-decay") {
    s = make("exp-decay", [](double x) { return std::exp(-x); });
    s.k1 = 0.1;
  } else if (id == "abs-shifted") {
    s = make("abs-shifted", [](double x) { return std::abs(x) - 1.0; });
  } else {
    fail(ErrorKind::Configuration, "unknown A1 family '" + id + "'");
  }
  if (!s.k1) s.k1 = 1.0;
  s.k2 = 1.0;
  s.phi = [f = s.eval](double r) { return std::max(std::abs(f(r)), std::abs(f(-r))); };
  return s;
}

ScalarFunction a2_family(const std::string& id) {
  using std::numbers::pi;
  ScalarFunction s;
  s.convex_rays = true;
  if (id == "abs") {
    s = make("abs", [](double x) { return std::abs(x); });
    s.a = 1.0;
    s.k = 1.0;
    s.phi = [](double r) { return r; };
    s.left_derivative = -1.0;
    s.right_derivative = 1.0;
  } else if (id == "square") {
    s = make("square", [](double x) { return x * x; });
    s.a = 0.0;
    s.k = 1.0;
    s.phi = [](double r) { return r * r; };
    s.left_derivative = 0.0;
    s.right_derivative = 0.0;
  } else if (id == "square-band") {
    s = make("square-band", [](double x) { return x * x; });
    s.a = 1.0;
    s.k = 2.0;
    s.phi = [](double r) { return r * r; };
    s.left_derivative = -2.0;
    s.right_derivative = 2.0;
  } else if (id == "q") {
    s = make("q", [](double x) { return example1_q(x); });
    s.a = 2.0;
    s.k = 1.5;
    s.phi = [](double r) { return 1.0 + 2.0 * r; };
    s.left_derivative = -1.0;
    s.right_derivative = -2.0;
  } else if (id == "sine-band") {
    s = make("sine-band", [](double x) {
      const double ax = std::abs(x);
      return ax <= 1.0 ? std::sin(pi * x) : (ax - 1.0) * (ax - 1.0);
    });
    s.a = 1.0;
    s.k = pi;
    s.phi = [](double r) { return 1.0 + r * r; };
    s.left_derivative = 0.0;
    s.right_derivative = 0.0;
  } else if (id == "concave-band") {
    s = make("concave-band", [](double x) {
      const double ax = std::abs(x);
      return ax <= 1.0 ? -ax : ax - 2.0;
    });
    s.a = 1.0;
    s.k = 1.0;
    s.phi = [](double r) { return 1.0 + r; };
    s.left_derivative = -1.0;
    s.right_derivative = 1.0;
  } else if (id == "logcosh") {
    // log cosh x written to stay finite for large |x|
    s = make("logcosh", [](double x) {
      const double ax = std::abs(x);
      return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
    });
    s.a = 0.5;
    s.k = std::tanh(0.5);
    s.phi = [](double r) { return r; };
  } else {
    fail(ErrorKind::Configuration, "unknown A2 family '" + id + "'");
  }
  s.convex_rays = true;
  return s;
}

ScalarFunction a3_family(const std::string& id) {
  ScalarFunction s;
  if (id == "abs") {
    s = make("abs", [](double x) { return std::abs(x); });
    s.a = 1.0;
    s.k = 1.0;
    s.phi = [](double r) { return r; };
  } else if (id == "dist") {
    s = make("dist", [](double x) { return std::max(std::abs(x) - 1.0, 0.0); });
    s.a = 1.0;
    s.k = 1.0;
    s.phi = [](double r) { return r; };
  } else if (id == "log-growth") {
    s = make("log-growth", [](double x) { return log_growth(x, 3.0); });
    s.a = 0.0;
    s.k = 1.5 / std::exp(1.0);
    s.phi = [](double r) { return log_growth(r, 3.0); };
  } else if (id == "sine-band") {
    s = make("sine-band", [](double x) {
      const double ax = std::abs(x);
      if (ax <= 1.0) return std::sin(3.0 * x);
      return (x > 0 ? std::sin(3.0) : -std::sin(3.0)) + (ax - 1.0);
    });
    s.a = 1.0;
    s.k = 3.0;
    s.phi = [](double r) { return 1.0 + r; };
  } else if (id == "tilted") {
    s = make("tilted", [](double x) {
      if (x >= 2.0) return -1.0 + 0.7 * (x - 2.0);
      if (x <= -2.0) return 1.0 + 0.3 * (-2.0 - x);
      return -0.5 * x;
    });
    s.a = 2.0;
    s.k = 0.7;
    s.phi = [](double r) { return 1.0 + 0.7 * r; };
  } else if (id == "bump") {
    // rises on (-1, -0.8) then falls, so f(-1) - f(1) exceeds k a
    s = make("bump", [](double x) {
      if (x <= -1.0) return 1.0 + (-1.0 - x);
      if (x <= -0.8) return 1.0 + (x + 1.0);
      if (x <= 1.0) return 1.2 - (x + 0.8);
      return -0.6 + (x - 1.0);
    });
    s.a = 1.0;
    s.k = 1.0;
    s.phi = [](double r) { return 1.2 + r; };
  } else if (id == "constant") {
    s = make("constant", [](double) { return 2.0; });
    s.a = 0.0;
    s.k = 1.0;
    s.phi = [](double) { return 2.0; };
  } else {
    fail(ErrorKind::Configuration, "unknown A3 family '" + id + "'");
  }
  s.monotone_rays = true;
  return s;
}

struct Draw {
  CounterRng rng;
  std::uint64_t i = 0;
  double u(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * rng.uniform(0, i++);
  }
};

// Knots on [-a, a] with slopes bounded by k; values start at f(-a) = v0.
void band_knots(Draw& d, double a, double k, double v0,
                std::vector<double>& xs, std::vector<double>& ys) {
  const int n = 5;
  xs = {-a};
  ys = {v0};
  for (int j = 1; j <= n; ++j) {
    const double x = -a + 2.0 * a * j / n;
    ys.push_back(ys.back() + d.u(-k, k) * (x - xs.back()));
    xs.push_back(x);
  }
}

}  // namespace

ScalarFunction random_admissible(LemmaId lemma, std::uint64_t seed) {
  Draw d{CounterRng(derive_seed(seed, "lemma-family-" + to_string(lemma)))};
  const std::string name = "spline#" + std::to_string(seed);
  switch (lemma) {
    case LemmaId::A1: {
      const double k1 = d.u(0.2, 2.0), k2 = d.u(0.2, 2.0);
      std::vector<double> xs = {-12.0, -6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 12.0};
      std::vector<double> ys(xs.size());
      const std::size_t zero = 4;
      ys[zero] = d.u(0.0, 2.0);
      for (std::size_t j = zero; j-- > 0;)
        ys[j] = ys[j + 1] - d.u(-4.0, k1) * (xs[j + 1] - xs[j]);
      for (std::size_t j = zero + 1; j < xs.size(); ++j)
        ys[j] = ys[j - 1] + d.u(-k2, k2) * (xs[j] - xs[j - 1]);
      ScalarFunction s = make(name, piecewise_linear(xs, ys));
      s.k1 = k1;
      s.k2 = k2;
      s.phi = [f = s.eval](double r) {
        return std::max(std::abs(f(r)), std::abs(f(-r)));
      };
      return s;
    }
    case LemmaId::A2: {
      const double a = d.u(0.5, 2.0), k = d.u(0.5, 3.0);
      std::vector<double> xs, ys;
      band_knots(d, a, k, d.u(-1.0, 1.0), xs, ys);
      const double sl = d.u(-3.0, 3.0), cl = d.u(0.0, 1.0);
      const double sr = d.u(-3.0, 3.0), cr = d.u(0.0, 1.0);
      const Fn band = piecewise_linear(xs, ys);
      const double fma = ys.front(), fa = ys.back();
      ScalarFunction s = make(name, [=](double x) {
        if (x < -a) return fma + sl * (x + a) + cl * (x + a) * (x + a);
        if (x > a) return fa + sr * (x - a) + cr * (x - a) * (x - a);
        return band(x);
      });
      double B = 0.0;
      for (double y : ys) B = std::max(B, std::abs(y));
      const double S = std::max(std::abs(sl), std::abs(sr));
      const double C = std::max(cl, cr);
      s.a = a;
      s.k = k;
      s.convex_rays = true;
      s.left_derivative = sl;
      s.right_derivative = sr;
      s.phi = [=](double r) { return B + S * r + C * r * r; };
      return s;
    }
    case LemmaId::A3: {
      const double a = d.u(0.5, 2.0), k = d.u(0.5, 3.0);
      std::vector<double> xs, ys;
      band_knots(d, a, k, d.u(-1.0, 1.0), xs, ys);
      // two more knots on each ray with monotone slopes
      std::vector<double> lx = {-a - 12.0, -a - 3.0}, ly(2);
      const double s1 = d.u(-k, 0.0), s2 = d.u(-k, 0.0);
      ly[1] = ys.front() - s1 * 3.0;
      ly[0] = ly[1] - s2 * 9.0;
      std::vector<double> rx = {a + 3.0, a + 12.0}, ry(2);
      ry[0] = ys.back() + d.u(0.0, k) * 3.0;
      ry[1] = ry[0] + d.u(0.0, k) * 9.0;
      std::vector<double> X = lx, Y = ly;
      X.insert(X.end(), xs.begin(), xs.end());
      Y.insert(Y.end(), ys.begin(), ys.end());
      X.insert(X.end(), rx.begin(), rx.end());
      Y.insert(Y.end(), ry.begin(), ry.end());
      ScalarFunction s = make(name, piecewise_linear(X, Y));
      double B = 0.0;
      for (double y : ys) B = std::max(B, std::abs(y));
      s.a = a;
      s.k = k;
      s.monotone_rays = true;
      s.phi = [=](double r) { return B + k * r; };
      return s;
    }
  }
  fail(ErrorKind::Internal, "unreachable lemma id");
}

ScalarFunction random_concave_ray(std::uint64_t seed) {
  ScalarFunction s = random_admissible(LemmaId::A2, seed);
  Draw d{CounterRng(derive_seed(seed, "concave-ray"))};
  const double a = *s.a, cr = -d.u(0.05, 1.0);
  const Fn base = s.eval;
  const double fa = base(a), sr = *s.right_derivative;
  s.name = "concave-ray#" + std::to_string(seed);
  s.eval = [=](double x) {
    return x > a ? fa + sr * (x - a) + cr * (x - a) * (x - a) : base(x);
  };
  s.phi = [](double) { return std::numeric_limits<double>::infinity(); };
  return s;
}

ScalarFunction lemma_family(LemmaId lemma, const std::string& id,
                            std::uint64_t seed) {
  if (id == "spline") return random_admissible(lemma, seed);
  switch (lemma) {
    case LemmaId::A1: return a1_family(id);
    case LemmaId::A2: return a2_family(id);
    case LemmaId::A3: return a3_family(id);
  }
  fail(ErrorKind::Internal, "unreachable lemma id");
}

}  // namespace bsde
