#include "bsde/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bsde/error.hpp"
#include "bsde/format.hpp"
#include "bsde/rng.hpp"

namespace bsde {
namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

EvalPoint at_of(const CloudPoint& p) {
  return EvalPoint{0, 0, p.t, std::span<const double>(p.b)};
}

double sgn(double x) { return x > 0.0 ? 1.0 : -1.0; }

const TimeFunction& need(const std::optional<TimeFunction>& f,
                         const char* name, const char* cond) {
  if (!f)
    fail(ErrorKind::Configuration, std::string(cond) + " needs coefficient '" +
                                       name + "' in the generator profile");
  return *f;
}

double need_a(const CoefficientProfile& p, const char* cond) {
  if (!p.a)
    fail(ErrorKind::Configuration,
         std::string(cond) + " needs the band half-width 'a'");
  require(*p.a >= 0.0, ErrorKind::InvalidCoefficient,
          "band half-width a must be nonnegative");
  return *p.a;
}

void require_scalar_z(const Generator& g, const SampleCloud& c,
                      const char* cond) {
  if (g.profile().dims != 1 || c.options.dims != 1)
    fail(ErrorKind::UnsupportedDimension,
         std::string(cond) + " is defined for d = 1 only");
}

void require_dims(const Generator& g, const SampleCloud& c) {
  require(g.profile().dims == c.options.dims, ErrorKind::Configuration,
          "cloud dimension does not match the generator");
}

double gval(const Generator& g, const CloudPoint& p, double y,
            const std::vector<double>& z) {
  return g(at_of(p), y, std::span<const double>(z));
}

double gscalar(const Generator& g, const CloudPoint& p, double y, double z) {
  return g(at_of(p), y, std::span<const double>(&z, 1));
}

}  // namespace

ReportBuilder::ReportBuilder(std::string condition, std::string generator) {
  r_.condition = std::move(condition);
  r_.generator = std::move(generator);
  r_.worst_margin = std::numeric_limits<double>::infinity();
}

void ReportBuilder::add(const CloudPoint& p, double lhs, double rhs,
                        const std::string& detail) {
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
    ++r_.non_finite;
    return;
  }
  const double margin = rhs - lhs;
  r_.worst_margin = std::min(r_.worst_margin, margin);
  if (margin >= -kConditionTol * (1.0 + std::abs(rhs))) return;
  ++r_.failures;
  auto& w = r_.witnesses;
  if (w.size() == ConditionReport::kMaxWitnesses && margin >= w.back().margin)
    return;
  auto pos = std::upper_bound(
      w.begin(), w.end(), margin,
      [](double m, const Witness& x) { return m < x.margin; });
  w.insert(pos, Witness{p, lhs, rhs, margin, detail});
  if (w.size() > ConditionReport::kMaxWitnesses) w.pop_back();
}

ConditionReport ReportBuilder::finish() {
  if (r_.failures > 0)
    r_.verdict = Verdict::Fail;
  else if (r_.samples_used == 0 || r_.non_finite > 0)
    r_.verdict = Verdict::Inconclusive;
  else
    r_.verdict = Verdict::Pass;
  if (!std::isfinite(r_.worst_margin)) r_.worst_margin = 0.0;
  return std::move(r_);
}

std::string to_string(CloudStrategy s) {
  switch (s) {
    case CloudStrategy::Grid: return "grid";
    case CloudStrategy::Random: return "random";
    case CloudStrategy::AdversarialCorner: return "adversarial-corner";
  }
  return "?";
}

CloudStrategy parse_cloud_strategy(const std::string& s) {
  if (s == "grid") return CloudStrategy::Grid;
  if (s == "random") return CloudStrategy::Random;
  if (s == "adversarial-corner" || s == "adversarial")
    return CloudStrategy::AdversarialCorner;
  fail(ErrorKind::Configuration,
       "unknown cloud strategy '" + s +
           "' (grid, random, adversarial-corner)");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

CloudPoint random_point(const CounterRng& rng, std::uint64_t stream,
                        const CloudOptions& o) {
  std::uint64_t k = 0;
  auto u = [&] { return rng.uniform(stream, k++); };
  CloudPoint p;
  p.t = u() * o.horizon;
  p.b.resize(o.dims);
  for (double& x : p.b) x = (2.0 * u() - 1.0) * o.b_range;
  p.y1 = (2.0 * u() - 1.0) * o.y_range;
  p.z1.resize(o.dims);
  for (double& x : p.z1) x = (2.0 * u() - 1.0) * o.z_range;
  p.y2 = (2.0 * u() - 1.0) * o.y_range;
  p.z2.resize(o.dims);
  for (double& x : p.z2) x = (2.0 * u() - 1.0) * o.z_range;
  p.theta = u();
  return p;
}

std::vector<CloudPoint> grid_points(std::size_t count, const CloudOptions& o) {
  // Six axes (t, y1, z1, y2, z2, theta) with L levels; points are spread
  // evenly over the L^6 lattice when count < L^6.
  std::size_t L = 2;
  while (std::pow(static_cast<double>(L), 6.0) < static_cast<double>(count))
    ++L;
  const double total = std::pow(static_cast<double>(L), 6.0);
  auto lin = [L](std::size_t i, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(L - 1);
  };
  std::vector<CloudPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto idx = static_cast<std::uint64_t>(
        std::floor(static_cast<double>(i) * total / static_cast<double>(count)));
    std::size_t dig[6];
    for (auto& dg : dig) {
      dg = static_cast<std::size_t>(idx % L);
      idx /= L;
    }
    CloudPoint p;
    p.t = lin(dig[0], 0.0, o.horizon);
    p.y1 = lin(dig[1], -o.y_range, o.y_range);
    p.y2 = lin(dig[3], -o.y_range, o.y_range);
    p.theta = (static_cast<double>(dig[5]) + 0.5) / static_cast<double>(L);
    p.z1.resize(o.dims);
    p.z2.resize(o.dims);
    p.b.resize(o.dims);
    for (std::size_t k = 0; k < o.dims; ++k) {
      p.z1[k] = lin((dig[2] + k) % L, -o.z_range, o.z_range);
      p.z2[k] = lin((dig[4] + k) % L, -o.z_range, o.z_range);
      p.b[k] = lin((dig[0] + dig[1] + k) % L, -o.b_range, o.b_range);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<CloudPoint> corner_points(const CloudOptions& o) {
  const double thetas[] = {0.01, 0.5, 0.99};
  const double ys[] = {0.5, -0.5, 5.0, -5.0};
  const double zs[] = {0.0, 1.0, -1.0, o.z_large, -o.z_large};
  const double ts[] = {0.0, 0.5 * o.horizon, o.horizon};
  const double scale = 1.0 / std::sqrt(static_cast<double>(o.dims));
  std::vector<CloudPoint> out;
  for (double t : ts)
    for (double th : thetas)
      for (double y1 : ys)
        for (double y2 : ys)
          for (double z1 : zs)
            for (double z2 : zs) {
              CloudPoint p;
              p.t = t;
              p.b.assign(o.dims, 0.0);
              if (t > 0.0)
                for (std::size_t k = 0; k < o.dims; ++k)
                  p.b[k] = (k % 2 == 0 ? 1.0 : -1.0);
              p.y1 = y1;
              p.y2 = y2;
              p.z1.assign(o.dims, z1 * scale);
              p.z2.assign(o.dims, z2 * scale);
              p.theta = th;
              out.push_back(std::move(p));
            }
  return out;
}

}  // namespace

SampleCloud make_cloud(CloudStrategy strategy, std::size_t count,
                       std::uint64_t seed, const CloudOptions& options) {
  require(options.dims >= 1, ErrorKind::InvalidArgument,
          "cloud dimension must be positive");
  require(std::isfinite(options.horizon) && options.horizon > 0.0,
          ErrorKind::InvalidArgument, "cloud horizon must be finite and > 0");
  SampleCloud c;
  c.strategy = strategy;
  c.seed = seed;
  c.options = options;
  const CounterRng rng(derive_seed(seed, "sample-cloud"));
  switch (strategy) {
    case CloudStrategy::Grid:
      c.points = grid_points(count, options);
      break;
    case CloudStrategy::Random:
      c.points.reserve(count);
      for (std::size_t i = 0; i < count; ++i)
        c.points.push_back(random_point(rng, i, options));
      break;
    case CloudStrategy::AdversarialCorner: {
      c.points = corner_points(options);
      const std::size_t base = c.points.size();
      for (std::size_t i = base; i < count; ++i)
        c.points.push_back(random_point(rng, i, options));
      break;
    }
  }
  return c;
}

SampleCloud reflect_cloud(const SampleCloud& cloud) {
  SampleCloud r = cloud;
  for (auto& p : r.points) {
    p.y1 = -p.y1;
    p.y2 = -p.y2;
    for (double& x : p.z1) x = -x;
    for (double& x : p.z2) x = -x;
  }
  return r;
}

std::string format_report(const ConditionReport& r) {
  std::ostringstream os;
  auto vec = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i)
      s += (i ? "," : "") + fmt_num(v[i]);
    return s + "]";
  };
  os << "condition: " << r.condition << "\n";
  os << "generator: " << r.generator << "\n";
  os << "verdict: " << to_string(r.verdict) << "\n";
  os << "worst_margin: " << fmt_num(r.worst_margin) << "\n";
  os << "samples_used: " << r.samples_used << "\n";
  os << "failures: " << r.failures << "\n";
  if (r.non_finite > 0) os << "non_finite: " << r.non_finite << "\n";
  if (r.verdict == Verdict::Pass)
    os << "note: no counterexample among the sampled points\n";
  for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
    const auto& w = r.witnesses[i];
    os << "witness[" << i << "]: t=" << fmt_num(w.point.t)
       << " b=" << vec(w.point.b) << " y1=" << fmt_num(w.point.y1)
       << " z1=" << vec(w.point.z1) << " y2=" << fmt_num(w.point.y2)
       << " z2=" << vec(w.point.z2) << " theta=" << fmt_num(w.point.theta)
       << " lhs=" << fmt_num(w.lhs) << " rhs=" << fmt_num(w.rhs)
       << " margin=" << fmt_num(w.margin);
    if (!w.detail.empty()) os << " check=" << w.detail;
    os << "\n";
  }
  return os.str();
}

ConditionReport check_growth(const Generator& g, GrowthCondition which,
                             const SampleCloud& cloud) {
  require_dims(g, cloud);
  const auto& pr = g.profile();
  const double alpha = pr.alpha;
  const double as = conjugate_exponent(alpha);
  static const char* names[] = {"EX1", "EX1prime", "EX2", "A1", "A5"};
  const char* name = names[static_cast<int>(which)];
  if (which == GrowthCondition::EX2) {
    if (!pr.psi_growth)
      fail(ErrorKind::Configuration, "EX2 needs a growth function psi");
    require(pr.c_quad > 0.0, ErrorKind::Configuration,
            "EX2 needs a positive quadratic constant c");
  }
  if (which == GrowthCondition::A1) {
    need(pr.u, "u", name);
    need(pr.v, "v", name);
  }
  if (which == GrowthCondition::A5) {
    need(pr.u_bar, "u_bar", name);
    need(pr.v_bar, "v_bar", name);
  }
  ReportBuilder tally(name, g.name());
  for (const auto& p : cloud.points) {
    tally.sample();
    const EvalPoint at = at_of(p);
    const double y = p.y1;
    const double zn = norm(p.z1);
    const double gv = gval(g, p, y, p.z1);
    const double f = pr.f(at);
    double lhs = 0.0, rhs = 0.0;
    switch (which) {
      case GrowthCondition::EX1:
        lhs = sgn(y) * gv;
        rhs = f + pr.beta(p.t) * std::abs(y) +
              pr.gamma(p.t) * std::pow(zn, alpha);
        break;
      case GrowthCondition::EX1prime:
        lhs = y > 0.0 ? gv : 0.0;
        rhs = f + pr.beta(p.t) * std::abs(y) +
              pr.gamma(p.t) * std::pow(zn, alpha);
        break;
      case GrowthCondition::EX2:
        lhs = std::abs(gv);
        rhs = f + pr.beta(p.t) * pr.psi_growth(std::abs(y)) +
              pr.c_quad * zn * zn;
        break;
      case GrowthCondition::A1:
        lhs = std::abs(gv);
        rhs = f + (*pr.u)(p.t) * std::abs(y) +
              (*pr.v)(p.t) * std::pow(zn, alpha);
        break;
      case GrowthCondition::A5:
        lhs = std::abs(gv);
        rhs = f + (*pr.u_bar)(p.t) * std::abs(y) +
              (*pr.v_bar)(p.t) * log_growth(zn, as);
        break;
    }
    tally.add(p, lhs, rhs);
  }
  return tally.finish();
}

ConditionReport check_y_regularity(const Generator& g, YCondition which,
                                   const SampleCloud& cloud) {
  require_dims(g, cloud);
  const auto& pr = g.profile();
  static const char* names[] = {"A2i", "A2ii", "monotone-limit"};
  const char* name = names[static_cast<int>(which)];
  const TimeFunction* coef = nullptr;
  TimeFunction un_beta;
  switch (which) {
    case YCondition::A2i: coef = &need(pr.k1, "k1", name); break;
    case YCondition::A2ii: coef = &need(pr.k2, "k2", name); break;
    case YCondition::MonotoneLimit:
      un_beta = pr.un_or_growth().beta;
      coef = &un_beta;
      break;
  }
  ReportBuilder tally(name, g.name());
  for (const auto& p : cloud.points) {
    tally.sample();
    double y1 = p.y1, y2 = p.y2;
    if (which == YCondition::A2i) {
      y1 = -std::abs(y1);
      y2 = -std::abs(y2);
    } else if (which == YCondition::A2ii) {
      y1 = std::abs(y1);
      y2 = std::abs(y2);
    }
    const double d = gval(g, p, y1, p.z1) - gval(g, p, y2, p.z1);
    double lhs = 0.0;
    switch (which) {
      case YCondition::A2i: lhs = y1 == y2 ? 0.0 : sgn(y1 - y2) * d; break;
      case YCondition::A2ii: lhs = std::abs(d); break;
      case YCondition::MonotoneLimit: lhs = y1 > y2 ? d : 0.0; break;
    }
    tally.add(p, lhs, (*coef)(p.t) * std::abs(y1 - y2));
  }
  return tally.finish();
}

double one_sided_derivative(const std::function<double(double)>& fn, double x,
                            bool right, double h) {
  require(h > 0.0, ErrorKind::InvalidArgument, "derivative step must be > 0");
  const double s = right ? 1.0 : -1.0;
  const double f0 = fn(x);
  const double d1 = s * (fn(x + s * h) - f0) / h;
  const double d2 = s * (fn(x + 2.0 * s * h) - f0) / (2.0 * h);
  if (std::abs(d1 - d2) <= 1e-6 * (1.0 + std::abs(d1))) return d1;
  return 2.0 * d1 - d2;
}

ConditionReport check_z_regularity(const Generator& g, ZCondition which,
                                   const SampleCloud& cloud) {
  static const char* names[] = {"A3i", "A3ii", "A4", "A6i", "A6ii"};
  const char* name = names[static_cast<int>(which)];
  require_scalar_z(g, cloud, name);
  const auto& pr = g.profile();
  double a = 0.0;
  if (which != ZCondition::A6i) a = need_a(pr, name);
  const TimeFunction* c = nullptr;
  const TimeFunction* c3 = nullptr;
  switch (which) {
    case ZCondition::A3i: c = &need(pr.c1, "c1", name); break;
    case ZCondition::A4:
      c = &need(pr.c2, "c2", name);
      c3 = &need(pr.c3, "c3", name);
      break;
    case ZCondition::A6i: c = &need(pr.c_bar, "c_bar", name); break;
    default: break;
  }
  ReportBuilder tally(name, g.name());
  for (const auto& p : cloud.points) {
    tally.sample();
    const double y = p.y1;
    const double u1 = p.z1[0], u2 = p.z2[0];
    auto G = [&](double z) { return gscalar(g, p, y, z); };
    switch (which) {
      case ZCondition::A3i: {
        // Fold the sample into the band [-a, a].
        const double z1 = a * std::tanh(u1 / 2.0);
        const double z2 = a * std::tanh(u2 / 2.0);
        tally.add(p, std::abs(G(z1) - G(z2)), (*c)(p.t) * std::abs(z1 - z2));
        break;
      }
      case ZCondition::A3ii: {
        const double r1 = a + std::abs(u1), r2 = a + std::abs(u2);
        tally.add(p, G(0.5 * (r1 + r2)), 0.5 * (G(r1) + G(r2)), "right-ray");
        tally.add(p, G(-0.5 * (r1 + r2)), 0.5 * (G(-r1) + G(-r2)),
                  "left-ray");
        break;
      }
      case ZCondition::A4: {
        const double r = a + std::abs(u1);
        const double l = -a - std::abs(u2);
        const double c2v = (*c)(p.t), c3v = (*c3)(p.t);
        // g(z) - g(a) >= -c2 (z - a) on the right ray
        tally.add(p, -(G(r) - G(a)), c2v * (r - a), "right-ray");
        // g(z) - g(-a) >= c3 (z + a) on the left ray
        tally.add(p, c3v * (l + a), G(l) - G(-a), "left-ray");
        tally.add(p, -one_sided_derivative(G, a, true), c2v, "right-slope");
        tally.add(p, one_sided_derivative(G, -a, false), c3v, "left-slope");
        break;
      }
      case ZCondition::A6i:
        tally.add(p, std::abs(G(u1) - G(u2)), (*c)(p.t) * std::abs(u1 - u2));
        break;
      case ZCondition::A6ii: {
        const double r1 = a + std::abs(u1), r2 = a + std::abs(u2);
        const double lo = std::min(r1, r2), hi = std::max(r1, r2);
        // nondecreasing on [a, inf), nonincreasing on (-inf, -a]
        tally.add(p, G(lo) - G(hi), 0.0, "right-ray");
        tally.add(p, G(-lo) - G(-hi), 0.0, "left-ray");
        break;
      }
    }
  }
  return tally.finish();
}

ConditionReport check_theta_convexity(const Generator& g,
                                      ThetaCondition which,
                                      const SampleCloud& cloud) {
  require_dims(g, cloud);
  static const char* names[] = {"UN-i", "UN-ii", "UNprime-i", "UNprime-ii"};
  const char* name = names[static_cast<int>(which)];
  const auto& pr = g.profile();
  const UnCoefficients un = pr.un_or_growth();
  const bool with_log =
      which == ThetaCondition::UNi || which == ThetaCondition::UNii;
  const bool second =
      which == ThetaCondition::UNii || which == ThetaCondition::UNprimeii;
  if (with_log) {
    const double ig = un.gamma.integral(cloud.options.horizon);
    require(std::isfinite(ig) && ig > 0.0, ErrorKind::InvalidCoefficient,
            std::string(name) + " needs 0 < integral of gamma < inf, got " +
                fmt_num(ig));
  }
  const double alpha = pr.alpha;
  const double as = conjugate_exponent(alpha);
  ReportBuilder tally(name, g.name());
  std::vector<double> dz;
  for (const auto& p : cloud.points) {
    require(p.theta > 0.0 && p.theta < 1.0, ErrorKind::InvalidArgument,
            "cloud theta must lie in (0,1)");
    tally.sample();
    const double th = p.theta, eta = 1.0 - th;
    const double s = p.y1 - th * p.y2;
    const double diff = gval(g, p, p.y1, p.z1) - th * gval(g, p, p.y2, p.z2);
    double lhs = 0.0;
    if (!second && s > 0.0) lhs = diff;
    if (second && s < 0.0) lhs = -diff;
    dz.resize(p.z1.size());
    for (std::size_t k = 0; k < dz.size(); ++k)
      dz[k] = (p.z1[k] - th * p.z2[k]) / eta;
    const double dy = s / eta;
    const double beta = un.beta(p.t), gamma = un.gamma(p.t);
    double rhs = un.f(at_of(p)) + beta * std::abs(p.y2) +
                 beta * std::abs(dy) + gamma * std::pow(norm(dz), alpha);
    if (with_log) rhs += gamma * log_growth(norm(p.z2), as);
    tally.add(p, lhs, eta * rhs);
  }
  return tally.finish();
}

ConditionReport check_bounded(const Generator& g, const TimeFunction& u,
                              const SampleCloud& cloud) {
  require_dims(g, cloud);
  require(g.has(flags::kBounded), ErrorKind::Configuration,
          "H2 is only checked on truncated generators");
  ReportBuilder tally("H2", g.name());
  for (const auto& p : cloud.points) {
    tally.sample();
    tally.add(p, std::abs(gval(g, p, p.y1, p.z1)), u(p.t));
  }
  return tally.finish();
}

const std::vector<std::string>& condition_catalog() {
  static const std::vector<std::string> ids = {
      "EX1",  "EX1prime", "EX2",  "A1",   "A5",   "A2i",
      "A2ii", "monotone-limit",   "A3i",  "A3ii", "A4",
      "A6i",  "A6ii",     "UN-i", "UN-ii", "UNprime-i", "UNprime-ii"};
  return ids;
}

ConditionReport check_condition(const Generator& g, const std::string& id,
                                const SampleCloud& cloud) {
  if (id == "EX1") return check_growth(g, GrowthCondition::EX1, cloud);
  if (id == "EX1prime")
    return check_growth(g, GrowthCondition::EX1prime, cloud);
  if (id == "EX2") return check_growth(g, GrowthCondition::EX2, cloud);
  if (id == "A1") return check_growth(g, GrowthCondition::A1, cloud);
  if (id == "A5") return check_growth(g, GrowthCondition::A5, cloud);
  if (id == "A2i") return check_y_regularity(g, YCondition::A2i, cloud);
  if (id == "A2ii") return check_y_regularity(g, YCondition::A2ii, cloud);
  if (id == "monotone-limit")
    return check_y_regularity(g, YCondition::MonotoneLimit, cloud);
  if (id == "A3i") return check_z_regularity(g, ZCondition::A3i, cloud);
  if (id == "A3ii") return check_z_regularity(g, ZCondition::A3ii, cloud);
  if (id == "A4") return check_z_regularity(g, ZCondition::A4, cloud);
  if (id == "A6i") return check_z_regularity(g, ZCondition::A6i, cloud);
  if (id == "A6ii") return check_z_regularity(g, ZCondition::A6ii, cloud);
  if (id == "UN-i")
    return check_theta_convexity(g, ThetaCondition::UNi, cloud);
  if (id == "UN-ii")
    return check_theta_convexity(g, ThetaCondition::UNii, cloud);
  if (id == "UNprime-i")
    return check_theta_convexity(g, ThetaCondition::UNprimei, cloud);
  if (id == "UNprime-ii")
    return check_theta_convexity(g, ThetaCondition::UNprimeii, cloud);
  std::string known;
  for (const auto& c : condition_catalog())
    known += (known.empty() ? "" : ", ") + c;
  fail(ErrorKind::Configuration,
       "unknown condition '" + id + "' (known: " + known + ")");
}

GrowthFit fit_growth_constant(const Generator& g, const SampleCloud& cloud,
                              bool variant_ii) {
  require_dims(g, cloud);
  const auto& pr = g.profile();
  const UnCoefficients un = pr.un_or_growth();
  GrowthFit fit;
  for (const auto& p : cloud.points) {
    const double y = p.y1;
    const double gv = gval(g, p, y, p.z1);
    const double lhs =
        variant_ii ? (y < 0.0 ? -gv : 0.0) : (y > 0.0 ? gv : 0.0);
    const double excess =
        lhs - un.f(at_of(p)) - 2.0 * un.beta(p.t) * std::abs(y);
    const double denom = un.gamma(p.t) * std::pow(norm(p.z1), pr.alpha);
    ++fit.samples_used;
    if (denom > 0.0) {
      fit.k = std::max(fit.k, excess / denom);
    } else if (excess > kConditionTol * (1.0 + std::abs(lhs))) {
      fit.finite = false;
    }
  }
  return fit;
}

ConditionReport check_un_growth(const Generator& g, const SampleCloud& cloud,
                                double k, bool variant_ii) {
  require_dims(g, cloud);
  const auto& pr = g.profile();
  const UnCoefficients un = pr.un_or_growth();
  ReportBuilder tally(variant_ii ? "UN-growth-ii" : "UN-growth-i", g.name());
  for (const auto& p : cloud.points) {
    tally.sample();
    const double y = p.y1;
    const double gv = gval(g, p, y, p.z1);
    const double lhs =
        variant_ii ? (y < 0.0 ? -gv : 0.0) : (y > 0.0 ? gv : 0.0);
    const double rhs = un.f(at_of(p)) + 2.0 * un.beta(p.t) * std::abs(y) +
                       k * un.gamma(p.t) * std::pow(norm(p.z1), pr.alpha);
    tally.add(p, lhs, rhs);
  }
  return tally.finish();
}

}  // namespace bsde
