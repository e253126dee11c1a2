#include "bsde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bsde/error.hpp"
#include "bsde/format.hpp"

namespace bsde {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq_norm(std::span<const double> z) {
  double s = 0.0;
  for (double x : z) s += x * x;
  return s;
}

// log(K x^e) with log K given; -inf at x = 0.
double log_scaled_power(double log_k, double x, double e) {
  return x > 0.0 ? log_k + e * std::log(x) : -kInf;
}

// exp of a log value, saturating instead of overflowing past 700.
double exp_saturated(double v) { return v > 700.0 ? kInf : std::exp(v); }

// Paths grouped by B_t (first coordinate) into equal-count bins.
std::vector<std::vector<std::size_t>> conditioning_groups(
    const PathBundle& bundle, std::size_t step, std::size_t bins) {
  const std::size_t m = bundle.count();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) { return bundle.position(step, i)[0]; };
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < m; ++i) {
    lo = std::min(lo, key(i));
    hi = std::max(hi, key(i));
  }
  if (!(hi > lo) || bins <= 1) return {order};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  bins = std::min(bins, m);
  std::vector<std::vector<std::size_t>> groups(bins);
  for (std::size_t k = 0; k < m; ++k) groups[k * bins / m].push_back(order[k]);
  return groups;
}

std::vector<double> gather(const std::vector<double>& v,
                           const std::vector<std::size_t>& idx) {
  std::vector<double> out(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = v[idx[k]];
  return out;
}

struct GroupComparison {
  double log_lhs, log_rhs, se, margin;
};

BoundVerdict judge(double margin, double se, const BoundOptions& o) {
  if (-margin > o.se_multiplier * se) return BoundVerdict::Violated;
  if (se > o.indeterminate_ratio * std::abs(margin))
    return BoundVerdict::Indeterminate;
  return BoundVerdict::Satisfied;
}

BoundVerdict combine(BoundVerdict a, BoundVerdict b) {
  if (a == BoundVerdict::Violated || b == BoundVerdict::Violated)
    return BoundVerdict::Violated;
  if (a == BoundVerdict::Indeterminate || b == BoundVerdict::Indeterminate)
    return BoundVerdict::Indeterminate;
  return BoundVerdict::Satisfied;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  return v[mid];
}

// log of K E[exp(K x^e)] for per-path x.
MomentEstimate rhs_moment(const BigConstant& K, std::span<const double> x,
                          double e) {
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    w[i] = exp_saturated(log_scaled_power(K.log_value, x[i], e));
  MomentEstimate m = log_moment(w);
  m.log_mean += K.log_value;
  m.overflow = m.log_mean > 700.0;
  return m;
}

// Per path, int_{t_s}^T h_j dt over steps j >= s (left point rule).
std::vector<double> tail_integral(const SolutionField& sol, std::size_t s,
                                  const std::function<double(std::size_t,
                                                             std::size_t)>& h) {
  const auto& grid = sol.grid();
  std::vector<double> out(sol.count(), 0.0);
  for (std::size_t j = s; j < sol.steps(); ++j) {
    const double dt = grid.dt(j);
    for (std::size_t i = 0; i < sol.count(); ++i) out[i] += h(j, i) * dt;
  }
  return out;
}

void require_matching(const SolutionField& sol, const ConstantSet& c) {
  require(sol.bundle != nullptr, ErrorKind::InvalidArgument,
          "solution has no path bundle");
  require(std::abs(sol.grid().horizon() - c.horizon()) <=
              1e-12 * (1.0 + c.horizon()),
          ErrorKind::InvalidArgument,
          "constants were built for a different horizon");
}

}  // namespace

std::string to_string(BoundVerdict v) {
  switch (v) {
    case BoundVerdict::Satisfied: return "satisfied";
    case BoundVerdict::Violated: return "violated";
    case BoundVerdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

std::string bound_csv(const BoundCheckResult& r) {
  std::ostringstream os;
  os << "time,log_lhs,log_rhs,se,verdict\n";
  for (const auto& row : r.rows)
    os << fmt_num(row.time) << "," << fmt_num(row.lhs) << ","
       << fmt_num(row.rhs) << "," << fmt_num(row.se) << ","
       << to_string(row.verdict) << "\n";
  return os.str();
}

std::vector<double> fhat_process(const CoefficientProfile& profile,
                                 const SolutionField& sol) {
  const UnCoefficients un = profile.un_or_growth();
  const double as = conjugate_exponent(profile.alpha);
  const std::size_t m = sol.count(), n = sol.steps();
  std::vector<double> out((n + 1) * m);
  for (std::size_t j = 0; j <= n; ++j) {
    const double t = sol.grid().node(j);
    const double b = un.beta(t), g = un.gamma(t);
    for (std::size_t i = 0; i < m; ++i) {
      const double zn = std::sqrt(sq_norm(sol.Z(j, i)));
      out[j * m + i] = un.f(eval_point(*sol.bundle, j, i)) +
                       b * std::abs(sol.Y(j, i)) + g * log_growth(zn, as);
    }
  }
  return out;
}

FhatMomentResult verify_fhat_moment(const std::vector<double>& fhat,
                                    const TimeGrid& grid, std::size_t count,
                                    double p, double alpha_star,
                                    const std::optional<JensenInputs>& jensen) {
  require(p > 1.0, ErrorKind::Domain, "fhat moment: p must exceed 1");
  const std::size_t n = grid.steps();
  require(fhat.size() == (n + 1) * count, ErrorKind::InvalidArgument,
          "fhat values do not match the grid");
  const double e = 2.0 / alpha_star;
  std::vector<double> integral(count, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double h = 0.5 * grid.dt(j);
    for (std::size_t i = 0; i < count; ++i)
      integral[i] += h * (fhat[j * count + i] + fhat[(j + 1) * count + i]);
  }
  FhatMomentResult out;
  out.fhat = subexp_moment_estimate(integral, p, alpha_star);
  if (!jensen) return out;

  const SolutionField& zp = *jensen->prime;
  require(zp.count() == count && zp.steps() == n, ErrorKind::InvalidArgument,
          "Jensen inputs do not match the fhat grid");
  std::vector<double> w(n);
  double G = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = jensen->gamma(grid.node(j)) * grid.dt(j);
    G += w[j];
  }
  require(std::isfinite(G) && G > 0.0, ErrorKind::InvalidCoefficient,
          "Jensen majorant needs 0 < integral of gamma < inf");
  const double k_alpha = std::exp(alpha_star / 2.0);
  const double delta_p = p * std::pow(G, e);
  std::vector<double> log_term(count, 0.0), mean_z(count, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < count; ++i) {
      const double zn = std::sqrt(sq_norm(zp.Z(j, i)));
      log_term[i] += w[j] * log_growth(zn, alpha_star);
      mean_z[i] += w[j] / G * zn;
    }
  std::vector<double> lhs_w(count), rhs_w(count);
  for (std::size_t i = 0; i < count; ++i) {
    lhs_w[i] = p * std::pow(log_term[i], e);
    rhs_w[i] = delta_p * std::log(k_alpha + mean_z[i]);
  }
  out.log_term = log_moment(lhs_w);
  out.log_term->p = p;
  out.log_term->transform = "exp(p*(int gamma ln(e+|Z'|)^(alpha*/2))^(2/alpha*))";
  out.jensen_majorant = log_moment(rhs_w);
  out.jensen_majorant->p = p;
  out.jensen_majorant->transform = "(k_alpha + int |Z'| dmu)^delta_p";
  const double se =
      std::hypot(out.log_term->rel_se, out.jensen_majorant->rel_se);
  out.consistent =
      out.log_term->log_mean <= out.jensen_majorant->log_mean + 3.0 * se;
  return out;
}

BoundCheckResult verify_pointwise_bound(const SolutionField& sol,
                                        const ConstantSet& constants,
                                        const TerminalData& xi,
                                        const FProcess& f,
                                        PointwiseVariant variant,
                                        const BoundOptions& options) {
  require_matching(sol, constants);
  const bool one_sided = variant == PointwiseVariant::OneSided;
  const PathBundle& bundle = *sol.bundle;
  const double e = 2.0 / constants.alpha_star();
  const BigConstant& K = constants.K();
  const std::size_t m = sol.count();
  const auto fv = process_values(f, bundle);
  const auto xv = xi.values(bundle);

  std::vector<std::size_t> steps;
  for (int k = 0; k < 10; ++k) {
    const std::size_t s =
        sol.grid().nearest_node(sol.grid().horizon() * k / 10.0);
    if (steps.empty() || steps.back() != s) steps.push_back(s);
  }

  BoundCheckResult out;
  out.bound = one_sided ? "remark3.2" : "3.2";
  out.worst_margin = kInf;
  for (std::size_t s : steps) {
    std::vector<double> y_w(m), z_logint(m), x(m);
    const auto zint = tail_integral(sol, s, [&](std::size_t j, std::size_t i) {
      if (one_sided && !(sol.Y(j, i) > 0.0)) return 0.0;
      return sq_norm(sol.Z(j, i));
    });
    const auto fint = tail_integral(
        sol, s, [&](std::size_t j, std::size_t i) { return fv[j * m + i]; });
    for (std::size_t i = 0; i < m; ++i) {
      const double y = sol.Y(s, i);
      const double ya = one_sided ? std::max(y, 0.0) : std::abs(y);
      y_w[i] = std::pow(ya, e);
      z_logint[i] = zint[i] > 0.0 ? std::log(zint[i]) : -kInf;
      const double xt = one_sided ? std::max(xv[i], 0.0) : std::abs(xv[i]);
      x[i] = xt + fint[i];
    }
    std::vector<double> margins;
    BoundRow row;
    row.time = sol.grid().node(s);
    row.margin_min = kInf;
    BoundVerdict tv = BoundVerdict::Satisfied;
    for (const auto& grp : conditioning_groups(bundle, s, options.bins)) {
      const auto L = log_add(log_moment(gather(y_w, grp)),
                             log_moment(gather(z_logint, grp)));
      const auto R = rhs_moment(K, gather(x, grp), e);
      const double margin = R.log_mean - L.log_mean;
      const double se = std::hypot(L.rel_se, R.rel_se);
      margins.push_back(margin);
      tv = combine(tv, judge(margin, se, options));
      if (margin < row.margin_min) {
        row.margin_min = margin;
        row.lhs = L.log_mean;
        row.rhs = R.log_mean;
        row.se = se;
      }
    }
    row.verdict = tv;
    row.margin_median = median(margins);
    out.worst_margin = std::min(out.worst_margin, row.margin_min);
    out.verdict = combine(out.verdict, tv);
    out.rows.push_back(row);
  }
  return out;
}

BoundCheckResult verify_sup_bound(const SolutionField& sol,
                                  const ConstantSet& constants,
                                  const TerminalData& xi, const FProcess& f,
                                  double p, const BoundOptions& options) {
  require(p > 1.0, ErrorKind::Domain, "sup bound: p must exceed 1");
  require_matching(sol, constants);
  const PathBundle& bundle = *sol.bundle;
  const double e = 2.0 / constants.alpha_star();
  const BigConstant Kp = constants.K_p(p);
  const std::size_t m = sol.count(), n = sol.steps();
  const auto fv = process_values(f, bundle);
  const auto xv = xi.values(bundle);

  BoundCheckResult out;
  out.bound = "3.3";
  out.worst_margin = kInf;
  std::vector<std::size_t> steps = {0, sol.grid().nearest_node(
                                           0.5 * sol.grid().horizon())};
  if (steps[1] == steps[0]) steps.pop_back();
  for (std::size_t s : steps) {
    std::vector<double> sup(m, 0.0);
    for (std::size_t j = s; j <= n; ++j)
      for (std::size_t i = 0; i < m; ++i)
        sup[i] = std::max(sup[i], std::abs(sol.Y(j, i)));
    const auto zint = tail_integral(
        sol, s, [&](std::size_t j, std::size_t i) { return sq_norm(sol.Z(j, i)); });
    const auto fint = tail_integral(
        sol, s, [&](std::size_t j, std::size_t i) { return fv[j * m + i]; });
    std::vector<double> y_w(m), z_w(m), x(m);
    for (std::size_t i = 0; i < m; ++i) {
      y_w[i] = p * std::pow(sup[i], e);
      z_w[i] = zint[i] > 0.0 ? 0.5 * p * std::log(zint[i]) : -kInf;
      x[i] = std::abs(xv[i]) + fint[i];
    }
    const auto L = log_add(log_moment(y_w), log_moment(z_w));
    const auto R = rhs_moment(Kp, x, e);
    BoundRow row;
    row.time = sol.grid().node(s);
    row.lhs = L.log_mean;
    row.rhs = R.log_mean;
    row.se = std::hypot(L.rel_se, R.rel_se);
    row.margin_min = row.margin_median = R.log_mean - L.log_mean;
    row.verdict = judge(row.margin_min, row.se, options);
    out.worst_margin = std::min(out.worst_margin, row.margin_min);
    out.verdict = combine(out.verdict, row.verdict);
    out.rows.push_back(row);
  }
  return out;
}

double comparison_epsilon(const SolutionField& sol,
                          const SolutionField& sol_prime,
                          const ComparisonPolicy& policy) {
  double max_dt = 0.0;
  for (std::size_t j = 0; j < sol.steps(); ++j)
    max_dt = std::max(max_dt, sol.grid().dt(j));
  // Standard error of a fitted conditional mean: residual rms * sqrt(P/M).
  auto proxy = [](const SolutionField& s) {
    double r = 0.0;
    for (double x : s.residual_rms) r = std::max(r, x);
    return r * std::sqrt(static_cast<double>(s.parameters) /
                         static_cast<double>(std::max<std::size_t>(1, s.count())));
  };
  return policy.c *
         (std::sqrt(max_dt) + std::max(proxy(sol), proxy(sol_prime)));
}

BoundCheckResult verify_comparison(const SolutionField& sol,
                                   const SolutionField& sol_prime,
                                   const ComparisonPolicy& policy) {
  require(sol.bundle && sol_prime.bundle, ErrorKind::InvalidArgument,
          "comparison needs solutions with path bundles");
  require(sol.grid() == sol_prime.grid() && sol.count() == sol_prime.count(),
          ErrorKind::InvalidArgument,
          "comparison needs solutions on the same grid and paths");
  const std::size_t m = sol.count(), n = sol.steps();

  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = sol.Y(n, i), b = sol_prime.Y(n, i);
    if (a > b + 1e-12 * (1.0 + std::abs(b))) bad.push_back(i);
  }
  if (!bad.empty()) {
    std::string msg = "terminal values not ordered on " +
                      std::to_string(bad.size()) + " paths; witnesses:";
    for (std::size_t k = 0; k < std::min<std::size_t>(5, bad.size()); ++k) {
      const std::size_t i = bad[k];
      msg += " path " + std::to_string(i) + " (xi=" + fmt_num(sol.Y(n, i)) +
             ", xi'=" + fmt_num(sol_prime.Y(n, i)) + ")";
    }
    fail(ErrorKind::PreconditionViolation, msg);
  }

  const double eps = comparison_epsilon(sol, sol_prime, policy);
  BoundCheckResult out;
  out.bound = "comparison";
  out.log_scale = false;
  out.worst_margin = kInf;
  for (std::size_t j = 0; j <= n; ++j) {
    BoundRow row;
    row.time = sol.grid().node(j);
    row.lhs = -kInf;
    row.rhs = eps;
    std::size_t v = 0;
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double gap = sol.Y(j, i) - sol_prime.Y(j, i);
      row.lhs = std::max(row.lhs, gap);
      s1 += gap;
      s2 += gap * gap;
      if (gap > eps) ++v;
    }
    const double md = static_cast<double>(m);
    const double var = std::max(0.0, s2 / md - (s1 / md) * (s1 / md));
    row.se = std::sqrt(var / md);
    row.margin_min = eps - row.lhs;
    row.margin_median = row.margin_min;
    row.verdict = static_cast<double>(v) / md > policy.max_violation_fraction
                      ? BoundVerdict::Violated
                      : BoundVerdict::Satisfied;
    out.violations += v;
    out.comparisons += m;
    out.worst_margin = std::min(out.worst_margin, row.margin_min);
    out.rows.push_back(row);
  }
  out.violation_fraction = static_cast<double>(out.violations) /
                           static_cast<double>(out.comparisons);
  out.verdict = out.violation_fraction > policy.max_violation_fraction
                    ? BoundVerdict::Violated
                    : BoundVerdict::Satisfied;
  return out;
}

}  // namespace bsde
