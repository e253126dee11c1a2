#include "bsde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "bsde/error.hpp"
#include "bsde/format.hpp"

namespace bsde {

namespace {

using Vec = std::vector<double>;

double quantile(Vec v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - w) + v[hi] * w;
}

// Root of y = e + g(y) dt by damped fixed-point iteration, falling back to
// bracketing and bisection.
double implicit_step(const Generator& g, const EvalPoint& at,
                     std::span<const double> z, double e, double dt,
                     const SolveOptions& opt, std::size_t step) {
  auto map = [&](double y) {
    const double v = e + g(at, y, z) * dt;
    if (!std::isfinite(v))
      fail(ErrorKind::PreconditionViolation,
           "generator is not finite at step " + std::to_string(step) +
               ", path " + std::to_string(at.path));
    return v;
  };
  double y = e;
  double damping = 1.0;
  double prev = HUGE_VAL;
  for (int it = 0; it < opt.max_fixed_point_iter; ++it) {
    const double delta = map(y) - y;
    if (std::fabs(delta) <= opt.fixed_point_tol * (1.0 + std::fabs(y)))
      return y + delta;
    if (std::fabs(delta) >= std::fabs(prev)) damping = 0.5;
    y += damping * delta;
    prev = delta;
  }
  // F(y) = y - map(y); find a sign change around e.
  auto F = [&](double v) { return v - map(v); };
  double width = std::fabs(map(e) - e) + 1.0;
  double lo = e - width, hi = e + width;
  int expand = 0;
  while (F(lo) > 0.0 || F(hi) < 0.0) {
    if (++expand > 60)
      fail(ErrorKind::SolverDiverged,
           "implicit step failed to converge at step " + std::to_string(step) +
               ", path " + std::to_string(at.path));
    width *= 2.0;
    lo = e - width;
    hi = e + width;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (F(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= opt.fixed_point_tol * (1.0 + std::fabs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

Vec terminal_values(const TerminalData& xi, const PathBundle& bundle) {
  Vec out = xi.values(bundle);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!std::isfinite(out[i]))
      fail(ErrorKind::PreconditionViolation,
           "terminal value is not finite on path " + std::to_string(i));
  return out;
}

void fill_consistency(SolutionField& sol, const Generator& g) {
  const PathBundle& b = *sol.bundle;
  const std::size_t m = b.count(), d = b.dims(), n = b.steps();
  sol.consistency_mean.assign(n, 0.0);
  sol.consistency_se.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double dt = b.grid().dt(j);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto z = sol.Z(j, i);
      const auto db = b.increment(j, i);
      double zdb = 0.0;
      for (std::size_t k = 0; k < d; ++k) zdb += z[k] * db[k];
      const double yj = sol.Y(j, i);
      const double r =
          yj - (sol.Y(j + 1, i) + g(eval_point(b, j, i), yj, z) * dt - zdb);
      s += r;
      s2 += r * r;
    }
    const double mean = s / m;
    sol.consistency_mean[j] = mean;
    const double var = std::max(s2 / m - mean * mean, 0.0);
    sol.consistency_se[j] = std::sqrt(var / m);
  }
}

}  // namespace

EvalPoint eval_point(const PathBundle& bundle, std::size_t step,
                     std::size_t path) {
  EvalPoint at;
  at.path = path;
  at.step = step;
  at.t = bundle.grid().node(step);
  at.b = bundle.position(step, path);
  return at;
}

std::vector<double> process_values(const FProcess& f, const PathBundle& bundle) {
  const std::size_t m = bundle.count(), n = bundle.steps();
  Vec out((n + 1) * m);
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t i = 0; i < m; ++i)
      out[j * m + i] = f(eval_point(bundle, j, i));
  return out;
}

SolutionField solve_bounded(const Generator& g, const TerminalData& xi,
                            const PathBundle& bundle,
                            const RegressionBasis& basis,
                            const SolveOptions& options) {
  const std::size_t m = bundle.count(), d = bundle.dims(), n = bundle.steps();
  auto y = std::make_shared<Vec>((n + 1) * m);
  auto z = std::make_shared<Vec>(n * m * d);
  const Vec xi_v = terminal_values(xi, bundle);
  std::copy(xi_v.begin(), xi_v.end(), y->begin() + n * m);

  SolutionField sol;
  sol.bundle = &bundle;
  sol.method = "regression";
  sol.residual_rms.assign(n, 0.0);
  Vec e(m);
  for (std::size_t jj = n; jj-- > 0;) {
    const StepProjector proj(basis, bundle, jj);
    sol.parameters = proj.parameters();
    const double dt = bundle.grid().dt(jj);
    std::span<double> zj(z->data() + jj * m * d, m * d);
    sol.residual_rms[jj] =
        proj.project({y->data() + (jj + 1) * m, m}, e, zj);
    double* yj = y->data() + jj * m;
    for (std::size_t i = 0; i < m; ++i) {
      yj[i] = implicit_step(g, eval_point(bundle, jj, i), zj.subspan(i * d, d),
                            e[i], dt, options, jj);
    }
  }
  sol.field = PathField{m, d, n, y, z};
  fill_consistency(sol, g);
  return sol;
}

SolutionField picard_solve(const Generator& g, const TerminalData& xi,
                           const PathBundle& bundle,
                           const RegressionBasis& basis, int max_iter,
                           double tol) {
  const std::size_t m = bundle.count(), d = bundle.dims(), n = bundle.steps();
  std::vector<StepProjector> proj;
  proj.reserve(n);
  for (std::size_t j = 0; j < n; ++j) proj.emplace_back(basis, bundle, j);

  auto y = std::make_shared<Vec>((n + 1) * m, 0.0);
  auto z = std::make_shared<Vec>(n * m * d, 0.0);
  const Vec xi_v = terminal_values(xi, bundle);
  std::copy(xi_v.begin(), xi_v.end(), y->begin() + n * m);

  SolutionField sol;
  sol.bundle = &bundle;
  sol.method = "picard";
  sol.residual_rms.assign(n, 0.0);
  sol.parameters = proj.empty() ? 0 : proj[0].parameters();

  Vec gdt(n * m), mart(n * m), s(m), a(m);
  double gap = HUGE_VAL;
  for (int k = 1; k <= max_iter; ++k) {
    // Each future step contributes g dt - Z.dB; the Z.dB terms have zero
    // conditional mean and cancel most of the regression noise.
    for (std::size_t j = 0; j < n; ++j) {
      const double dt = bundle.grid().dt(j);
      for (std::size_t i = 0; i < m; ++i) {
        const std::span<const double> zi(z->data() + (j * m + i) * d, d);
        const auto db = bundle.increment(j, i);
        double zdb = 0.0;
        for (std::size_t k = 0; k < d; ++k) zdb += zi[k] * db[k];
        gdt[j * m + i] = g(eval_point(bundle, j, i), (*y)[j * m + i], zi) * dt;
        mart[j * m + i] = zdb;
      }
    }
    auto y_new = std::make_shared<Vec>(*y);
    auto z_new = std::make_shared<Vec>(n * m * d);
    std::copy(xi_v.begin(), xi_v.end(), s.begin());
    for (std::size_t jj = n; jj-- > 0;) {
      sol.residual_rms[jj] =
          proj[jj].project(s, a, {z_new->data() + jj * m * d, m * d});
      for (std::size_t i = 0; i < m; ++i) {
        (*y_new)[jj * m + i] = a[i] + gdt[jj * m + i];
        s[i] += gdt[jj * m + i] - mart[jj * m + i];
      }
    }
    gap = 0.0;
    for (std::size_t e = 0; e < y->size(); ++e)
      gap = std::max(gap, std::fabs((*y_new)[e] - (*y)[e]));
    for (std::size_t e = 0; e < z->size(); ++e)
      gap = std::max(gap, std::fabs((*z_new)[e] - (*z)[e]));
    y = y_new;
    z = z_new;
    if (gap < tol) {
      // The field produced at iteration k-1 was already a fixed point.
      sol.iterations = std::max(1, k - 1);
      sol.field = PathField{m, d, n, y, z};
      fill_consistency(sol, g);
      return sol;
    }
  }
  fail(ErrorKind::IterationLimit, "Picard iteration did not converge in " +
                                      std::to_string(max_iter) +
                                      " iterations; last gap " + fmt_num(gap));
}

namespace {

std::vector<int> ladder_indices(int top) {
  std::vector<int> out;
  for (int v = 1; v < top; v *= 2) out.push_back(v);
  out.push_back(top);
  return out;
}

Vec node_means(const SolutionField& sol) {
  Vec out(sol.steps() + 1, 0.0);
  for (std::size_t j = 0; j <= sol.steps(); ++j) {
    double s = 0.0;
    for (double v : sol.Y_at(j)) s += v;
    out[j] = s / static_cast<double>(sol.count());
  }
  return out;
}

}  // namespace

LadderResult solve_ladder(const Generator& g, const TerminalData& xi,
                          const PathBundle& bundle,
                          const RegressionBasis& basis, int n_max, int q_max,
                          const LadderOptions& options) {
  require(n_max >= 1 && q_max >= 1, ErrorKind::InvalidArgument,
          "ladder bounds must be positive");
  const auto ns = ladder_indices(n_max);
  const auto qs = ladder_indices(q_max);
  const std::size_t m = bundle.count(), n = bundle.steps();

  LadderResult out;
  auto solve_at = [&](TruncationIndex idx) {
    try {
      SolutionField s = solve_bounded(truncate_generator(g, idx),
                                      truncate_terminal(xi, idx), bundle,
                                      basis, options.solve);
      out.snapshots.push_back({idx, node_means(s)});
      return s;
    } catch (const Error& e) {
      fail(e.kind(), std::string(e.what()) + " [ladder index n=" +
                         std::to_string(idx.n) + ", q=" +
                         std::to_string(idx.q) + "]");
    }
  };
  // Counts nodes where lower > upper beyond tolerance.
  auto compare = [&](const Vec& lower, const Vec& upper) {
    for (std::size_t e = 0; e < lower.size(); ++e) {
      ++out.comparisons;
      const double tol = options.monotone_tol * (1.0 + std::fabs(upper[e]));
      if (lower[e] > upper[e] + tol) ++out.violations;
    }
  };

  SolutionField base = solve_at({1, 1});
  const auto base_y = base.field.y;

  // first row: nondecreasing in n
  auto prev = base_y;
  for (std::size_t k = 1; k < ns.size(); ++k) {
    SolutionField s = solve_at({ns[k], 1});
    compare(*prev, *s.field.y);
    prev = s.field.y;
  }
  // first column: nonincreasing in q
  prev = base_y;
  for (std::size_t k = 1; k < qs.size(); ++k) {
    SolutionField s = solve_at({1, qs[k]});
    compare(*s.field.y, *prev);
    prev = s.field.y;
  }
  // diagonal
  const std::size_t len = std::max(ns.size(), qs.size());
  out.diagonal_gaps.assign(len, 0.0);
  SolutionField last = std::move(base);
  for (std::size_t k = 1; k < len; ++k) {
    const TruncationIndex idx{ns[std::min(k, ns.size() - 1)],
                              qs[std::min(k, qs.size() - 1)]};
    SolutionField s = solve_at(idx);
    double gap = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      double sq = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double dlt = s.Y(j, i) - last.Y(j, i);
        sq += dlt * dlt;
      }
      gap = std::max(gap, std::sqrt(sq / static_cast<double>(m)));
    }
    out.diagonal_gaps[k] = gap;
    last = std::move(s);
  }
  out.convergence_gap = len > 1 ? out.diagonal_gaps.back() : 0.0;
  out.violation_fraction =
      out.comparisons ? static_cast<double>(out.violations) / out.comparisons
                      : 0.0;
  out.final = std::move(last);
  return out;
}

ThetaResidual theta_residual(const SolutionField& sol,
                             const SolutionField& sol_prime, double theta,
                             const Generator* g, const Generator* g_prime) {
  require(theta > 0.0 && theta < 1.0, ErrorKind::Domain,
          "theta must lie in (0,1)");
  require(sol.bundle == sol_prime.bundle && sol.count() == sol_prime.count() &&
              sol.steps() == sol_prime.steps() && sol.dims() == sol_prime.dims(),
          ErrorKind::InvalidArgument,
          "theta residual needs fields on the same grid and paths");
  ThetaResidual out;
  out.theta = theta;
  const double w = 1.0 / (1.0 - theta);
  const Vec& y = *sol.field.y;
  const Vec& yp = *sol_prime.field.y;
  const Vec& z = *sol.field.z;
  const Vec& zp = *sol_prime.field.z;
  out.dU.resize(y.size());
  out.dV.resize(z.size());
  for (std::size_t e = 0; e < y.size(); ++e) out.dU[e] = (y[e] - theta * yp[e]) * w;
  for (std::size_t e = 0; e < z.size(); ++e) out.dV[e] = (z[e] - theta * zp[e]) * w;
  if (!g || !g_prime) return out;

  const Generator dg =
      theta_difference_generator(*g, *g_prime, theta, sol_prime.field);
  const PathBundle& b = *sol.bundle;
  const std::size_t m = b.count(), d = b.dims(), n = b.steps();
  for (std::size_t j = 0; j < n; ++j) {
    const double dt = b.grid().dt(j);
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::span<const double> v(out.dV.data() + (j * m + i) * d, d);
      const auto db = b.increment(j, i);
      double vdb = 0.0;
      for (std::size_t k = 0; k < d; ++k) vdb += v[k] * db[k];
      const double u = out.dU[j * m + i];
      s += u - (out.dU[(j + 1) * m + i] + dg(eval_point(b, j, i), u, v) * dt - vdb);
    }
    out.consistency_max = std::max(out.consistency_max, std::fabs(s / m));
    out.consistency_tolerance = std::max(
        out.consistency_tolerance,
        (std::fabs(sol.consistency_mean[j]) +
         theta * std::fabs(sol_prime.consistency_mean[j])) * w + 1e-9);
  }
  return out;
}

std::vector<SummaryRow> summarize(const SolutionField& sol) {
  std::vector<SummaryRow> rows;
  const std::size_t m = sol.count(), d = sol.dims(), n = sol.steps();
  for (std::size_t j = 0; j <= n; ++j) {
    const auto ys = sol.Y_at(j);
    Vec v(ys.begin(), ys.end());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(m);
    double zn = std::nan("");
    if (j < n) {
      zn = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto z = sol.Z(j, i);
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += z[k] * z[k];
        zn += std::sqrt(s);
      }
      zn /= static_cast<double>(m);
    }
    const double q05 = quantile(v, 0.05);
    const double q95 = quantile(std::move(v), 0.95);
    rows.push_back({sol.grid().node(j), mean, q05, q95, zn});
  }
  return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "time,y_mean,y_q05,y_q95,z_norm_mean\n";
  for (const auto& r : rows)
    os << fmt_num(r.time) << ',' << fmt_num(r.y_mean) << ',' << fmt_num(r.y_q05)
       << ',' << fmt_num(r.y_q95) << ',' << fmt_num(r.z_norm_mean) << '\n';
  return os.str();
}

}  // namespace bsde
