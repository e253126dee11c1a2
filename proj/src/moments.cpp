#include "bsde/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsde/error.hpp"

namespace bsde {

double log_sum_exp(std::span<const double> w) {
  if (w.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(w.begin(), w.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : w) s += std::exp(x - m);
  return m + std::log(s);
}

double log_mean_exp(std::span<const double> w) {
  return log_sum_exp(w) - std::log(static_cast<double>(w.size()));
}

double MomentEstimate::value() const { return std::exp(log_mean); }

double MomentEstimate::log_se() const {
  return rel_se > 0.0 ? log_mean + std::log(rel_se)
                      : -std::numeric_limits<double>::infinity();
}

MomentEstimate log_moment(std::span<const double> w) {
  require(!w.empty(), ErrorKind::InvalidArgument, "log_moment: no samples");
  MomentEstimate out;
  out.samples = w.size();
  const double n = static_cast<double>(w.size());
  out.log_mean = log_mean_exp(w);
  if (w.size() > 1 && std::isfinite(out.log_mean)) {
    // var/mean^2 = E[e^{2w}]/E[e^w]^2 - 1, all in log space
    std::vector<double> w2(w.begin(), w.end());
    for (double& x : w2) x *= 2.0;
    const double ratio = std::exp(log_mean_exp(w2) - 2.0 * out.log_mean);
    const double var_rel = std::max(0.0, ratio - 1.0) * n / (n - 1.0);
    out.rel_se = std::sqrt(var_rel / n);
  }

  // Share of the top 1% (at least one) of terms in the total.
  std::vector<double> sorted(w.begin(), w.end());
  const std::size_t top = std::max<std::size_t>(1, w.size() / 100);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(top - 1),
                   sorted.end(), std::greater<>());
  const double total = log_sum_exp(sorted);
  const double head =
      log_sum_exp(std::span<const double>(sorted.data(), top));
  out.heavy_tail = w.size() >= 100 && std::exp(head - total) > 0.5;
  out.overflow = out.log_mean > 700.0;
  out.transform = "exp(w)";
  return out;
}

MomentEstimate log_add(const MomentEstimate& a, const MomentEstimate& b) {
  MomentEstimate out;
  out.samples = std::min(a.samples, b.samples);
  const double m = std::max(a.log_mean, b.log_mean);
  if (!std::isfinite(m)) {
    out.log_mean = m;
    return out;
  }
  const double ea = std::exp(a.log_mean - m), eb = std::exp(b.log_mean - m);
  out.log_mean = m + std::log(ea + eb);
  out.rel_se = std::hypot(a.rel_se * ea, b.rel_se * eb) / (ea + eb);
  out.heavy_tail = a.heavy_tail || b.heavy_tail;
  out.overflow = out.log_mean > 700.0;
  out.transform = a.transform + " + " + b.transform;
  return out;
}

MomentEstimate subexp_moment_estimate(std::span<const double> samples,
                                      double p, double alpha_star) {
  require(p > 1.0, ErrorKind::Domain, "subexp moment: p must exceed 1");
  require(alpha_star > 1.0, ErrorKind::Domain,
          "subexp moment: alpha* must exceed 1");
  const double e = 2.0 / alpha_star;
  std::vector<double> w(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    require(samples[i] >= 0.0, ErrorKind::Domain,
            "subexp moment: samples must be nonnegative");
    w[i] = p * std::pow(samples[i], e);
  }
  MomentEstimate m = log_moment(w);
  m.p = p;
  m.transform = "exp(p*x^(2/alpha*))";
  return m;
}

}  // namespace bsde
