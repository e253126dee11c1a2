#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bsde {

// log(sum exp(w_i)); -inf for an empty input.
double log_sum_exp(std::span<const double> w);
// log((1/n) sum exp(w_i))
double log_mean_exp(std::span<const double> w);

struct MomentEstimate {
  std::size_t samples = 0;
  double log_mean = 0.0;
  // Standard error relative to the mean, so se = rel_se * exp(log_mean).
  double rel_se = 0.0;
  // Top order statistics carry most of the sum; the estimate is suspect.
  bool heavy_tail = false;
  // exp(log_mean) does not fit a double comfortably (log_mean > 700).
  bool overflow = false;
  double p = 0.0;
  std::string transform;  // e.g. "exp(p*x^(2/alpha*))"

  double value() const;
  double log_se() const;
};

// Log-space Monte Carlo estimate of E[exp(w)] from per-path exponents w_i.
MomentEstimate log_moment(std::span<const double> w);

// Estimate of E[e^{w_a}] + E[e^{w_b}] from two estimates on the same paths,
// standard errors combined as if independent.
MomentEstimate log_add(const MomentEstimate& a, const MomentEstimate& b);

// E[exp(p X^{2/alpha*})] for nonnegative samples of X.
MomentEstimate subexp_moment_estimate(std::span<const double> samples,
                                      double p, double alpha_star);

}  // namespace bsde
