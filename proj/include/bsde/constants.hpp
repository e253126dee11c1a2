#pragma once

#include <functional>
#include <string>

namespace bsde {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  bool capped = false;  // subdivision cap reached before tolerance
};

// Adaptive Gauss-Kronrod (15 point) on [a, b]; tol is relative.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double tol = 1e-8,
                           int max_depth = 15);

// Deterministic nonnegative coefficient t -> beta(t), gamma(t), ...
// Constants and exponentials carry closed-form integrals and powers.
class TimeFunction {
 public:
  enum class Kind { Zero, Constant, Exponential, Generic };

  TimeFunction() : TimeFunction(zero()) {}
  TimeFunction(std::function<double(double)> fn, std::string description);

  static TimeFunction zero();
  static TimeFunction constant(double c);
  // c * exp(-rate * t)
  static TimeFunction exponential(double c, double rate);

  double operator()(double t) const { return fn_(t); }
  // Integral over [0, s].
  double integral(double s) const;
  // t -> value(t)^r, keeping closed forms where possible.
  TimeFunction power(double r) const;
  TimeFunction scaled(double c) const;

  Kind kind() const { return kind_; }
  const std::string& description() const { return description_; }
  double sup_on(double horizon) const;

  friend TimeFunction operator+(const TimeFunction& a, const TimeFunction& b);
  friend TimeFunction max(const TimeFunction& a, const TimeFunction& b);

 private:
  Kind kind_ = Kind::Generic;
  double c_ = 0.0;
  double rate_ = 0.0;
  std::function<double(double)> fn_;
  std::string description_;
};

// Parses "zero", "const(c)", "exp(c,rate)" or a bare number.
TimeFunction parse_time_function(const std::string& text);

double conjugate_exponent(double alpha);
double khat(double alpha);
double k_threshold(double alpha);

// A(s) = integral of beta over [0, s]; rejects negative samples.
double beta_integral(const TimeFunction& beta, double s);

// mu(s) = mu0 exp((khat / alpha*) int_0^s e^{2A(r)} gamma(r)^{2/(2-alpha)} dr)
std::function<double(double)> mu_schedule(double alpha,
                                          const TimeFunction& gamma,
                                          const TimeFunction& beta,
                                          double mu0);

// A constant that may exceed double range; log_value is always finite.
struct BigConstant {
  double log_value = 0.0;
  double value = 1.0;  // +inf when overflowed
  bool overflow = false;
};

BigConstant make_big(double log_value);

BigConstant bound_constant_K(double alpha, double horizon,
                             const TimeFunction& beta,
                             const TimeFunction& gamma, double mu0 = 1.0);
BigConstant bound_constant_Kp(double p, double alpha, double horizon,
                              const TimeFunction& beta,
                              const TimeFunction& gamma, double mu0 = 1.0);

struct ThetaConstants {
  double delta_p = 0.0;
  double k_alpha = 0.0;
};

ThetaConstants theta_constants(double p, const TimeFunction& gamma,
                               double alpha, double horizon);

class ConstantSet {
 public:
  ConstantSet(double alpha, double horizon, TimeFunction beta,
              TimeFunction gamma, double mu0 = 1.0);

  double alpha() const { return alpha_; }
  double alpha_star() const { return alpha_star_; }
  double horizon() const { return horizon_; }
  double k() const { return k_; }
  double khat() const { return khat_; }
  double mu0() const { return mu0_; }
  double mu(double s) const { return mu_(s); }
  double mu_T() const { return mu_T_; }
  double A(double s) const { return beta_.integral(s); }
  double A_T() const { return A_T_; }
  const BigConstant& K() const { return K_; }
  BigConstant K_p(double p) const;
  double delta_p(double p) const;
  double k_alpha() const;
  const TimeFunction& beta() const { return beta_; }
  const TimeFunction& gamma() const { return gamma_; }

  // log of the test function exp(mu(s) x^{2/alpha*}).
  double log_psi(double s, double x) const;
  // e^{A(s)}|y| + k + int_t^s e^{A(r)} f_r dr, given the integral term.
  double yhat(double s, double abs_y, double weighted_f_integral) const;

  // JSON-like block with %.17g numbers; identical inputs give identical text.
  std::string dump(double p = 2.0) const;

 private:
  double alpha_;
  double alpha_star_;
  double horizon_;
  TimeFunction beta_;
  TimeFunction gamma_;
  double mu0_;
  double k_;
  double khat_;
  std::function<double(double)> mu_;
  double mu_T_;
  double A_T_;
  BigConstant K_;
};

}  // namespace bsde
