#include "bsde/constants.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bsde/error.hpp"
#include "bsde/format.hpp"

namespace bsde {

namespace {

double softplus(double u) {
  return u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

void check_alpha(double alpha) {
  require(alpha > 1.0 && alpha < 2.0, ErrorKind::Domain,
          "alpha must lie in (1,2), got " + fmt_num(alpha));
}

double log_kp(double p, double alpha, double mu_T, double A_T) {
  const double k = k_threshold(alpha);
  const double k2 = std::pow(k, 2.0 / conjugate_exponent(alpha));
  const double left = p * std::log(p / (p - 1.0)) +
                      softplus(p * std::log(8.0 * mu_T) + p * A_T) +
                      p * mu_T * k2;
  const double right = std::log(p) + std::log(mu_T) + A_T;
  return std::max(left, right);
}

double log_k(double alpha, double mu_T, double A_T) {
  const double k = k_threshold(alpha);
  const double k2 = std::pow(k, 2.0 / conjugate_exponent(alpha));
  return std::max(mu_T * k2, std::log(mu_T) + A_T);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double tol, int max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  using boost::math::quadrature::gauss_kronrod;
  out.value = gauss_kronrod<double, 15>::integrate(
      f, a, b, static_cast<unsigned>(max_depth), tol, &out.error);
  out.capped = out.error > tol * std::max(1.0, std::abs(out.value));
  return out;
}

TimeFunction::TimeFunction(std::function<double(double)> fn,
                           std::string description)
    : kind_(Kind::Generic),
      fn_(std::move(fn)),
      description_(std::move(description)) {}

TimeFunction TimeFunction::zero() {
  TimeFunction f([](double) { return 0.0; }, "zero");
  f.kind_ = Kind::Zero;
  return f;
}

TimeFunction TimeFunction::constant(double c) {
  if (c == 0.0) return zero();
  TimeFunction f([c](double) { return c; }, "const(" + fmt_num(c) + ")");
  f.kind_ = Kind::Constant;
  f.c_ = c;
  return f;
}

TimeFunction TimeFunction::exponential(double c, double rate) {
  if (c == 0.0) return zero();
  if (rate == 0.0) return constant(c);
  TimeFunction f([c, rate](double t) { return c * std::exp(-rate * t); },
                 "exp(" + fmt_num(c) + "," + fmt_num(rate) + ")");
  f.kind_ = Kind::Exponential;
  f.c_ = c;
  f.rate_ = rate;
  return f;
}

double TimeFunction::integral(double s) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return c_ * s;
    case Kind::Exponential:
      return c_ * (-std::expm1(-rate_ * s)) / rate_;
    case Kind::Generic:
      break;
  }
  if (s == 0.0) return 0.0;
  return integrate(fn_, 0.0, s).value;
}

TimeFunction TimeFunction::power(double r) const {
  switch (kind_) {
    case Kind::Zero:
      return zero();
    case Kind::Constant:
      return constant(std::pow(c_, r));
    case Kind::Exponential:
      return exponential(std::pow(c_, r), rate_ * r);
    case Kind::Generic:
      break;
  }
  auto fn = fn_;
  return TimeFunction([fn, r](double t) { return std::pow(fn(t), r); },
                      "(" + description_ + ")^" + fmt_num(r));
}

TimeFunction TimeFunction::scaled(double c) const {
  switch (kind_) {
    case Kind::Zero:
      return zero();
    case Kind::Constant:
      return constant(c * c_);
    case Kind::Exponential:
      return exponential(c * c_, rate_);
    case Kind::Generic:
      break;
  }
  auto fn = fn_;
  return TimeFunction([fn, c](double t) { return c * fn(t); },
                      fmt_num(c) + "*" + description_);
}

double TimeFunction::sup_on(double horizon) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return c_;
    case Kind::Exponential:
      return std::max(c_, c_ * std::exp(-rate_ * horizon));
    case Kind::Generic:
      break;
  }
  double best = fn_(0.0);
  for (int i = 1; i <= 1000; ++i) best = std::max(best, fn_(horizon * i / 1000.0));
  return best;
}

TimeFunction operator+(const TimeFunction& a, const TimeFunction& b) {
  using K = TimeFunction::Kind;
  if (a.kind_ == K::Zero) return b;
  if (b.kind_ == K::Zero) return a;
  if (a.kind_ == K::Constant && b.kind_ == K::Constant)
    return TimeFunction::constant(a.c_ + b.c_);
  if (a.kind_ == K::Exponential && b.kind_ == K::Exponential &&
      a.rate_ == b.rate_)
    return TimeFunction::exponential(a.c_ + b.c_, a.rate_);
  auto fa = a.fn_, fb = b.fn_;
  return TimeFunction([fa, fb](double t) { return fa(t) + fb(t); },
                      a.description_ + "+" + b.description_);
}

TimeFunction max(const TimeFunction& a, const TimeFunction& b) {
  using K = TimeFunction::Kind;
  if (a.kind_ == K::Zero) return b;
  if (b.kind_ == K::Zero) return a;
  if (a.kind_ == K::Constant && b.kind_ == K::Constant)
    return TimeFunction::constant(std::max(a.c_, b.c_));
  auto fa = a.fn_, fb = b.fn_;
  return TimeFunction([fa, fb](double t) { return std::max(fa(t), fb(t)); },
                      "max(" + a.description_ + "," + b.description_ + ")");
}

TimeFunction parse_time_function(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == s.size() && !s.empty(), ErrorKind::Configuration,
            "malformed number '" + s + "' in coefficient '" + raw + "'");
    return v;
  };
  if (text == "zero" || text == "0") return TimeFunction::zero();
  auto args_of = [&](const std::string& head) -> std::string {
    if (text.rfind(head + "(", 0) != 0 || text.back() != ')') return {};
    return text.substr(head.size() + 1, text.size() - head.size() - 2);
  };
  if (auto a = args_of("const"); !a.empty()) return TimeFunction::constant(number(a));
  if (auto a = args_of("exp"); !a.empty()) {
    const auto comma = a.find(',');
    require(comma != std::string::npos, ErrorKind::Configuration,
            "exp coefficient needs two arguments: '" + raw + "'");
    return TimeFunction::exponential(number(a.substr(0, comma)),
                                     number(a.substr(comma + 1)));
  }
  return TimeFunction::constant(number(text));
}

double conjugate_exponent(double alpha) {
  check_alpha(alpha);
  return alpha / (alpha - 1.0);
}

double khat(double alpha) {
  check_alpha(alpha);
  return (2.0 - alpha) *
         std::pow((alpha - 1.0) / (alpha * alpha), -alpha / (2.0 - alpha));
}

double k_threshold(double alpha) {
  const double as = conjugate_exponent(alpha);
  return std::pow(as * as + as, as / 2.0);
}

double beta_integral(const TimeFunction& beta, double s) {
  require(s >= 0.0, ErrorKind::InvalidArgument, "integration bound must be >= 0");
  for (int i = 0; i <= 64; ++i) {
    const double t = s * i / 64.0;
    require(beta(t) >= 0.0, ErrorKind::InvalidCoefficient,
            "coefficient " + beta.description() + " is negative at t=" +
                fmt_num(t));
  }
  return beta.integral(s);
}

std::function<double(double)> mu_schedule(double alpha,
                                          const TimeFunction& gamma,
                                          const TimeFunction& beta,
                                          double mu0) {
  require(mu0 >= 1.0, ErrorKind::InvalidArgument, "mu0 must be >= 1");
  const double rate = khat(alpha) / conjugate_exponent(alpha);
  const TimeFunction gp = gamma.power(2.0 / (2.0 - alpha));
  if (gp.kind() == TimeFunction::Kind::Zero)
    return [mu0](double) { return mu0; };
  if (beta.kind() == TimeFunction::Kind::Zero &&
      gp.kind() != TimeFunction::Kind::Generic)
    return [mu0, rate, gp](double s) {
      return mu0 * std::exp(rate * gp.integral(s));
    };
  return [mu0, rate, gp, beta](double s) {
    if (s <= 0.0) return mu0;
    auto integrand = [&](double r) {
      return std::exp(2.0 * beta.integral(r)) * gp(r);
    };
    return mu0 * std::exp(rate * integrate(integrand, 0.0, s).value);
  };
}

BigConstant make_big(double log_value) {
  BigConstant c;
  c.log_value = log_value;
  c.overflow = !(log_value <= 700.0);
  c.value = c.overflow ? HUGE_VAL : std::exp(log_value);
  return c;
}

BigConstant bound_constant_K(double alpha, double horizon,
                             const TimeFunction& beta,
                             const TimeFunction& gamma, double mu0) {
  const double mu_T = mu_schedule(alpha, gamma, beta, mu0)(horizon);
  return make_big(log_k(alpha, mu_T, beta_integral(beta, horizon)));
}

BigConstant bound_constant_Kp(double p, double alpha, double horizon,
                              const TimeFunction& beta,
                              const TimeFunction& gamma, double mu0) {
  require(p > 1.0, ErrorKind::Domain, "p must exceed 1");
  const double mu_T = mu_schedule(alpha, gamma, beta, mu0)(horizon);
  return make_big(log_kp(p, alpha, mu_T, beta_integral(beta, horizon)));
}

ThetaConstants theta_constants(double p, const TimeFunction& gamma,
                               double alpha, double horizon) {
  require(p > 1.0, ErrorKind::Domain, "p must exceed 1");
  const double as = conjugate_exponent(alpha);
  const double ig = gamma.integral(horizon);
  require(ig > 0.0 && std::isfinite(ig), ErrorKind::InvalidCoefficient,
          "the integral of gamma must lie in (0, inf)");
  ThetaConstants out;
  out.delta_p = p * std::pow(ig, 2.0 / as);
  out.k_alpha = std::exp(as / 2.0);
  const double h = 0.01;
  auto F = [&](double x) { return std::pow(std::log(out.k_alpha + x), as / 2.0); };
  for (int i = 1; i < 10000; ++i) {
    const double x = i * h;
    const double d2 = F(x + h) - 2.0 * F(x) + F(x - h);
    require(d2 <= 1e-9, ErrorKind::ConstructionBug,
            "(ln(k_alpha + x))^{alpha*/2} fails the concavity test at x=" +
                fmt_num(x));
  }
  return out;
}

ConstantSet::ConstantSet(double alpha, double horizon, TimeFunction beta,
                         TimeFunction gamma, double mu0)
    : alpha_(alpha),
      alpha_star_(conjugate_exponent(alpha)),
      horizon_(horizon),
      beta_(std::move(beta)),
      gamma_(std::move(gamma)),
      mu0_(mu0),
      k_(k_threshold(alpha)),
      khat_(bsde::khat(alpha)) {
  require(horizon > 0.0, ErrorKind::InvalidArgument, "horizon must be > 0");
  beta_integral(gamma_, horizon);  // sign check only
  A_T_ = beta_integral(beta_, horizon);
  mu_ = mu_schedule(alpha, gamma_, beta_, mu0);
  mu_T_ = mu_(horizon);
  K_ = make_big(log_k(alpha, mu_T_, A_T_));
}

BigConstant ConstantSet::K_p(double p) const {
  require(p > 1.0, ErrorKind::Domain, "p must exceed 1");
  return make_big(log_kp(p, alpha_, mu_T_, A_T_));
}

double ConstantSet::delta_p(double p) const {
  return theta_constants(p, gamma_, alpha_, horizon_).delta_p;
}

double ConstantSet::k_alpha() const { return std::exp(alpha_star_ / 2.0); }

double ConstantSet::log_psi(double s, double x) const {
  return mu(s) * std::pow(x, 2.0 / alpha_star_);
}

double ConstantSet::yhat(double s, double abs_y,
                         double weighted_f_integral) const {
  return std::exp(A(s)) * abs_y + k_ + weighted_f_integral;
}

std::string ConstantSet::dump(double p) const {
  std::ostringstream os;
  const double ig = gamma_.integral(horizon_);
  os << "{\n";
  os << "  \"alpha\": " << fmt_num(alpha_) << ",\n";
  os << "  \"alpha_star\": " << fmt_num(alpha_star_) << ",\n";
  os << "  \"horizon\": " << fmt_num(horizon_) << ",\n";
  os << "  \"beta\": \"" << beta_.description() << "\",\n";
  os << "  \"gamma\": \"" << gamma_.description() << "\",\n";
  os << "  \"k\": " << fmt_num(k_) << ",\n";
  os << "  \"khat\": " << fmt_num(khat_) << ",\n";
  os << "  \"mu0\": " << fmt_num(mu0_) << ",\n";
  os << "  \"mu_T\": " << fmt_num(mu_T_) << ",\n";
  os << "  \"A_T\": " << fmt_num(A_T_) << ",\n";
  os << "  \"log_K\": " << fmt_num(K_.log_value) << ",\n";
  os << "  \"K_overflow\": " << (K_.overflow ? "true" : "false") << ",\n";
  os << "  \"p\": " << fmt_num(p) << ",\n";
  os << "  \"log_K_p\": " << fmt_num(K_p(p).log_value) << ",\n";
  os << "  \"k_alpha\": " << fmt_num(k_alpha()) << ",\n";
  if (ig > 0.0 && std::isfinite(ig))
    os << "  \"delta_p\": " << fmt_num(p * std::pow(ig, 2.0 / alpha_star_))
       << "\n";
  else
    os << "  \"delta_p\": null\n";
  os << "}\n";
  return os.str();
}

}  // namespace bsde
