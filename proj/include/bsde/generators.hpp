#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bsde/constants.hpp"
#include "bsde/stochastic.hpp"

namespace bsde {

// Where a generator or process is evaluated: grid position plus B_t.
struct EvalPoint {
  std::size_t path = 0;
  std::size_t step = 0;
  double t = 0.0;
  std::span<const double> b;
};

// Nonnegative process f_t(omega), depending on the path through B_t.
class FProcess {
 public:
  FProcess() : FProcess(zero()) {}
  FProcess(std::function<double(const EvalPoint&)> fn, std::string description)
      : fn_(std::move(fn)), description_(std::move(description)) {}

  static FProcess zero();
  static FProcess of_time(const TimeFunction& f);
  // c * |B_t| (Euclidean norm)
  static FProcess abs_b(double c);

  double operator()(const EvalPoint& at) const { return fn_(at); }
  const std::string& description() const { return description_; }

  friend FProcess operator+(const FProcess& a, const FProcess& b);
  FProcess scaled(double c) const;
  friend FProcess max(const FProcess& a, const FProcess& b);

 private:
  std::function<double(const EvalPoint&)> fn_;
  std::string description_;
};

// Sum of '+'-separated terms: const(c), exp(c,rate), abs_b(c), beta(c),
// gamma(c), zero.
FProcess parse_process(const std::string& text, const TimeFunction& beta,
                       const TimeFunction& gamma);

// Per-path, per-step values of a BSDE solution, time-major.
struct PathField {
  std::size_t count = 0;
  std::size_t dims = 0;
  std::size_t steps = 0;
  std::shared_ptr<const std::vector<double>> y;  // (steps+1) x count
  std::shared_ptr<const std::vector<double>> z;  // steps x count x dims

  double Y(std::size_t step, std::size_t path) const {
    return (*y)[step * count + path];
  }
  std::span<const double> Z(std::size_t step, std::size_t path) const {
    const std::size_t j = step < steps ? step : steps - 1;
    return {z->data() + (j * count + path) * dims, dims};
  }
};

// Coefficients attached to a generator. The growth data serve the
// existence-side conditions; `un` carries the coefficients used by the
// extended-convexity conditions when they differ.
struct UnCoefficients {
  FProcess f;
  TimeFunction beta;
  TimeFunction gamma;
};

struct CoefficientProfile {
  double alpha = 1.5;
  std::size_t dims = 1;
  TimeFunction beta;
  TimeFunction gamma;
  FProcess f;
  std::function<double(double)> psi_growth;
  std::string psi_description;
  double c_quad = 0.0;
  std::optional<UnCoefficients> un;
  // Coefficients of the structural sufficient conditions.
  std::optional<TimeFunction> u, v, k1, k2, c1, c2, c3, u_bar, v_bar, c_bar;
  std::optional<double> a;

  UnCoefficients un_or_growth() const {
    return un ? *un : UnCoefficients{f, beta, gamma};
  }
};

namespace flags {
inline constexpr unsigned kConvex = 1u << 0;
inline constexpr unsigned kConcave = 1u << 1;
inline constexpr unsigned kEX1 = 1u << 2;
inline constexpr unsigned kEX2 = 1u << 3;
inline constexpr unsigned kUNi = 1u << 4;
inline constexpr unsigned kUNii = 1u << 5;
inline constexpr unsigned kUNprimei = 1u << 6;
inline constexpr unsigned kUNprimeii = 1u << 7;
inline constexpr unsigned kLipschitz = 1u << 8;
inline constexpr unsigned kBounded = 1u << 9;
inline constexpr unsigned kLinear = 1u << 10;
}  // namespace flags

std::string describe_flags(unsigned f);

class Generator {
 public:
  using Fn =
      std::function<double(const EvalPoint&, double, std::span<const double>)>;

  Generator(std::string name, Fn fn, unsigned flags,
            std::shared_ptr<const CoefficientProfile> profile);

  double operator()(const EvalPoint& at, double y,
                    std::span<const double> z) const {
    return fn_(at, y, z);
  }
  const std::string& name() const { return name_; }
  unsigned flags() const { return flags_; }
  bool has(unsigned f) const { return (flags_ & f) == f; }
  const CoefficientProfile& profile() const { return *profile_; }
  std::shared_ptr<const CoefficientProfile> profile_ptr() const {
    return profile_;
  }

 private:
  std::string name_;
  Fn fn_;
  unsigned flags_;
  std::shared_ptr<const CoefficientProfile> profile_;
};

class TerminalData {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  TerminalData(Fn fn, std::string description)
      : fn_(std::move(fn)), description_(std::move(description)) {}

  // xi as a function of the terminal Brownian position.
  double operator()(std::span<const double> b_T) const { return fn_(b_T); }
  double at(const PathBundle& bundle, std::size_t path) const {
    return fn_(bundle.position(bundle.steps(), path));
  }
  std::vector<double> values(const PathBundle& bundle) const;
  const std::string& description() const { return description_; }

 private:
  Fn fn_;
  std::string description_;
};

struct TruncationIndex {
  int n = 1;
  int q = 1;
};

// q(x) from the first worked example: -x on (-inf,-2], -1.5x-1 on (-2,2),
// -2x on [2,inf).
double example1_q(double x);
// (ln(e + |x|))^{alpha*/2}
double log_growth(double x, double alpha_star);

Generator builtin_example_1(const TimeFunction& beta, const TimeFunction& gamma,
                            std::size_t d, double alpha = 1.5);
Generator builtin_example_2(const TimeFunction& beta, const TimeFunction& gamma,
                            std::size_t d, double alpha = 1.5);
Generator zero_generator(std::size_t d = 1, double alpha = 1.5);
// b*y + c*(z_1 + ... + z_d)
Generator linear_generator(double b, double c, std::size_t d = 1,
                           double alpha = 1.5);
// gamma(t) |z|^alpha
Generator convex_power_generator(const TimeFunction& gamma, std::size_t d = 1,
                                 double alpha = 1.5);
// User expression; coefficients come from the caller's profile.
Generator expression_generator(const std::string& expression,
                               CoefficientProfile profile, unsigned flags = 0);

struct GeneratorSpec {
  std::string id = "example1";
  double alpha = 1.5;
  std::size_t dims = 1;
  TimeFunction beta = TimeFunction::constant(0.5);
  TimeFunction gamma = TimeFunction::constant(0.5);
  std::string expression;
  std::string f_process;  // used by custom-expression
  double linear_b = 0.0;
  double linear_c = 0.0;
};

const std::vector<std::string>& generator_catalog();
Generator make_generator(const GeneratorSpec& spec);

// "zero", "const(c)", "bt", "abs_bt", "sin_bt", "clamp_bt(c)",
// "clamp_bt_shift(c,s)"; bt refers to the first coordinate of B_T.
const std::vector<std::string>& terminal_catalog();
TerminalData make_terminal(const std::string& spec);

TerminalData truncate_terminal(const TerminalData& xi, TruncationIndex idx);
Generator truncate_generator(const Generator& g, TruncationIndex idx);

enum class ThetaVariant {
  // [g((1-th)y+th Y', (1-th)z+th Z') - th g(Y',Z')]/(1-th)
  //   + th/(1-th) [g(Y',Z') - g'(Y',Z')]
  Primary,
  // [g(Y,Z) - g'(Y,Z)]/(1-th)
  //   + [g'((1-th)y+th Y', (1-th)z+th Z') - th g'(Y',Z')]/(1-th)
  Resp,
};

Generator theta_difference_generator(const Generator& g,
                                     const Generator& g_prime, double theta,
                                     PathField prime,
                                     ThetaVariant variant = ThetaVariant::Primary,
                                     std::optional<PathField> own = std::nullopt);

Generator reflect_generator(const Generator& g);

Generator combine_sum(double k1, const Generator& g1, double k2,
                      const Generator& g2);
Generator combine_max(const Generator& g1, const Generator& g2);
Generator combine_min(const Generator& g1, const Generator& g2);

}  // namespace bsde
