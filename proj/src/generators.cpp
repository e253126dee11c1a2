#include "bsde/generators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "bsde/error.hpp"
#include "bsde/expression.hpp"
#include "bsde/format.hpp"

namespace bsde {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string trim(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

double parse_number(const std::string& s, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(!s.empty() && used == s.size(), ErrorKind::Configuration,
          "malformed number '" + s + "' in '" + context + "'");
  return v;
}

// Splits "name(a,b)" into name and arguments; bare "name" has no arguments.
std::pair<std::string, std::vector<double>> split_call(const std::string& text) {
  const auto open = text.find('(');
  if (open == std::string::npos) return {text, {}};
  require(text.back() == ')', ErrorKind::Configuration,
          "missing ')' in '" + text + "'");
  std::vector<double> args;
  std::string inner = text.substr(open + 1, text.size() - open - 2);
  std::size_t start = 0;
  while (start <= inner.size()) {
    const auto comma = inner.find(',', start);
    const std::string piece =
        inner.substr(start, comma == std::string::npos ? std::string::npos
                                                       : comma - start);
    args.push_back(parse_number(piece, text));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return {text.substr(0, open), args};
}

// sup over r >= 0 of L(r) - r^alpha, with L = (ln(e+r))^{alpha*/2}.
double log_growth_excess(double alpha) {
  const double as = alpha / (alpha - 1.0);
  double best = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double r = i * 1e-4;
    best = std::max(best, log_growth(r, as) - std::pow(r, alpha));
  }
  // The maximizer is interior and smooth; the grid error is below 1e-6.
  return best + 1e-6;
}

// sup over r >= 0 of L'(r).
double log_growth_slope(double alpha) {
  const double as = alpha / (alpha - 1.0);
  double best = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double r = i * 1e-3;
    const double l = std::log(M_E + r);
    best = std::max(best, (as / 2.0) * std::pow(l, as / 2.0 - 1.0) / (M_E + r));
  }
  return best * (1.0 + 1e-6);
}

std::shared_ptr<CoefficientProfile> base_profile(double alpha, std::size_t d) {
  require(alpha > 1.0 && alpha < 2.0, ErrorKind::Domain,
          "alpha must lie in (1,2)");
  require(d >= 1, ErrorKind::InvalidArgument, "dimension must be >= 1");
  auto p = std::make_shared<CoefficientProfile>();
  p->alpha = alpha;
  p->dims = d;
  p->psi_growth = [](double r) { return r; };
  p->psi_description = "r";
  p->c_quad = 1.0;
  return p;
}

constexpr unsigned kAllStructural =
    flags::kEX1 | flags::kEX2 | flags::kUNi | flags::kUNii | flags::kUNprimei |
    flags::kUNprimeii | flags::kLipschitz | flags::kBounded;

unsigned reflect_flags(unsigned f) {
  auto swap = [&](unsigned a, unsigned b) {
    const bool ha = f & a, hb = f & b;
    f &= ~(a | b);
    if (ha) f |= b;
    if (hb) f |= a;
  };
  swap(flags::kUNi, flags::kUNii);
  swap(flags::kUNprimei, flags::kUNprimeii);
  swap(flags::kConvex, flags::kConcave);
  return f;
}

// Runs fn with a (1-th)*a + th*b combination in a small buffer.
template <class F>
double with_mix(std::span<const double> a, std::span<const double> b,
                double theta, F&& fn) {
  double stack[16];
  std::vector<double> heap(a.size() > 16 ? a.size() : 0);
  double* buf = a.size() > 16 ? heap.data() : stack;
  for (std::size_t i = 0; i < a.size(); ++i)
    buf[i] = (1.0 - theta) * a[i] + theta * b[i];
  return fn(std::span<const double>(buf, a.size()));
}

}  // namespace

FProcess FProcess::zero() {
  return FProcess([](const EvalPoint&) { return 0.0; }, "zero");
}

FProcess FProcess::of_time(const TimeFunction& f) {
  if (f.kind() == TimeFunction::Kind::Zero) return zero();
  return FProcess([f](const EvalPoint& at) { return f(at.t); }, f.description());
}

FProcess FProcess::abs_b(double c) {
  if (c == 0.0) return zero();
  return FProcess([c](const EvalPoint& at) { return c * norm(at.b); },
                  "abs_b(" + fmt_num(c) + ")");
}

FProcess operator+(const FProcess& a, const FProcess& b) {
  if (a.description_ == "zero") return b;
  if (b.description_ == "zero") return a;
  auto fa = a.fn_, fb = b.fn_;
  return FProcess([fa, fb](const EvalPoint& at) { return fa(at) + fb(at); },
                  a.description_ + "+" + b.description_);
}

FProcess FProcess::scaled(double c) const {
  if (c == 0.0 || description_ == "zero") return zero();
  auto f = fn_;
  return FProcess([f, c](const EvalPoint& at) { return c * f(at); },
                  fmt_num(c) + "*(" + description_ + ")");
}

FProcess max(const FProcess& a, const FProcess& b) {
  auto fa = a.fn_, fb = b.fn_;
  return FProcess(
      [fa, fb](const EvalPoint& at) { return std::max(fa(at), fb(at)); },
      "max(" + a.description_ + "," + b.description_ + ")");
}

FProcess parse_process(const std::string& raw, const TimeFunction& beta,
                       const TimeFunction& gamma) {
  const std::string text = trim(raw);
  require(!text.empty(), ErrorKind::Configuration, "empty process spec");
  FProcess out = FProcess::zero();
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] == '(') ++depth;
    if (i < text.size() && text[i] == ')') --depth;
    if (i < text.size() && !(text[i] == '+' && depth == 0)) continue;
    const std::string term = text.substr(start, i - start);
    start = i + 1;
    auto [name, args] = split_call(term);
    auto arg = [&, &args = args, &name = name](std::size_t k) {
      require(args.size() > k, ErrorKind::Configuration,
              "process term '" + name + "' needs more arguments");
      return args[k];
    };
    if (name == "zero") continue;
    if (name == "const") {
      out = out + FProcess::of_time(TimeFunction::constant(arg(0)));
    } else if (name == "exp") {
      out = out + FProcess::of_time(TimeFunction::exponential(arg(0), arg(1)));
    } else if (name == "abs_b") {
      out = out + FProcess::abs_b(args.empty() ? 1.0 : arg(0));
    } else if (name == "beta") {
      out = out + FProcess::of_time(beta.scaled(args.empty() ? 1.0 : arg(0)));
    } else if (name == "gamma") {
      out = out + FProcess::of_time(gamma.scaled(args.empty() ? 1.0 : arg(0)));
    } else {
      fail(ErrorKind::Configuration,
           "unknown process term '" + name +
               "' (known: zero, const, exp, abs_b, beta, gamma)");
    }
  }
  return out;
}

std::string describe_flags(unsigned f) {
  static const std::pair<unsigned, const char*> names[] = {
      {flags::kConvex, "convex"},       {flags::kConcave, "concave"},
      {flags::kEX1, "EX1"},             {flags::kEX2, "EX2"},
      {flags::kUNi, "UN-i"},            {flags::kUNii, "UN-ii"},
      {flags::kUNprimei, "UNprime-i"},  {flags::kUNprimeii, "UNprime-ii"},
      {flags::kLipschitz, "lipschitz"}, {flags::kBounded, "bounded"},
      {flags::kLinear, "linear"}};
  std::string out;
  for (auto [bit, name] : names) {
    if (!(f & bit)) continue;
    if (!out.empty()) out += ",";
    out += name;
  }
  return out.empty() ? "none" : out;
}

Generator::Generator(std::string name, Fn fn, unsigned flags,
                     std::shared_ptr<const CoefficientProfile> profile)
    : name_(std::move(name)),
      fn_(std::move(fn)),
      flags_(flags),
      profile_(std::move(profile)) {
  require(profile_ != nullptr, ErrorKind::InvalidArgument,
          "generator needs a coefficient profile");
}

std::vector<double> TerminalData::values(const PathBundle& bundle) const {
  std::vector<double> out(bundle.count());
  for (std::size_t i = 0; i < bundle.count(); ++i) out[i] = at(bundle, i);
  return out;
}

double example1_q(double x) {
  if (x <= -2.0) return -x;
  if (x >= 2.0) return -2.0 * x;
  return -1.5 * x - 1.0;
}

double log_growth(double x, double alpha_star) {
  return std::pow(std::log(M_E + std::fabs(x)), alpha_star / 2.0);
}

Generator builtin_example_1(const TimeFunction& beta, const TimeFunction& gamma,
                            std::size_t d, double alpha) {
  auto p = base_profile(alpha, d);
  const double sd = std::sqrt(static_cast<double>(d));
  const double dd = static_cast<double>(d);
  p->beta = beta;
  p->gamma = gamma.scaled(1.0 + 2.0 * sd);
  p->f = FProcess::abs_b(1.0) + FProcess::of_time(beta) +
         FProcess::of_time(gamma.scaled(2.0 * dd + 2.0 * sd + 1.0));
  p->psi_growth = [](double r) { return std::cbrt(r); };
  p->psi_description = "r^(1/3)";
  p->c_quad = std::max(2.0 * gamma.sup_on(100.0), 1e-12);
  p->un = UnCoefficients{FProcess::abs_b(1.0) + FProcess::of_time(beta) +
                             FProcess::of_time(gamma.scaled(169.0 * dd)),
                         beta.scaled(2.0), gamma.scaled(1.0 + 6.0 * dd)};
  const TimeFunction slope = gamma.scaled(1.5 + alpha * std::pow(2.0, alpha - 1.0));
  p->u = beta;
  p->v = gamma.scaled(1.0 + 2.0 * sd);
  p->k1 = beta;
  p->k2 = beta;
  p->a = 2.0;
  p->c1 = slope;
  p->c2 = slope;
  p->c3 = slope;
  auto fn = [beta, gamma, alpha](const EvalPoint& at, double y,
                                 std::span<const double> z) {
    const double ly = y <= 0.0 ? std::cbrt(y) : std::sin(y);
    double qs = 0.0, zz = 0.0;
    for (double zi : z) {
      qs += example1_q(zi);
      zz += zi * zi;
    }
    const double gt = gamma(at.t);
    return norm(at.b) + beta(at.t) * ly + gt * qs +
           gt * std::pow(std::sqrt(zz), alpha);
  };
  return Generator("example1", fn,
                   flags::kEX1 | flags::kEX2 | flags::kUNprimei, p);
}

Generator builtin_example_2(const TimeFunction& beta, const TimeFunction& gamma,
                            std::size_t d, double alpha) {
  auto p = base_profile(alpha, d);
  const double dd = static_cast<double>(d);
  const double as = alpha / (alpha - 1.0);
  const double c_l = log_growth_excess(alpha);
  const double k_l = log_growth_slope(alpha);
  p->beta = beta;
  p->gamma = gamma.scaled(2.0 + dd);
  p->f = FProcess::abs_b(1.0) +
         FProcess::of_time(gamma.scaled(dd * c_l + dd + 2.0));
  p->psi_growth = [](double r) { return std::sqrt(r); };
  p->psi_description = "r^(1/2)";
  p->c_quad = std::max((dd + 2.0) * gamma.sup_on(100.0), 1e-12);
  p->un = UnCoefficients{
      FProcess::abs_b(1.0) + FProcess::of_time(beta) +
          FProcess::of_time(gamma.scaled(dd * (11.0 + 4.0 * k_l))),
      beta, gamma.scaled(std::max(dd, 4.0 * k_l * dd + 2.0))};
  auto fn = [beta, gamma, alpha, as](const EvalPoint& at, double y,
                                     std::span<const double> z) {
    double ls = 0.0, zz = 0.0;
    for (double zi : z) {
      ls += log_growth(zi, as);
      zz += zi * zi;
    }
    const double gt = gamma(at.t);
    const double yterm = y <= 0.0 ? std::sqrt(-y) : 0.0;
    return norm(at.b) + beta(at.t) * yterm + gt * ls +
           2.0 * gt * std::pow(std::sqrt(zz), alpha);
  };
  return Generator("example2", fn, flags::kEX1 | flags::kEX2 | flags::kUNi, p);
}

Generator zero_generator(std::size_t d, double alpha) {
  auto p = base_profile(alpha, d);
  return Generator(
      "zero", [](const EvalPoint&, double, std::span<const double>) { return 0.0; },
      kAllStructural | flags::kConvex | flags::kConcave | flags::kLinear, p);
}

Generator linear_generator(double b, double c, std::size_t d, double alpha) {
  auto p = base_profile(alpha, d);
  const double w = std::fabs(c) * std::sqrt(static_cast<double>(d));
  p->beta = TimeFunction::constant(std::fabs(b));
  p->gamma = TimeFunction::constant(w);
  p->f = FProcess::of_time(TimeFunction::constant(w));
  p->c_quad = std::max(w, 1e-12);
  return Generator(
      "linear(" + fmt_num(b) + "," + fmt_num(c) + ")",
      [b, c](const EvalPoint&, double y, std::span<const double> z) {
        double s = 0.0;
        for (double zi : z) s += zi;
        return b * y + c * s;
      },
      (kAllStructural & ~flags::kBounded) | flags::kConvex | flags::kConcave |
          flags::kLinear,
      p);
}

Generator convex_power_generator(const TimeFunction& gamma, std::size_t d,
                                 double alpha) {
  auto p = base_profile(alpha, d);
  p->gamma = gamma;
  p->f = FProcess::of_time(gamma);
  p->c_quad = std::max(gamma.sup_on(100.0), 1e-12);
  return Generator(
      "convex-power",
      [gamma, alpha](const EvalPoint& at, double, std::span<const double> z) {
        return gamma(at.t) * std::pow(norm(z), alpha);
      },
      flags::kConvex | flags::kEX1 | flags::kEX2 | flags::kUNi |
          flags::kUNprimei,
      p);
}

Generator expression_generator(const std::string& expression,
                               CoefficientProfile profile, unsigned flag_set) {
  const Expression e = Expression::parse(expression);
  require(e.max_z_index() <= profile.dims && e.max_b_index() <= profile.dims,
          ErrorKind::Configuration,
          "expression '" + expression + "' references a coordinate beyond d=" +
              std::to_string(profile.dims));
  auto p = std::make_shared<CoefficientProfile>(std::move(profile));
  const TimeFunction beta = p->beta, gamma = p->gamma;
  const double alpha = p->alpha;
  return Generator(
      expression,
      [e, beta, gamma, alpha](const EvalPoint& at, double y,
                              std::span<const double> z) {
        ExprVars v;
        v.t = at.t;
        v.y = y;
        v.z = z;
        v.b = at.b;
        v.alpha = alpha;
        v.beta = beta(at.t);
        v.gamma = gamma(at.t);
        return e(v);
      },
      flag_set, p);
}

const std::vector<std::string>& generator_catalog() {
  static const std::vector<std::string> ids = {
      "zero", "example1", "example2", "linear", "convex-power",
      "custom-expression"};
  return ids;
}

Generator make_generator(const GeneratorSpec& s) {
  if (s.id == "zero") return zero_generator(s.dims, s.alpha);
  if (s.id == "example1")
    return builtin_example_1(s.beta, s.gamma, s.dims, s.alpha);
  if (s.id == "example2")
    return builtin_example_2(s.beta, s.gamma, s.dims, s.alpha);
  if (s.id == "linear")
    return linear_generator(s.linear_b, s.linear_c, s.dims, s.alpha);
  if (s.id == "convex-power")
    return convex_power_generator(s.gamma, s.dims, s.alpha);
  if (s.id == "custom-expression") {
    require(!s.expression.empty(), ErrorKind::Configuration,
            "custom-expression needs an expression");
    CoefficientProfile p = *base_profile(s.alpha, s.dims);
    p.beta = s.beta;
    p.gamma = s.gamma;
    p.f = s.f_process.empty() ? FProcess::zero()
                              : parse_process(s.f_process, s.beta, s.gamma);
    return expression_generator(s.expression, std::move(p));
  }
  std::string known;
  for (const auto& id : generator_catalog()) known += (known.empty() ? "" : ", ") + id;
  fail(ErrorKind::Configuration,
       "unknown generator '" + s.id + "' (catalog: " + known + ")");
}

const std::vector<std::string>& terminal_catalog() {
  static const std::vector<std::string> ids = {
      "zero", "const(c)", "bt", "abs_bt", "sin_bt", "clamp_bt(c)",
      "clamp_bt_shift(c,s)"};
  return ids;
}

TerminalData make_terminal(const std::string& raw) {
  const std::string text = trim(raw);
  auto [name, args] = split_call(text);
  auto arg = [&, &args = args](std::size_t k) {
    require(args.size() > k, ErrorKind::Configuration,
            "terminal '" + text + "' needs more arguments");
    return args[k];
  };
  if (name == "zero")
    return TerminalData([](std::span<const double>) { return 0.0; }, "zero");
  if (name == "const") {
    const double c = arg(0);
    return TerminalData([c](std::span<const double>) { return c; }, text);
  }
  if (name == "bt")
    return TerminalData([](std::span<const double> b) { return b[0]; }, text);
  if (name == "abs_bt")
    return TerminalData([](std::span<const double> b) { return std::fabs(b[0]); },
                        text);
  if (name == "sin_bt")
    return TerminalData([](std::span<const double> b) { return std::sin(b[0]); },
                        text);
  if (name == "clamp_bt") {
    const double c = arg(0);
    require(c >= 0.0, ErrorKind::Configuration, "clamp level must be >= 0");
    return TerminalData(
        [c](std::span<const double> b) { return std::clamp(b[0], -c, c); }, text);
  }
  if (name == "clamp_bt_shift") {
    const double c = arg(0), s = arg(1);
    require(c >= 0.0, ErrorKind::Configuration, "clamp level must be >= 0");
    return TerminalData(
        [c, s](std::span<const double> b) { return std::clamp(b[0], -c, c) + s; },
        text);
  }
  std::string known;
  for (const auto& id : terminal_catalog()) known += (known.empty() ? "" : ", ") + id;
  fail(ErrorKind::Configuration,
       "unknown terminal '" + text + "' (catalog: " + known + ")");
}

TerminalData truncate_terminal(const TerminalData& xi, TruncationIndex idx) {
  require(idx.n >= 1 && idx.q >= 1, ErrorKind::InvalidArgument,
          "truncation indices must be positive");
  const double n = idx.n, q = idx.q;
  return TerminalData(
      [xi, n, q](std::span<const double> b) {
        const double v = xi(b);
        return std::min(std::max(v, 0.0), n) - std::min(std::max(-v, 0.0), q);
      },
      xi.description() + "^{" + std::to_string(idx.n) + "," +
          std::to_string(idx.q) + "}");
}

Generator truncate_generator(const Generator& g, TruncationIndex idx) {
  require(idx.n >= 1 && idx.q >= 1, ErrorKind::InvalidArgument,
          "truncation indices must be positive");
  const double n = idx.n, q = idx.q;
  return Generator(
      g.name() + "^{" + std::to_string(idx.n) + "," + std::to_string(idx.q) + "}",
      [g, n, q](const EvalPoint& at, double y, std::span<const double> z) {
        const double v = g(at, y, z);
        const double decay = std::exp(-at.t);
        return std::min(std::max(v, 0.0), n * decay) -
               std::min(std::max(-v, 0.0), q * decay);
      },
      g.flags() | flags::kBounded, g.profile_ptr());
}

Generator theta_difference_generator(const Generator& g,
                                     const Generator& g_prime, double theta,
                                     PathField prime, ThetaVariant variant,
                                     std::optional<PathField> own) {
  require(theta > 0.0 && theta < 1.0, ErrorKind::Domain,
          "theta must lie in (0,1)");
  require(prime.y && prime.z, ErrorKind::InvalidArgument,
          "theta difference needs the primed solution field");
  const double w = 1.0 / (1.0 - theta);
  if (variant == ThetaVariant::Primary) {
    return Generator(
        "theta-diff(" + g.name() + "," + g_prime.name() + ")",
        [g, g_prime, theta, w, prime](const EvalPoint& at, double y,
                                      std::span<const double> z) {
          const double yp = prime.Y(at.step, at.path);
          const auto zp = prime.Z(at.step, at.path);
          const double gp = g(at, yp, zp);
          const double mixed = with_mix(z, zp, theta, [&](std::span<const double> zz) {
            return g(at, (1.0 - theta) * y + theta * yp, zz);
          });
          return w * (mixed - theta * gp) + theta * w * (gp - g_prime(at, yp, zp));
        },
        0, g.profile_ptr());
  }
  require(own.has_value() && own->y && own->z, ErrorKind::InvalidArgument,
          "the alternative theta difference needs the unprimed solution field");
  const PathField self = *own;
  return Generator(
      "theta-diff-resp(" + g.name() + "," + g_prime.name() + ")",
      [g, g_prime, theta, w, prime, self](const EvalPoint& at, double y,
                                          std::span<const double> z) {
        const double yy = self.Y(at.step, at.path);
        const auto zz = self.Z(at.step, at.path);
        const double yp = prime.Y(at.step, at.path);
        const auto zp = prime.Z(at.step, at.path);
        const double mixed = with_mix(z, zp, theta, [&](std::span<const double> m) {
          return g_prime(at, (1.0 - theta) * y + theta * yp, m);
        });
        return w * (g(at, yy, zz) - g_prime(at, yy, zz)) +
               w * (mixed - theta * g_prime(at, yp, zp));
      },
      0, g_prime.profile_ptr());
}

Generator reflect_generator(const Generator& g) {
  return Generator(
      "reflect(" + g.name() + ")",
      [g](const EvalPoint& at, double y, std::span<const double> z) {
        double stack[16];
        std::vector<double> heap(z.size() > 16 ? z.size() : 0);
        double* buf = z.size() > 16 ? heap.data() : stack;
        for (std::size_t i = 0; i < z.size(); ++i) buf[i] = -z[i];
        return -g(at, -y, std::span<const double>(buf, z.size()));
      },
      reflect_flags(g.flags()), g.profile_ptr());
}

namespace {

std::shared_ptr<CoefficientProfile> merged_profile(const Generator& g1,
                                                   const Generator& g2,
                                                   double k1, double k2,
                                                   bool use_max) {
  const auto& p1 = g1.profile();
  const auto& p2 = g2.profile();
  require(p1.alpha == p2.alpha && p1.dims == p2.dims,
          ErrorKind::InvalidArgument,
          "combined generators must share alpha and dimension");
  auto p = std::make_shared<CoefficientProfile>();
  p->alpha = p1.alpha;
  p->dims = p1.dims;
  auto tf = [&](const TimeFunction& a, const TimeFunction& b) {
    return use_max ? max(a, b) : a.scaled(k1) + b.scaled(k2);
  };
  auto fp = [&](const FProcess& a, const FProcess& b) {
    return use_max ? max(a, b) : a.scaled(k1) + b.scaled(k2);
  };
  p->beta = tf(p1.beta, p2.beta);
  p->gamma = tf(p1.gamma, p2.gamma);
  p->f = fp(p1.f, p2.f);
  auto psi1 = p1.psi_growth, psi2 = p2.psi_growth;
  if (use_max)
    p->psi_growth = [psi1, psi2](double r) { return std::max(psi1(r), psi2(r)); };
  else
    p->psi_growth = [psi1, psi2, k1, k2](double r) {
      return k1 * psi1(r) + k2 * psi2(r);
    };
  p->psi_description = "combined";
  p->c_quad = use_max ? std::max(p1.c_quad, p2.c_quad)
                      : k1 * p1.c_quad + k2 * p2.c_quad;
  if (p1.un || p2.un) {
    const auto u1 = p1.un_or_growth(), u2 = p2.un_or_growth();
    p->un = UnCoefficients{fp(u1.f, u2.f), tf(u1.beta, u2.beta),
                           tf(u1.gamma, u2.gamma)};
  }
  return p;
}

}  // namespace

Generator combine_sum(double k1, const Generator& g1, double k2,
                      const Generator& g2) {
  require(k1 > 0.0 && k2 > 0.0, ErrorKind::InvalidArgument,
          "sum weights must be positive");
  const unsigned keep = kAllStructural | flags::kConvex | flags::kConcave |
                        flags::kLinear;
  return Generator(
      fmt_num(k1) + "*" + g1.name() + "+" + fmt_num(k2) + "*" + g2.name(),
      [g1, g2, k1, k2](const EvalPoint& at, double y, std::span<const double> z) {
        return k1 * g1(at, y, z) + k2 * g2(at, y, z);
      },
      g1.flags() & g2.flags() & keep, merged_profile(g1, g2, k1, k2, false));
}

Generator combine_max(const Generator& g1, const Generator& g2) {
  const unsigned keep = kAllStructural | flags::kConvex;
  return Generator(
      "max(" + g1.name() + "," + g2.name() + ")",
      [g1, g2](const EvalPoint& at, double y, std::span<const double> z) {
        return std::max(g1(at, y, z), g2(at, y, z));
      },
      g1.flags() & g2.flags() & keep, merged_profile(g1, g2, 1.0, 1.0, true));
}

Generator combine_min(const Generator& g1, const Generator& g2) {
  const unsigned keep = kAllStructural | flags::kConcave;
  return Generator(
      "min(" + g1.name() + "," + g2.name() + ")",
      [g1, g2](const EvalPoint& at, double y, std::span<const double> z) {
        return std::min(g1(at, y, z), g2(at, y, z));
      },
      g1.flags() & g2.flags() & keep, merged_profile(g1, g2, 1.0, 1.0, true));
}

}  // namespace bsde
