#include "bsde/expression.hpp"

#include <cctype>
#include <cmath>
#include <vector>

#include "bsde/error.hpp"

namespace bsde {

namespace {

using Eval = std::function<double(const ExprVars&)>;

std::string normalize(const std::string& in) {
  std::string out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(in[i]);
    // U+00B7 middle dot and U+2212 minus sign
    if (c == 0xC2 && i + 1 < in.size() &&
        static_cast<unsigned char>(in[i + 1]) == 0xB7) {
      out += '*';
      ++i;
    } else if (c == 0xE2 && i + 2 < in.size() &&
               static_cast<unsigned char>(in[i + 1]) == 0x88 &&
               static_cast<unsigned char>(in[i + 2]) == 0x92) {
      out += '-';
      i += 2;
    } else {
      out += in[i];
    }
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string src) : s_(std::move(src)) {}

  Eval parse() {
    Eval e = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  std::size_t max_z = 0;
  std::size_t max_b = 0;

 private:
  [[noreturn]] void error(const std::string& msg) {
    fail(ErrorKind::Configuration, "expression error at offset " +
                                       std::to_string(pos_) + ": " + msg +
                                       " in '" + s_ + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) error(std::string("expected '") + c + "'");
  }

  Eval expr() {
    Eval lhs = term();
    for (;;) {
      if (eat('+')) {
        Eval rhs = term();
        lhs = [lhs, rhs](const ExprVars& v) { return lhs(v) + rhs(v); };
      } else if (eat('-')) {
        Eval rhs = term();
        lhs = [lhs, rhs](const ExprVars& v) { return lhs(v) - rhs(v); };
      } else {
        return lhs;
      }
    }
  }

  Eval term() {
    Eval lhs = unary();
    for (;;) {
      if (eat('*')) {
        Eval rhs = unary();
        lhs = [lhs, rhs](const ExprVars& v) { return lhs(v) * rhs(v); };
      } else if (eat('/')) {
        Eval rhs = unary();
        lhs = [lhs, rhs](const ExprVars& v) { return lhs(v) / rhs(v); };
      } else {
        return lhs;
      }
    }
  }

  Eval unary() {
    if (eat('-')) {
      Eval inner = unary();
      return [inner](const ExprVars& v) { return -inner(v); };
    }
    if (eat('+')) return unary();
    return power();
  }

  Eval power() {
    Eval base = primary();
    if (eat('^')) {
      Eval ex = unary();
      return [base, ex](const ExprVars& v) { return std::pow(base(v), ex(v)); };
    }
    return base;
  }

  Eval primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Eval e = expr();
      expect(')');
      return e;
    }
    if (c == '|') {
      ++pos_;
      Eval e = expr();
      expect('|');
      return [e](const ExprVars& v) { return std::fabs(e(v)); };
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    error("unexpected '" + std::string(1, c) + "'");
  }

  Eval number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) error("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return [v](const ExprVars&) { return v; };
  }

  std::vector<Eval> args() {
    std::vector<Eval> out;
    expect('(');
    out.push_back(expr());
    while (eat(',')) out.push_back(expr());
    expect(')');
    return out;
  }

  Eval identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                s_[pos_] == '_'))
      ++pos_;
    const std::string id = s_.substr(start, pos_ - start);
    skip();
    const bool call = pos_ < s_.size() && s_[pos_] == '(';
    if (call) return function(id);

    if (id == "t") return [](const ExprVars& v) { return v.t; };
    if (id == "y") return [](const ExprVars& v) { return v.y; };
    if (id == "alpha") return [](const ExprVars& v) { return v.alpha; };
    if (id == "beta") return [](const ExprVars& v) { return v.beta; };
    if (id == "gamma") return [](const ExprVars& v) { return v.gamma; };
    if (id == "pi") return [](const ExprVars&) { return M_PI; };
    if (id == "e") return [](const ExprVars&) { return M_E; };
    if (id == "znorm")
      return [](const ExprVars& v) {
        double s = 0.0;
        for (double x : v.z) s += x * x;
        return std::sqrt(s);
      };
    if (id == "bnorm")
      return [](const ExprVars& v) {
        double s = 0.0;
        for (double x : v.b) s += x * x;
        return std::sqrt(s);
      };
    if ((id[0] == 'z' || id[0] == 'b') &&
        (id.size() == 1 ||
         (id.size() == 2 && id[1] >= '1' && id[1] <= '9'))) {
      const std::size_t k = id.size() == 1 ? 0 : static_cast<std::size_t>(id[1] - '1');
      if (id[0] == 'z') {
        max_z = std::max(max_z, k + 1);
        return [k](const ExprVars& v) { return k < v.z.size() ? v.z[k] : 0.0; };
      }
      max_b = std::max(max_b, k + 1);
      return [k](const ExprVars& v) { return k < v.b.size() ? v.b[k] : 0.0; };
    }
    error("unknown variable '" + id + "'");
  }

  Eval function(const std::string& id) {
    auto a = args();
    auto unary_fn = [&](double (*fn)(double)) -> Eval {
      if (a.size() != 1) error(id + " takes one argument");
      Eval x = a[0];
      return [x, fn](const ExprVars& v) { return fn(x(v)); };
    };
    if (id == "abs") return unary_fn([](double x) { return std::fabs(x); });
    if (id == "ln" || id == "log") return unary_fn([](double x) { return std::log(x); });
    if (id == "exp") return unary_fn([](double x) { return std::exp(x); });
    if (id == "sqrt") return unary_fn([](double x) { return std::sqrt(x); });
    if (id == "cbrt") return unary_fn([](double x) { return std::cbrt(x); });
    if (id == "sin") return unary_fn([](double x) { return std::sin(x); });
    if (id == "cos") return unary_fn([](double x) { return std::cos(x); });
    if (id == "sign")
      return unary_fn([](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); });
    if (id == "ind") return unary_fn([](double x) { return x > 0 ? 1.0 : 0.0; });
    if (id == "min" || id == "max") {
      if (a.size() < 2) error(id + " takes at least two arguments");
      const bool is_min = id == "min";
      return [a, is_min](const ExprVars& v) {
        double r = a[0](v);
        for (std::size_t i = 1; i < a.size(); ++i) {
          const double x = a[i](v);
          r = is_min ? std::min(r, x) : std::max(r, x);
        }
        return r;
      };
    }
    error("unknown function '" + id + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p(normalize(text));
  Expression e;
  e.eval_ = p.parse();
  e.text_ = text;
  e.max_z_ = p.max_z;
  e.max_b_ = p.max_b;
  return e;
}

}  // namespace bsde
