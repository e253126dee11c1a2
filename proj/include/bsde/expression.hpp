#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>

namespace bsde {

struct ExprVars {
  double t = 0.0;
  double y = 0.0;
  std::span<const double> z;
  std::span<const double> b;
  double alpha = 1.5;
  double beta = 0.0;
  double gamma = 0.0;
};

// Small arithmetic language for user generators.
//   numbers, + - * / ^, unary minus, parentheses, |x|
//   variables: t y z z1..z9 znorm b b1..b9 bnorm alpha beta gamma pi e
//   functions: abs min max ln log exp sqrt cbrt sin cos sign ind
// ind(x) is 1 when x > 0 and 0 otherwise. '·' and '−' are accepted.
class Expression {
 public:
  static Expression parse(const std::string& text);

  double operator()(const ExprVars& vars) const { return eval_(vars); }
  const std::string& text() const { return text_; }
  // Highest zK / bK index referenced (0 when only z / b are used).
  std::size_t max_z_index() const { return max_z_; }
  std::size_t max_b_index() const { return max_b_; }

 private:
  std::string text_;
  std::function<double(const ExprVars&)> eval_;
  std::size_t max_z_ = 0;
  std::size_t max_b_ = 0;
};

}  // namespace bsde
