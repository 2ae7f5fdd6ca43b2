#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace fbmdrift {

/// Compiled infix expression in one variable `x`.
///
/// Grammar: numeric literals, `x`, `sin`, `cos`, `exp` applied to a
/// parenthesised argument, unary +/-, binary + - * /, parentheses.
/// Evaluation is in double precision. Parse failures throw ConfigError
/// carrying the position of the offending token.
class Expression {
 public:
  static Expression parse(std::string_view text);

  double operator()(double x) const;
  const std::string& text() const noexcept { return text_; }

  struct Node;

 private:
  Expression(std::string text, std::shared_ptr<const Node> root);
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace fbmdrift
