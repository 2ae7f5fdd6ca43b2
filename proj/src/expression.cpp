#include "fbmdrift/expression.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "fbmdrift/errors.h"

namespace fbmdrift {

struct Expression::Node {
  enum class Op { constant, variable, neg, add, sub, mul, div, sin, cos, exp };
  Op op = Op::constant;
  double value = 0.0;
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;

  double eval(double x) const {
    switch (op) {
      case Op::constant: return value;
      case Op::variable: return x;
      case Op::neg: return -lhs->eval(x);
      case Op::add: return lhs->eval(x) + rhs->eval(x);
      case Op::sub: return lhs->eval(x) - rhs->eval(x);
      case Op::mul: return lhs->eval(x) * rhs->eval(x);
      case Op::div: return lhs->eval(x) / rhs->eval(x);
      case Op::sin: return std::sin(lhs->eval(x));
      case Op::cos: return std::cos(lhs->eval(x));
      case Op::exp: return std::exp(lhs->eval(x));
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

NodePtr make(Node::Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

// expr   := term (('+'|'-') term)*
// term   := unary (('*'|'/') unary)*
// unary  := ('+'|'-') unary | atom
// atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    auto root = expr();
    skip_ws();
    if (pos_ != s_.size()) fail(fmt::format("unexpected '{}'", s_[pos_]));
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("", fmt::format("malformed expression \"{}\" at column {}: {}", s_, pos_ + 1, what));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Node::Op::add, std::move(lhs), term());
      else if (accept('-')) lhs = make(Node::Op::sub, std::move(lhs), term());
      else return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Node::Op::mul, std::move(lhs), unary());
      else if (accept('/')) lhs = make(Node::Op::div, std::move(lhs), unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Op::neg, unary());
    if (accept('+')) return unary();
    return atom();
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t begin = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view name = s_.substr(begin, pos_ - begin);
      if (name == "x") return make(Node::Op::variable);
      Node::Op op;
      if (name == "sin") op = Node::Op::sin;
      else if (name == "cos") op = Node::Op::cos;
      else if (name == "exp") op = Node::Op::exp;
      else {
        pos_ = begin;
        fail(fmt::format("unknown identifier '{}'", name));
      }
      if (!accept('(')) fail(fmt::format("expected '(' after {}", name));
      auto arg = expr();
      if (!accept(')')) fail("expected ')'");
      return make(op, std::move(arg));
    }
    fail(fmt::format("unexpected '{}'", c));
  }

  NodePtr number() {
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) fail("invalid number");
    pos_ += static_cast<std::size_t>(ptr - first);
    auto n = make(Node::Op::constant);
    n->value = v;
    return n;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::string text, std::shared_ptr<const Node> root)
    : text_(std::move(text)), root_(std::move(root)) {}

Expression Expression::parse(std::string_view text) {
  Parser parser(text);
  std::shared_ptr<const Node> root = parser.parse();
  return Expression(std::string(text), std::move(root));
}

double Expression::operator()(double x) const { return root_->eval(x); }

}  // namespace fbmdrift
