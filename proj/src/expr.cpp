#include "intgreen/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <utility>

#include "intgreen/format.hpp"

namespace intgreen {

namespace {

using Node = SigmaFn::Node;
using NodePtr = std::shared_ptr<const Node>;
using Kind = SigmaFn::Kind;
using Func = SigmaFn::Func;

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

NodePtr make_leaf(Kind kind, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->value = value;
  return n;
}

NodePtr make_node(Kind kind, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_call(Func func, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->func = func;
  n->lhs = std::move(arg);
  return n;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
  }
  return "?";
}

bool lookup_func(std::string_view name, Func& out) {
  static constexpr std::pair<std::string_view, Func> table[] = {
      {"sin", Func::Sin},   {"cos", Func::Cos},   {"exp", Func::Exp},  {"sinh", Func::Sinh},
      {"cosh", Func::Cosh}, {"sqrt", Func::Sqrt}, {"abs", Func::Abs},
  };
  for (const auto& [n, f] : table) {
    if (n == name) {
      out = f;
      return true;
    }
  }
  return false;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ == src_.size()) fail({"expression"});
    auto root = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail({"operator", "end of input"});
    return root;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string found = pos_ < src_.size() ? "'" + std::string(1, src_[pos_]) + "'" : "end of input";
    std::string message =
        "syntax error at offset " + std::to_string(pos_) + ": expected " + join(expected) + ", found " + found;
    throw ParseError(std::move(message), pos_, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Kind::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = make_node(Kind::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Kind::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_node(Kind::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_node(Kind::Negate, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    auto base = parse_primary();
    if (accept('^')) return make_node(Kind::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      const std::size_t frac = pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      if (pos_ == frac && frac == start + 1) {
        pos_ = frac;
        fail({"digit"});
      }
    }
    // An exponent is only consumed when digits follow, so "2*e" keeps the constant.
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && is_digit(src_[look])) {
        pos_ = look;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec == std::errc::result_out_of_range) {
      pos_ = start;
      throw ParseError("numeric literal out of range at offset " + std::to_string(start), start,
                       {"finite number"});
    }
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      pos_ = start;
      fail({"number"});
    }
    return make_leaf(Kind::Literal, value);
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail({"number", "identifier", "'('", "'-'"});
    const char c = src_[pos_];
    if (is_digit(c) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      auto inner = parse_expr();
      if (!accept(')')) fail({"')'"});
      return inner;
    }
    if (is_alpha(c)) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (is_alpha(src_[pos_]) || is_digit(src_[pos_]))) ++pos_;
      const std::string_view name = src_.substr(start, pos_ - start);
      if (name == "t") return make_leaf(Kind::Variable);
      if (name == "pi") return make_leaf(Kind::Pi);
      if (name == "e") return make_leaf(Kind::Euler);
      Func f{};
      if (lookup_func(name, f)) {
        if (!accept('(')) fail({"'('"});
        auto arg = parse_expr();
        if (!accept(')')) fail({"')'"});
        return make_call(f, arg);
      }
      throw UnknownIdentifier(std::string(name), start);
    }
    fail({"number", "identifier", "'('", "'-'"});
  }
};

std::string print(const Node& n) {
  switch (n.kind) {
    case Kind::Literal: return format_double(n.value);
    case Kind::Variable: return "t";
    case Kind::Pi: return "pi";
    case Kind::Euler: return "e";
    case Kind::Negate: return "(-" + print(*n.lhs) + ")";
    case Kind::Add: return "(" + print(*n.lhs) + " + " + print(*n.rhs) + ")";
    case Kind::Sub: return "(" + print(*n.lhs) + " - " + print(*n.rhs) + ")";
    case Kind::Mul: return "(" + print(*n.lhs) + " * " + print(*n.rhs) + ")";
    case Kind::Div: return "(" + print(*n.lhs) + " / " + print(*n.rhs) + ")";
    case Kind::Pow: return "(" + print(*n.lhs) + " ^ " + print(*n.rhs) + ")";
    case Kind::Call: return std::string(func_name(n.func)) + "(" + print(*n.lhs) + ")";
  }
  return "?";
}

double eval(const Node& n, double t) {
  switch (n.kind) {
    case Kind::Literal: return n.value;
    case Kind::Variable: return t;
    case Kind::Pi: return std::numbers::pi;
    case Kind::Euler: return std::numbers::e;
    case Kind::Negate: return -eval(*n.lhs, t);
    case Kind::Add: return eval(*n.lhs, t) + eval(*n.rhs, t);
    case Kind::Sub: return eval(*n.lhs, t) - eval(*n.rhs, t);
    case Kind::Mul: return eval(*n.lhs, t) * eval(*n.rhs, t);
    case Kind::Div: {
      const double num = eval(*n.lhs, t);
      const double den = eval(*n.rhs, t);
      if (den == 0.0) throw EvalError(EvalError::Kind::DivisionByZero, print(n));
      return num / den;
    }
    case Kind::Pow: {
      const double base = eval(*n.lhs, t);
      const double ex = eval(*n.rhs, t);
      if (base == 0.0 && ex < 0.0) throw EvalError(EvalError::Kind::DivisionByZero, print(n));
      const double r = std::pow(base, ex);
      if (std::isnan(r) && !std::isnan(base) && !std::isnan(ex))
        throw EvalError(EvalError::Kind::Domain, print(n));
      return r;
    }
    case Kind::Call: {
      const double x = eval(*n.lhs, t);
      switch (n.func) {
        case Func::Sin: return std::sin(x);
        case Func::Cos: return std::cos(x);
        case Func::Exp: return std::exp(x);
        case Func::Sinh: return std::sinh(x);
        case Func::Cosh: return std::cosh(x);
        case Func::Abs: return std::abs(x);
        case Func::Sqrt:
          if (x < 0.0) throw EvalError(EvalError::Kind::Domain, print(n));
          return std::sqrt(x);
      }
    }
  }
  return 0.0;
}

}  // namespace

ParseError::ParseError(std::string message, std::size_t offset, std::vector<std::string> expected)
    : std::runtime_error(std::move(message)), offset_(offset), expected_(std::move(expected)) {}

UnknownIdentifier::UnknownIdentifier(std::string name, std::size_t offset)
    : ParseError("unknown identifier '" + name + "' at offset " + std::to_string(offset), offset,
                 {"t", "pi", "e", "sin", "cos", "exp", "sinh", "cosh", "sqrt", "abs"}),
      name_(std::move(name)) {}

EvalError::EvalError(Kind kind, std::string subexpression)
    : std::runtime_error(std::string(kind == Kind::DivisionByZero ? "division by zero" : "domain error") +
                         " in " + subexpression),
      kind_(kind),
      subexpression_(std::move(subexpression)) {}

double SigmaFn::operator()(double t) const {
  if (!std::isfinite(t)) throw std::invalid_argument("sigma evaluated at non-finite t");
  return eval(*root_, t);
}

std::string SigmaFn::to_string() const { return print(*root_); }

SigmaFn parse_sigma(std::string_view src) { return SigmaFn(Parser(src).parse()); }

}  // namespace intgreen
