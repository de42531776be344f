#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace intgreen {

/// Forcing term sigma(t) as an immutable expression tree.
///
/// Grammar (whitespace between tokens is ignored):
///
///     expr    = term { ("+" | "-") term } ;
///     term    = unary { ("*" | "/") unary } ;
///     unary   = "-" unary | power ;
///     power   = primary [ "^" unary ] ;          (right-associative)
///     primary = number | "t" | "pi" | "e"
///             | func "(" expr ")" | "(" expr ")" ;
///     func    = "sin" | "cos" | "exp" | "sinh" | "cosh" | "sqrt" | "abs" ;
///     number  = digits [ "." digits ] [ ("e"|"E") ["+"|"-"] digits ]
///             | "." digits [ exponent ] ;
///
/// Consequences: `-2^2` is -4, `2^3^2` is 512, `2^-1` is 0.5. There is no
/// implicit multiplication and `t` is the only variable.
class SigmaFn {
 public:
  enum class Kind { Literal, Variable, Pi, Euler, Negate, Add, Sub, Mul, Div, Pow, Call };
  enum class Func { Sin, Cos, Exp, Sinh, Cosh, Sqrt, Abs };

  struct Node {
    Kind kind = Kind::Literal;
    double value = 0.0;
    Func func = Func::Sin;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  explicit SigmaFn(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  double operator()(double t) const;
  const Node& root() const { return *root_; }

  // Fully parenthesized canonical form; parsing it again yields a tree that
  // evaluates identically.
  std::string to_string() const;

 private:
  std::shared_ptr<const Node> root_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t offset, std::vector<std::string> expected);
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownIdentifier : public ParseError {
 public:
  UnknownIdentifier(std::string name, std::size_t offset);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class EvalError : public std::runtime_error {
 public:
  enum class Kind { DivisionByZero, Domain };
  EvalError(Kind kind, std::string subexpression);
  Kind kind() const { return kind_; }
  const std::string& subexpression() const { return subexpression_; }

 private:
  Kind kind_;
  std::string subexpression_;
};

SigmaFn parse_sigma(std::string_view src);

inline double eval_sigma(const SigmaFn& f, double t) { return f(t); }

}  // namespace intgreen
