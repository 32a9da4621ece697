#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsh::expr {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Raised when a derivative is requested where it does not exist (abs at 0)
/// or evaluation yields a non-finite value.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Op { constant, var_q, var_p, var_t, neg, add, sub, mul, div, pow, call };
enum class Func { sin, cos, tan, exp, log, sqrt, abs };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::constant;
  double value = 0.0;      // constant
  std::size_t index = 0;   // var_q / var_p (0-based)
  Func func = Func::sin;   // call
  Expr lhs;                // unary operand / left operand / call argument
  Expr rhs;
};

/// Variable binding for evaluation.
struct Point {
  std::span<const double> q;
  std::span<const double> p;
  double t = 0.0;
};

/// Parses `source` with variables q1..qd, p1..pd and t. Precedence: `^`
/// (right associative) binds tighter than unary minus, which binds tighter
/// than `* /`, then `+ -`.
Expr parse(const std::string& source, std::size_t dim);

/// Minimal-parenthesis rendering that parses back to an identical string.
std::string to_string(const Expr& e);

double evaluate(const Expr& e, const Point& at);
/// As evaluate, but throws EvalError on a non-finite result.
double evaluate_finite(const Expr& e, const Point& at);

/// Exact derivative with light constant folding.
Expr differentiate(const Expr& e, Op var, std::size_t index = 0);

/// Highest variable index used (+1) for q and p; for validation.
struct Usage {
  std::size_t max_q = 0;
  std::size_t max_p = 0;
  bool uses_t = false;
};
Usage usage(const Expr& e);

// Builders with constant folding.
Expr constant(double v);
Expr var_q(std::size_t i);
Expr var_p(std::size_t i);
Expr var_t();
Expr neg(Expr a);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr pow(Expr a, Expr b);
Expr call(Func f, Expr a);

}  // namespace tsh::expr
