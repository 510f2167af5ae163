#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace exactrd {

enum class Op {
  Const,
  Var,
  Neg,
  Sin,
  Cos,
  Tan,
  Sinh,
  Cosh,
  Tanh,
  Sech,
  Exp,
  Ln,
  Abs,
  Sqrt,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

/// Maximum number of nodes accepted by the parser.
inline constexpr std::size_t kMaxExprNodes = 10000;

/// Immutable expression tree in the single variable `t`.
///
/// Copies share structure. Building nodes with only constant children folds
/// them into a constant when the result is finite; no other rewriting happens.
class Expr {
 public:
  struct Node;

  /// The zero constant.
  Expr();

  static Expr constant(double v);
  static Expr var();
  static Expr unary(Op op, Expr arg);
  static Expr binary(Op op, Expr lhs, Expr rhs);

  Op op() const;
  double value() const;  // only for Const
  const Expr& arg(std::size_t i) const;
  std::size_t arity() const;

  bool is_constant() const { return op() == Op::Const; }
  bool is_zero() const { return is_constant() && value() == 0.0; }

  /// Evaluate at t. Throws DomainError on any non-finite intermediate value.
  double operator()(double t) const { return eval(t); }
  double eval(double t) const;

  std::size_t node_count() const;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Parse infix text. Grammar, loosest to tightest binding:
///   sum     := product (('+'|'-') product)*
///   product := signed (('*'|'/') signed)*
///   signed  := ('-'|'+') signed | power
///   power   := atom ('^' signed)?          (right associative)
///   atom    := number | 't' | 'pi' | 'e' | name '(' sum ')' | '(' sum ')'
Expr parse(std::string_view text);

/// Exact symbolic derivative d/dt.
Expr diff(const Expr& e);

/// Fully parenthesized canonical text; parse(render(e)) evaluates identically.
std::string render(const Expr& e);

/// Name used by the parser and printer for a unary function op.
std::string_view function_name(Op op);

}  // namespace exactrd
