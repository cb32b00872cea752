#ifndef PCMA_EXPRESSION_HPP
#define PCMA_EXPRESSION_HPP

#include <memory>
#include <string>
#include <vector>

#include "pcma/point.hpp"

namespace pcma {

// Small arithmetic DSL used for forcing terms, boundary data and smooth parts
// of initial data.
//
// Grammar (left-associative throughout, ^ binds tighter than unary minus):
//
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' primary)*
//   primary := number | variable | function '(' expr (',' expr)* ')' | '(' expr ')'
//
// Variables: x1 y1 x2 y2 t absz re2 abs2   (re2 = Re z1, abs2 = |z|^2,
// absz = |z|; x2/y2 are only legal when the ambient dimension is n=2).
// Functions: log exp max(.,.).

class Expression;
using ExprPtr = std::shared_ptr<const Expression>;

struct EvalContext {
  Point z;       // spatial point, z.dim = 2n
  double t = 0;  // time
};

class Expression {
 public:
  enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Log, Exp, Max };
  enum class Var { x1, y1, x2, y2, t, absz, re2, abs2 };

  Kind kind;
  double number = 0;           // Kind::Number
  Var var = Var::x1;           // Kind::Variable
  std::vector<ExprPtr> args;   // operands

  double eval(const EvalContext& ctx) const;

  // Rejects variables that do not exist in complex dimension n (x2/y2 for n=1).
  void validate_dimension(int n) const;

  // Canonical fully parenthesized form; parse(to_string(e)) reproduces the tree.
  std::string to_string() const;

  bool structurally_equal(const Expression& other) const;

  // Returns a copy with every occurrence of the time variable replaced by
  // `replacement` (used for composing flows with time reparametrizations).
  ExprPtr substitute_time(const ExprPtr& replacement) const;

  bool depends_on_time() const;
};

// Throws Error(ParseError) with a 1-based column position on bad input.
ExprPtr parse_expression(const std::string& text);

// Construction helpers for programmatically assembled expressions.
ExprPtr expr_num(double v);
ExprPtr expr_var(Expression::Var v);
ExprPtr expr_neg(ExprPtr a);
ExprPtr expr_add(ExprPtr a, ExprPtr b);
ExprPtr expr_sub(ExprPtr a, ExprPtr b);
ExprPtr expr_mul(ExprPtr a, ExprPtr b);
ExprPtr expr_div(ExprPtr a, ExprPtr b);
ExprPtr expr_pow(ExprPtr a, ExprPtr b);
ExprPtr expr_log(ExprPtr a);
ExprPtr expr_exp(ExprPtr a);
ExprPtr expr_max(ExprPtr a, ExprPtr b);

}  // namespace pcma

#endif
