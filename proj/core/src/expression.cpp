#include "pcma/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "pcma/errors.hpp"

namespace pcma {

namespace {

ExprPtr make(Expression::Kind k, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expression>();
  e->kind = k;
  e->args = std::move(args);
  return e;
}

const char* var_name(Expression::Var v) {
  switch (v) {
    case Expression::Var::x1: return "x1";
    case Expression::Var::y1: return "y1";
    case Expression::Var::x2: return "x2";
    case Expression::Var::y2: return "y2";
    case Expression::Var::t: return "t";
    case Expression::Var::absz: return "absz";
    case Expression::Var::re2: return "re2";
    case Expression::Var::abs2: return "abs2";
  }
  return "?";
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorCode::DomainError, std::string(what) + " produced a non-finite value");
  return v;
}

}  // namespace

double Expression::eval(const EvalContext& ctx) const {
  switch (kind) {
    case Kind::Number:
      return number;
    case Kind::Variable:
      switch (var) {
        case Var::x1: return ctx.z.c[0];
        case Var::y1: return ctx.z.c[1];
        case Var::x2:
          if (ctx.z.dim < 4) fail(ErrorCode::DomainError, "variable x2 used in an n=1 context");
          return ctx.z.c[2];
        case Var::y2:
          if (ctx.z.dim < 4) fail(ErrorCode::DomainError, "variable y2 used in an n=1 context");
          return ctx.z.c[3];
        case Var::t: return ctx.t;
        case Var::absz: return norm(ctx.z);
        case Var::re2: return ctx.z.c[0];
        case Var::abs2: return norm2(ctx.z);
      }
      return 0;
    case Kind::Negate:
      return -args[0]->eval(ctx);
    case Kind::Add:
      return args[0]->eval(ctx) + args[1]->eval(ctx);
    case Kind::Sub:
      return args[0]->eval(ctx) - args[1]->eval(ctx);
    case Kind::Mul:
      return args[0]->eval(ctx) * args[1]->eval(ctx);
    case Kind::Div: {
      const double d = args[1]->eval(ctx);
      if (d == 0.0) fail(ErrorCode::DomainError, "division by zero");
      return checked(args[0]->eval(ctx) / d, "division");
    }
    case Kind::Pow: {
      const double a = args[0]->eval(ctx);
      const double b = args[1]->eval(ctx);
      const double r = std::pow(a, b);
      if (!std::isfinite(r))
        fail(ErrorCode::DomainError, "pow(" + std::to_string(a) + ", " + std::to_string(b) + ") undefined");
      return r;
    }
    case Kind::Log: {
      const double a = args[0]->eval(ctx);
      if (a <= 0.0) fail(ErrorCode::DomainError, "log of non-positive value " + std::to_string(a));
      return std::log(a);
    }
    case Kind::Exp:
      return checked(std::exp(args[0]->eval(ctx)), "exp");
    case Kind::Max:
      return std::max(args[0]->eval(ctx), args[1]->eval(ctx));
  }
  fail(ErrorCode::InvalidArgument, "corrupt expression node");
}

void Expression::validate_dimension(int n) const {
  if (kind == Kind::Variable && n == 1 && (var == Var::x2 || var == Var::y2))
    fail(ErrorCode::ConfigError,
         std::string("variable ") + var_name(var) + " is not defined for an n=1 domain");
  for (const auto& a : args) a->validate_dimension(n);
}

std::string Expression::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Number: os << number; break;
    case Kind::Variable: os << var_name(var); break;
    case Kind::Negate: os << "(-" << args[0]->to_string() << ")"; break;
    case Kind::Add: os << "(" << args[0]->to_string() << "+" << args[1]->to_string() << ")"; break;
    case Kind::Sub: os << "(" << args[0]->to_string() << "-" << args[1]->to_string() << ")"; break;
    case Kind::Mul: os << "(" << args[0]->to_string() << "*" << args[1]->to_string() << ")"; break;
    case Kind::Div: os << "(" << args[0]->to_string() << "/" << args[1]->to_string() << ")"; break;
    case Kind::Pow: os << "(" << args[0]->to_string() << "^" << args[1]->to_string() << ")"; break;
    case Kind::Log: os << "log(" << args[0]->to_string() << ")"; break;
    case Kind::Exp: os << "exp(" << args[0]->to_string() << ")"; break;
    case Kind::Max:
      os << "max(" << args[0]->to_string() << "," << args[1]->to_string() << ")";
      break;
  }
  return os.str();
}

bool Expression::structurally_equal(const Expression& other) const {
  if (kind != other.kind || args.size() != other.args.size()) return false;
  if (kind == Kind::Number && number != other.number) return false;
  if (kind == Kind::Variable && var != other.var) return false;
  for (std::size_t i = 0; i < args.size(); ++i)
    if (!args[i]->structurally_equal(*other.args[i])) return false;
  return true;
}

ExprPtr Expression::substitute_time(const ExprPtr& replacement) const {
  if (kind == Kind::Variable)
    return var == Var::t ? replacement : expr_var(var);
  if (kind == Kind::Number) return expr_num(number);
  std::vector<ExprPtr> sub;
  sub.reserve(args.size());
  for (const auto& a : args) sub.push_back(a->substitute_time(replacement));
  return make(kind, std::move(sub));
}

bool Expression::depends_on_time() const {
  if (kind == Kind::Variable) return var == Var::t;
  for (const auto& a : args)
    if (a->depends_on_time()) return true;
  return false;
}

ExprPtr expr_num(double v) {
  auto e = std::make_shared<Expression>();
  e->kind = Expression::Kind::Number;
  e->number = v;
  return e;
}

ExprPtr expr_var(Expression::Var v) {
  auto e = std::make_shared<Expression>();
  e->kind = Expression::Kind::Variable;
  e->var = v;
  return e;
}

ExprPtr expr_neg(ExprPtr a) { return make(Expression::Kind::Negate, {std::move(a)}); }
ExprPtr expr_add(ExprPtr a, ExprPtr b) { return make(Expression::Kind::Add, {std::move(a), std::move(b)}); }
ExprPtr expr_sub(ExprPtr a, ExprPtr b) { return make(Expression::Kind::Sub, {std::move(a), std::move(b)}); }
ExprPtr expr_mul(ExprPtr a, ExprPtr b) { return make(Expression::Kind::Mul, {std::move(a), std::move(b)}); }
ExprPtr expr_div(ExprPtr a, ExprPtr b) { return make(Expression::Kind::Div, {std::move(a), std::move(b)}); }
ExprPtr expr_pow(ExprPtr a, ExprPtr b) { return make(Expression::Kind::Pow, {std::move(a), std::move(b)}); }
ExprPtr expr_log(ExprPtr a) { return make(Expression::Kind::Log, {std::move(a)}); }
ExprPtr expr_exp(ExprPtr a) { return make(Expression::Kind::Exp, {std::move(a)}); }
ExprPtr expr_max(ExprPtr a, ExprPtr b) { return make(Expression::Kind::Max, {std::move(a), std::move(b)}); }

namespace {

// Hand-rolled recursive-descent parser.  Column numbers are 1-based and refer
// to the position in the original string, which makes config error messages
// directly actionable.
class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  ExprPtr run() {
    skip_ws();
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ < s_.size()) err("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void err(const std::string& msg) const {
    fail(ErrorCode::ParseError, msg + " at column " + std::to_string(pos_ + 1));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    for (;;) {
      if (eat('+'))
        e = expr_add(e, parse_term());
      else if (eat('-'))
        e = expr_sub(e, parse_term());
      else
        return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (eat('*'))
        e = expr_mul(e, parse_unary());
      else if (eat('/'))
        e = expr_div(e, parse_unary());
      else
        return e;
    }
  }

  ExprPtr parse_unary() {
    if (eat('-')) return expr_neg(parse_unary());
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr e = parse_primary();
    while (eat('^')) e = expr_pow(e, parse_primary());
    return e;
  }

  ExprPtr parse_primary() {
    const char c = peek();
    if (c == '(') {
      eat('(');
      ExprPtr e = parse_expr();
      if (!eat(')')) err("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    err("expected expression");
  }

  ExprPtr parse_number() {
    skip_ws();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) err("malformed number");
    // strtod accepts inf/nan spellings via letters; those never reach here
    // because parse_primary routes alphabetic starts to parse_ident.
    pos_ += static_cast<std::size_t>(end - begin);
    return expr_num(v);
  }

  ExprPtr parse_ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "x1") return expr_var(Expression::Var::x1);
    if (name == "y1") return expr_var(Expression::Var::y1);
    if (name == "x2") return expr_var(Expression::Var::x2);
    if (name == "y2") return expr_var(Expression::Var::y2);
    if (name == "t") return expr_var(Expression::Var::t);
    if (name == "absz") return expr_var(Expression::Var::absz);
    if (name == "re2") return expr_var(Expression::Var::re2);
    if (name == "abs2") return expr_var(Expression::Var::abs2);
    if (name == "log" || name == "exp" || name == "max") {
      if (!eat('(')) err("expected '(' after function name '" + name + "'");
      std::vector<ExprPtr> args;
      args.push_back(parse_expr());
      while (eat(',')) args.push_back(parse_expr());
      if (!eat(')')) err("expected ')'");
      const std::size_t want = (name == "max") ? 2 : 1;
      if (args.size() != want) {
        pos_ = start;
        err("function '" + name + "' takes " + std::to_string(want) + " argument(s)");
      }
      if (name == "log") return expr_log(args[0]);
      if (name == "exp") return expr_exp(args[0]);
      return expr_max(args[0], args[1]);
    }
    pos_ = start;
    err("unknown identifier '" + name + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

ExprPtr parse_expression(const std::string& text) { return Parser(text).run(); }

}  // namespace pcma
