#pragma once
// Arithmetic expression grammar for symbols and potentials:
//   +, -, *, /, ^, cos, sin, exp, numeric literals, variables x and xi.
// Parsed once into a small AST; evaluation is templated on the scalar
// type so the same tree yields plain values, 1-D jets, or nested 2-D
// jets (exact partial derivatives).

#include <memory>
#include <stdexcept>
#include <string>

#include "bs/series.hpp"

namespace bs {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

enum class ExprOp { Num, VarX, VarXi, Neg, Add, Sub, Mul, Div, Pow, Cos, Sin, Exp };

struct ExprNode {
  ExprOp op;
  double value = 0.0;  // Num only
  Expr a, b;

  ExprNode(ExprOp o, Expr lhs, Expr rhs) : op(o), a(std::move(lhs)), b(std::move(rhs)) {}
  explicit ExprNode(double v) : op(ExprOp::Num), value(v) {}
  explicit ExprNode(ExprOp o) : op(o) {}
};

Expr parse_expression(const std::string& text);

Expr expr_num(double v);
Expr expr_var_x();
Expr expr_var_xi();
Expr expr_add(Expr a, Expr b);
Expr expr_sub(Expr a, Expr b);
Expr expr_mul(Expr a, Expr b);
Expr expr_pow(Expr a, Expr b);
Expr expr_call(ExprOp fn, Expr a);

bool expr_depends_on_xi(const Expr& e);
bool expr_depends_on_x(const Expr& e);
std::string expr_to_string(const Expr& e);

namespace detail {
inline bool is_integer(double v, long long& out) {
  if (std::abs(v) > 1e15) return false;
  long long n = static_cast<long long>(std::llround(v));
  if (std::abs(v - double(n)) < 1e-12) {
    out = n;
    return true;
  }
  return false;
}

inline double apply_pow(double base, double e) { return std::pow(base, e); }
template <class T, int N>
Series<T, N> apply_pow(const Series<T, N>& base, double e) {
  long long n;
  if (is_integer(e, n)) return powi(base, n);
  if (!(jet_value(base) > 0.0))
    throw std::domain_error("expression: non-integer power of non-positive base");
  return pow(base, e);
}
}  // namespace detail

template <class T>
T expr_eval(const Expr& e, const T& x, const T& xi) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  switch (e->op) {
    case ExprOp::Num: return T(e->value);
    case ExprOp::VarX: return x;
    case ExprOp::VarXi: return xi;
    case ExprOp::Neg: return -expr_eval(e->a, x, xi);
    case ExprOp::Add: return expr_eval(e->a, x, xi) + expr_eval(e->b, x, xi);
    case ExprOp::Sub: return expr_eval(e->a, x, xi) - expr_eval(e->b, x, xi);
    case ExprOp::Mul: return expr_eval(e->a, x, xi) * expr_eval(e->b, x, xi);
    case ExprOp::Div: return expr_eval(e->a, x, xi) / expr_eval(e->b, x, xi);
    case ExprOp::Pow: {
      if (e->b->op == ExprOp::Num) return detail::apply_pow(expr_eval(e->a, x, xi), e->b->value);
      // Non-constant exponent: a^b = exp(b log a).
      T base = expr_eval(e->a, x, xi);
      if (!(jet_value(base) > 0.0))
        throw std::domain_error("expression: variable exponent needs positive base");
      return exp(expr_eval(e->b, x, xi) * log(base));
    }
    case ExprOp::Cos: return cos(expr_eval(e->a, x, xi));
    case ExprOp::Sin: return sin(expr_eval(e->a, x, xi));
    case ExprOp::Exp: return exp(expr_eval(e->a, x, xi));
  }
  throw std::logic_error("expression: bad node");
}

inline double expr_eval(const Expr& e, double x, double xi) {
  return expr_eval<double>(e, x, xi);
}

}  // namespace bs
