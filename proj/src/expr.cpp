#include "bs/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace bs {

Expr expr_num(double v) { return std::make_shared<ExprNode>(v); }
Expr expr_var_x() { return std::make_shared<ExprNode>(ExprOp::VarX); }
Expr expr_var_xi() { return std::make_shared<ExprNode>(ExprOp::VarXi); }
Expr expr_add(Expr a, Expr b) { return std::make_shared<ExprNode>(ExprOp::Add, std::move(a), std::move(b)); }
Expr expr_sub(Expr a, Expr b) { return std::make_shared<ExprNode>(ExprOp::Sub, std::move(a), std::move(b)); }
Expr expr_mul(Expr a, Expr b) { return std::make_shared<ExprNode>(ExprOp::Mul, std::move(a), std::move(b)); }
Expr expr_pow(Expr a, Expr b) { return std::make_shared<ExprNode>(ExprOp::Pow, std::move(a), std::move(b)); }
Expr expr_call(ExprOp fn, Expr a) { return std::make_shared<ExprNode>(fn, std::move(a), nullptr); }

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : text_(s) {}

  Expr run() {
    Expr e = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  const std::string& text_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) {
    std::ostringstream os;
    os << "parse error at offset " << pos_ << " in '" << text_ << "': " << what;
    throw ParseError(os.str());
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      if (accept('+'))
        e = std::make_shared<ExprNode>(ExprOp::Add, e, term());
      else if (accept('-'))
        e = std::make_shared<ExprNode>(ExprOp::Sub, e, term());
      else
        return e;
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (accept('*'))
        e = std::make_shared<ExprNode>(ExprOp::Mul, e, factor());
      else if (accept('/'))
        e = std::make_shared<ExprNode>(ExprOp::Div, e, factor());
      else
        return e;
    }
  }

  // Right-associative '^', binding tighter than unary minus on the left
  // but looser on the exponent so that -x^2 == -(x^2) and x^-2 works.
  Expr factor() {
    if (accept('-')) return std::make_shared<ExprNode>(ExprOp::Neg, factor(), nullptr);
    Expr base = primary();
    if (accept('^')) return std::make_shared<ExprNode>(ExprOp::Pow, base, factor());
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident();
    if (accept('(')) {
      Expr e = expression();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    fail("unexpected character");
  }

  Expr number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("bad numeric literal");
    pos_ += static_cast<size_t>(end - begin);
    return expr_num(v);
  }

  Expr ident() {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (name == "x") return expr_var_x();
    if (name == "xi") return expr_var_xi();
    ExprOp fn;
    if (name == "cos")
      fn = ExprOp::Cos;
    else if (name == "sin")
      fn = ExprOp::Sin;
    else if (name == "exp")
      fn = ExprOp::Exp;
    else
      fail("unknown identifier '" + name + "'");
    if (!accept('(')) fail("expected '(' after function name");
    Expr arg = expression();
    if (!accept(')')) fail("expected ')'");
    return expr_call(fn, arg);
  }
};

void to_string_rec(const Expr& e, std::ostream& os) {
  switch (e->op) {
    case ExprOp::Num: os << e->value; return;
    case ExprOp::VarX: os << "x"; return;
    case ExprOp::VarXi: os << "xi"; return;
    case ExprOp::Neg:
      os << "(-";
      to_string_rec(e->a, os);
      os << ")";
      return;
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul:
    case ExprOp::Div:
    case ExprOp::Pow: {
      const char* sym = e->op == ExprOp::Add   ? "+"
                        : e->op == ExprOp::Sub ? "-"
                        : e->op == ExprOp::Mul ? "*"
                        : e->op == ExprOp::Div ? "/"
                                               : "^";
      os << "(";
      to_string_rec(e->a, os);
      os << sym;
      to_string_rec(e->b, os);
      os << ")";
      return;
    }
    case ExprOp::Cos:
    case ExprOp::Sin:
    case ExprOp::Exp: {
      os << (e->op == ExprOp::Cos ? "cos(" : e->op == ExprOp::Sin ? "sin(" : "exp(");
      to_string_rec(e->a, os);
      os << ")";
      return;
    }
  }
}

}  // namespace

Expr parse_expression(const std::string& text) { return Parser(text).run(); }

bool expr_depends_on_xi(const Expr& e) {
  if (!e) return false;
  if (e->op == ExprOp::VarXi) return true;
  return expr_depends_on_xi(e->a) || expr_depends_on_xi(e->b);
}

bool expr_depends_on_x(const Expr& e) {
  if (!e) return false;
  if (e->op == ExprOp::VarX) return true;
  return expr_depends_on_x(e->a) || expr_depends_on_x(e->b);
}

std::string expr_to_string(const Expr& e) {
  std::ostringstream os;
  to_string_rec(e, os);
  return os.str();
}

}  // namespace bs
