#include <cmath>

#include "bs/expr.hpp"
#include "doctest.h"

using namespace bs;

TEST_CASE("expression values") {
  auto e = parse_expression("xi^2 + x^2");
  CHECK(expr_eval(e, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(expr_eval(e, 3.0, 4.0) == doctest::Approx(25.0));

  auto h = parse_expression("cos(xi) + cos(x)");
  CHECK(expr_eval(h, 0.0, 0.0) == doctest::Approx(2.0));

  auto f = parse_expression("2*exp(-x) + sin(x)/2 - 1.5");
  double x = 0.7;
  CHECK(expr_eval(f, x, 0.0) ==
        doctest::Approx(2 * std::exp(-x) + std::sin(x) / 2 - 1.5).epsilon(1e-14));

  // precedence and unary minus
  CHECK(expr_eval(parse_expression("-x^2"), 2.0, 0.0) == doctest::Approx(-4.0));
  CHECK(expr_eval(parse_expression("2^3^2"), 0.0, 0.0) == doctest::Approx(512.0));
  CHECK(expr_eval(parse_expression("1 - 2 - 3"), 0.0, 0.0) == doctest::Approx(-4.0));
}

TEST_CASE("expression jet derivatives") {
  using Jet = Series<double, 4>;
  auto e = parse_expression("x^4 + 2*x");
  Jet r = expr_eval(e, Jet::variable(1.5), Jet::constant(0.0));
  CHECK(r.c[0] == doctest::Approx(std::pow(1.5, 4) + 3.0));
  CHECK(r.c[1] == doctest::Approx(4 * std::pow(1.5, 3) + 2));   // f'
  CHECK(r.c[2] * 2 == doctest::Approx(12 * 1.5 * 1.5));         // f''
  CHECK(r.c[3] * 6 == doctest::Approx(24 * 1.5));               // f'''
  CHECK(r.c[4] * 24 == doctest::Approx(24.0));                  // f''''

  auto g = parse_expression("cos(x)");
  Jet rg = expr_eval(g, Jet::variable(0.3), Jet::constant(0.0));
  CHECK(rg.c[1] == doctest::Approx(-std::sin(0.3)).epsilon(1e-14));
  CHECK(rg.c[4] * 24 == doctest::Approx(std::cos(0.3)).epsilon(1e-14));
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_expression("x +"), ParseError);
  CHECK_THROWS_AS(parse_expression("foo(x)"), ParseError);
  CHECK_THROWS_AS(parse_expression("(x"), ParseError);
  CHECK_THROWS_AS(parse_expression("x 2"), ParseError);
}

TEST_CASE("dependency scan") {
  CHECK(expr_depends_on_xi(parse_expression("xi*x")));
  CHECK_FALSE(expr_depends_on_xi(parse_expression("x^2 + 1")));
  CHECK(expr_depends_on_x(parse_expression("x^2 + 1")));
}
