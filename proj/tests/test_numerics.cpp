#include <cmath>

#include "bs/numerics.hpp"
#include "doctest.h"

using namespace bs;

TEST_CASE("adaptive quadrature") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) == doctest::Approx(2.0));
  // sharp but smooth peak
  double v = integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, 1e-12, 1e-14);
  double exact = 2.0 * std::atan(1.0 / 1e-2) / 1e-2;
  CHECK(v == doctest::Approx(exact).epsilon(1e-11));
}

TEST_CASE("gauss legendre") {
  double v = gauss_legendre([](double x) { return x * x * x * x; }, -1.0, 1.0, 16);
  CHECK(v == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("sqrt endpoint substitution") {
  // int_0^1 1/sqrt(x) dx = 2
  double v = integrate_sqrt_endpoint([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 0.0);
  CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
  // int_{-1}^{1} 1/sqrt(1-x^2) dx = pi, singular at both ends
  double w = integrate_sqrt_both([](double x) { return 1.0 / std::sqrt(1.0 - x * x); }, -1.0, 1.0);
  CHECK(w == doctest::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("roots") {
  double r = brent_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0);
  CHECK(std::cos(r) - r == doctest::Approx(0.0).epsilon(1e-13));
  CHECK_THROWS_AS(brent_root([](double x) { return 1.0 + x * x; }, 0.0, 1.0), NumericsError);
}

TEST_CASE("d_dE") {
  CHECK(d_dE([](double e) { return e * e; }, 3.0, 2) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(d_dE([](double) { return 42.0; }, 1.0, 1) == doctest::Approx(0.0));
  CHECK(d_dE([](double e) { return std::sin(e); }, 0.4, 1) ==
        doctest::Approx(std::cos(0.4)).epsilon(1e-11));
  CHECK_THROWS(d_dE([](double) { return 1.0; }, 0.0, 3));
}

TEST_CASE("finite part strips known singular powers") {
  // f(d) = 3 d^{-3/2} - 2 d^{-1/2} + 0.7 + 5 d^{1/2} + d
  auto f = [](double d) {
    return 3.0 * std::pow(d, -1.5) - 2.0 / std::sqrt(d) + 0.7 + 5.0 * std::sqrt(d) + d;
  };
  double fp = finite_part(f, 0.02, 0.5, focal_exponents());
  CHECK(fp == doctest::Approx(0.7).epsilon(1e-7));
}

TEST_CASE("slope fit") {
  std::vector<double> x{0, 1, 2}, y{1, 3, 5};
  CHECK(fit_slope(x, y) == doctest::Approx(2.0));
}
