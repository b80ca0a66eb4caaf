#include <cmath>
#include <random>

#include "bs/symbol.hpp"
#include "doctest.h"

using namespace bs;

TEST_CASE("eval basics") {
  auto harm = make_harmonic();
  CHECK(harm.eval(0, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(harm.eval(1, 0.3, 0.4) == 0.0);  // absent sub-principal symbol is zero

  auto harper = make_harper();
  CHECK(harper.eval(0, 0.0, 0.0) == doctest::Approx(2.0));

  CHECK_THROWS(harm.eval(3, 0.0, 0.0));
}

TEST_CASE("partial basics") {
  auto harm = make_harmonic();
  CHECK(harm.partial(0, 0.7, -0.2, 0, 2) == doctest::Approx(2.0));

  auto schr = make_schrodinger("x^4");
  double x = 0.83;
  CHECK(schr.partial(0, x, 0.1, 2, 0) == doctest::Approx(12 * x * x).epsilon(1e-13));

  auto harper = make_harper();
  CHECK(harper.partial(0, 0.0, 0.0, 0, 4) == doctest::Approx(1.0));

  CHECK_THROWS(harm.partial(0, 0.0, 0.0, 3, 2));
}

TEST_CASE("Delta identities") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);

  auto schr = make_schrodinger("x^4 + x^2");
  for (int i = 0; i < 25; ++i) {
    double x = u(rng), xi = u(rng);
    double delta = schr.partial(0, x, xi, 2, 0) * schr.partial(0, x, xi, 0, 2) -
                   std::pow(schr.partial(0, x, xi, 1, 1), 2);
    double vpp = 12 * x * x + 2;
    CHECK(delta == doctest::Approx(2 * vpp).epsilon(1e-12));
  }

  auto harper = make_harper();
  for (int i = 0; i < 25; ++i) {
    double x = u(rng), xi = u(rng);
    double delta = harper.partial(0, x, xi, 2, 0) * harper.partial(0, x, xi, 0, 2) -
                   std::pow(harper.partial(0, x, xi, 1, 1), 2);
    CHECK(delta == doctest::Approx(std::cos(x) * std::cos(xi)).epsilon(1e-12));
  }

  auto tilted = make_tilted("x", "x^2");
  for (int b = 3; b <= 4; ++b)
    CHECK(tilted.partial(0, u(rng), u(rng), 0, b) == doctest::Approx(0.0));
  CHECK(tilted.partial(0, u(rng), u(rng), 1, 3) == doctest::Approx(0.0));
}

TEST_CASE("fd consistency report") {
  auto rep = fd_consistency_report(make_harmonic(), 100);
  CHECK(rep.max_rel_mismatch < 1e-6);
  CHECK(rep.flagged.empty());

  auto rep2 = fd_consistency_report(make_harper(), 100);
  CHECK(rep2.max_rel_mismatch < 1e-6);

  // negative control: a deliberately wrong partial must be flagged
  auto bad = make_harmonic();
  bad.partial_override = [&](int j, double x, double xi, int a, int b) {
    double v = make_harmonic().partial(j, x, xi, a, b);
    if (j == 0 && a == 1 && b == 0) return v + 0.5;
    return v;
  };
  auto rep3 = fd_consistency_report(bad, 50);
  CHECK(rep3.max_rel_mismatch > 1e-2);
  CHECK_FALSE(rep3.flagged.empty());

  CHECK_THROWS(fd_consistency_report(make_harmonic(), 0));
}

TEST_CASE("catalog separable metadata") {
  auto t = make_tilted("x", "x^2");
  REQUIRE(t.separable.has_value());
  CHECK(expr_eval(t.separable->f, 0.7, 0.0) == doctest::Approx(0.7));

  auto q = make_quartic_kinetic("x^2");
  CHECK(q.eval(0, 0.0, 1.0) == doctest::Approx(1.0));

  auto withp1 = make_harmonic().with_p1("x");
  CHECK(withp1.eval(1, 0.4, 9.0) == doctest::Approx(0.4));
  REQUIRE(withp1.separable.has_value());

  auto withxi = make_harmonic().with_p1("xi");
  CHECK_FALSE(withxi.separable.has_value());  // not separable any more
}
