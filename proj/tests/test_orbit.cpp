#include <cmath>

#include "bs/numerics.hpp"
#include "bs/orbit.hpp"
#include "doctest.h"

using namespace bs;

TEST_CASE("focal points: harmonic") {
  auto [r, l] = find_focal_points(make_harmonic(), 1.0);
  CHECK(r.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l.x == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(r.xi) < 1e-12);
  CHECK(std::abs(l.xi) < 1e-12);
}

TEST_CASE("focal points: tilted ellipse") {
  // f(x)^2 = 4 (V(x) - E) with f = x, V = x^2, E = 1: x = +-2/sqrt(3), xi = -x/2
  auto sym = make_tilted("x", "x^2");
  auto [r, l] = find_focal_points(sym, 1.0);
  double xe = 2.0 / std::sqrt(3.0);
  CHECK(r.x == doctest::Approx(xe).epsilon(1e-12));
  CHECK(r.xi == doctest::Approx(-xe / 2).epsilon(1e-12));
  CHECK(l.x == doctest::Approx(-xe).epsilon(1e-12));
  CHECK(l.xi == doctest::Approx(xe / 2).epsilon(1e-12));
  CHECK(std::abs(sym.eval(0, r.x, r.xi) - 1.0) < 1e-12);
}

TEST_CASE("focal points: quartic well turning points") {
  auto [r, l] = find_focal_points(make_schrodinger("x^4"), 1.0);
  CHECK(r.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l.x == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("degenerate energy refused") {
  CHECK_THROWS_AS(find_focal_points(make_harmonic(), 1e-10), OrbitError);
}

TEST_CASE("harmonic orbit period is pi at any energy") {
  auto sym = make_harmonic();
  for (double E : {1.0, 4.0}) {
    Orbit orb = integrate_orbit(sym, E);
    CHECK(orb.period == doctest::Approx(M_PI).epsilon(1e-9));
    double drift = 0;
    for (auto& s : orb.samples) drift = std::max(drift, std::abs(sym.eval(0, s.x, s.xi) - E));
    CHECK(drift < 1e-9);
  }
}

TEST_CASE("tilted orbit period 2*pi/sqrt(3)") {
  Orbit orb = integrate_orbit(make_tilted("x", "x^2"), 1.0);
  CHECK(orb.period == doctest::Approx(2 * M_PI / std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("quartic well period against x-parametrized oracle") {
  Orbit orb = integrate_orbit(make_schrodinger("x^4"), 1.0);
  // T = 2 int_{-1}^{1} dx / (2 sqrt(1 - x^4)), inverse-sqrt singular ends
  double oracle = integrate_sqrt_both(
      [](double x) { return 1.0 / std::sqrt(1.0 - x * x * x * x); }, -1.0, 1.0, 1e-13, 1e-15);
  CHECK(orb.period == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("orbit flow direction and area") {
  // Anti-clockwise in the (xi, x) plane: shoelace area there is positive
  // for every built-in well around a minimum.
  for (auto sym : {make_harmonic(), make_schrodinger("x^4"), make_tilted("x", "x^2"),
                   make_quartic_kinetic("x^2")}) {
    Orbit orb = integrate_orbit(sym, 1.0);
    CHECK(orb.signed_area() > 0.0);
  }
}

TEST_CASE("branch functions") {
  auto sym = make_harmonic();
  Orbit orb = integrate_orbit(sym, 1.0);
  CHECK(branch_xi(sym, orb, 0.0, +1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(branch_xi(sym, orb, 0.0, -1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK_THROWS_AS(branch_xi(sym, orb, 1.5, +1), OrbitError);

  auto tilted = make_tilted("x", "x^2");
  Orbit torb = integrate_orbit(tilted, 1.0);
  CHECK(branch_xi(tilted, torb, 0.0, +1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(branch_xi(tilted, torb, 0.0, -1) == doctest::Approx(-1.0).epsilon(1e-12));

  auto quart = make_quartic_kinetic("x^2");
  Orbit qorb = integrate_orbit(quart, 1.0);
  CHECK(branch_xi(quart, qorb, 0.0, +1) == doctest::Approx(1.0).epsilon(1e-12));

  // branch_xi(+) >= branch_xi(-) strictly inside
  for (double x : {-0.9, -0.4, 0.1, 0.6, 0.95}) {
    CHECK(branch_xi(sym, orb, x, +1) > branch_xi(sym, orb, x, -1));
  }
}

TEST_CASE("orbit closes on itself") {
  Orbit orb = integrate_orbit(make_schrodinger("x^4 + 0.2*x^2"), 0.8);
  const auto& first = orb.samples.front();
  // the final sample is one step before closure; check energy there too
  const auto& last = orb.samples.back();
  CHECK(std::abs(orb.E - make_schrodinger("x^4 + 0.2*x^2").eval(0, last.x, last.xi)) < 1e-9);
  CHECK(first.t == doctest::Approx(0.0));
}
