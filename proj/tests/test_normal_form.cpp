#include <cmath>
#include <random>

#include "bs/airy.hpp"
#include "bs/cheb.hpp"
#include "bs/normal_form.hpp"
#include "bs/numerics.hpp"
#include "doctest.h"

using namespace bs;

TEST_CASE("potential series validation") {
  CHECK_THROWS_AS(PotentialSeries::from_strings("x^2"), NormalFormError);  // not a simple zero
  CHECK_THROWS_AS(PotentialSeries::from_strings("2*x").validate(), NormalFormError);
  CHECK_NOTHROW(PotentialSeries::from_strings("x + 0.3*x^2").validate());
}

TEST_CASE("x0: identity reduction and quadrature oracle") {
  NormalForm airy(PotentialSeries::from_strings("x"));
  for (double t : {-0.6, -0.2, 0.1, 0.5}) {
    CHECK(airy.x0(t) == doctest::Approx(t).epsilon(1e-12));
  }
  CHECK(airy.x0_prime(0.0) == doctest::Approx(1.0).epsilon(1e-12));

  NormalForm nf(PotentialSeries::from_strings("x*(1+x)"), 0.6);
  CHECK(nf.x0(0.1) == doctest::Approx(0.10195607293641347).epsilon(1e-10));
  CHECK(nf.x0(-0.15) == doctest::Approx(-0.1453353860180476).epsilon(1e-10));
  CHECK(nf.x0_prime(0.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("(3.5) residual on the grid") {
  NormalForm nf(PotentialSeries::from_strings("x + 0.3*x^2"));
  for (double t : cheb_nodes(41, -0.75, 0.75)) {
    double v = nf.x0(t), p = nf.x0_prime(t);
    CHECK(std::abs(v * p * p - (t + 0.3 * t * t)) < 1e-9);
  }
}

TEST_CASE("x1 closed forms") {
  {
    NormalForm nf(PotentialSeries::from_strings("x", "1"));
    for (double t : {-0.5, -0.05, 0.04, 0.3, 0.7})
      CHECK(nf.x1(t) == doctest::Approx(1.0).epsilon(1e-10));
  }
  {
    NormalForm nf(PotentialSeries::from_strings("x", "x"));
    for (double t : {-0.5, -0.05, 0.04, 0.3, 0.7})
      CHECK(nf.x1(t) == doctest::Approx(t / 3.0).epsilon(1e-10));
  }
  {
    NormalForm nf(PotentialSeries::from_strings("x + 0.2*x^2"));
    for (double t : {-0.4, 0.35}) CHECK(nf.x1(t) == doctest::Approx(0.0));
  }
}

TEST_CASE("x2 Taylor value at the turning point") {
  // x2(0) = (3/7) v3 - (9/35) v2^2 for Q0 = x + v2 x^2 + v3 x^3, Q1 = Q2 = 0
  std::mt19937 rng(20240809);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    double v2 = u(rng), v3 = u(rng);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "x + %.17g*x^2 + %.17g*x^3", v2, v3);
    auto ts = transport_series(PotentialSeries::from_strings(buf), 10);
    double expected = 3.0 / 7.0 * v3 - 9.0 / 35.0 * v2 * v2;
    CHECK(ts.x[2][0] == doctest::Approx(expected).epsilon(1e-10));
  }
  // pure Airy reduces to itself
  NormalForm airy(PotentialSeries::from_strings("x"));
  for (double t : {-0.5, 0.0, 0.4}) CHECK(std::abs(airy.x2(t)) < 1e-10);
}

TEST_CASE("odd coefficients vanish for even-free potentials") {
  NormalForm nf(PotentialSeries::from_strings("x + 0.25*x^2"));
  for (double t : cheb_nodes(31, -0.7, 0.7)) {
    CHECK(std::abs(nf.x1(t)) < 1e-12);
    CHECK(std::abs(nf.x3(t)) < 1e-12);
  }
  NormalForm airy(PotentialSeries::from_strings("x"));
  // x4 of the identity reduction is zero up to grid-pipeline noise
  for (double t : {-0.5, 0.2, 0.6}) CHECK(std::abs(airy.x4(t)) < 1e-8);
}

TEST_CASE("x4 stable under grid refinement") {
  PotentialSeries ps = PotentialSeries::from_strings("x + 0.25*x^2");
  NormalForm coarse(ps, 0.8, 129), fine(ps, 0.8, 193);
  double a = coarse.x4(0.01), b = fine.x4(0.01);
  CHECK(std::isfinite(a));
  CHECK(a == doctest::Approx(b).epsilon(1e-6));
  for (double t : {-0.4, 0.3})
    CHECK(coarse.x4(t) == doctest::Approx(fine.x4(t)).epsilon(1e-6));
}

TEST_CASE("master equation residual slope") {
  auto rep = master_residual(PotentialSeries::from_strings("x + 0.3*x^2"), {1e2, 1e3, 1e4});
  CHECK(rep.slope <= -4.8);
  CHECK(rep.residual[0] > rep.residual[2]);
}

TEST_CASE("transformed solution: identity case and qualitative shape") {
  NormalForm airy(PotentialSeries::from_strings("x"));
  double h = 0.05;
  for (double t : {-0.6, -0.3, 0.2, 0.5}) {
    double expect = airy_ai(t * std::pow(h, -2.0 / 3.0));
    CHECK(airy.transformed_solution(t, h).real() == doctest::Approx(expect).epsilon(1e-10));
  }

  NormalForm nf(PotentialSeries::from_strings("x + 0.3*x^2"));
  // decay on the forbidden side
  CHECK(std::abs(nf.transformed_solution(0.6, h).real()) <
        std::abs(nf.transformed_solution(0.25, h).real()));
  // oscillation on the allowed side: sign changes
  int flips = 0;
  double prev = nf.transformed_solution(-0.7, h).real();
  for (double t = -0.68; t < -0.1; t += 0.02) {
    double cur = nf.transformed_solution(t, h).real();
    if (prev * cur < 0) ++flips;
    prev = cur;
  }
  CHECK(flips >= 2);
  CHECK_THROWS(nf.transformed_solution(1.5, h));
}

TEST_CASE("transformed solution ODE residual order") {
  NormalForm nf(PotentialSeries::from_strings("x + 0.3*x^2"));
  std::vector<double> hs{0.1, 0.05, 0.025}, lr, lh;
  for (double h : hs) {
    double worst = 0.0, scale = 0.0;
    for (double t : cheb_nodes(41, -0.6, 0.6)) {
      worst = std::max(worst, std::abs(nf.ode_residual(t, h)));
      scale = std::max(scale, std::abs(nf.transformed_solution(t, h).real()));
    }
    lr.push_back(std::log(worst / scale));
    lh.push_back(std::log(h));
  }
  CHECK(fit_slope(lh, lr) >= 4.5);
}

TEST_CASE("ansatz check: exact Airy connection and h-trend") {
  // small h keeps the first omitted asymptotic term (u5 zeta^-5) below
  // the 1e-8 phase bar across the fit window
  auto exact = ansatz_check(PotentialSeries::from_strings("x"), {0.002});
  CHECK(std::abs(exact.entries[0].phase_error) < 1e-8);

  auto rep = ansatz_check(PotentialSeries::from_strings("x + 0.3*x^2"), {0.1, 0.05, 0.025});
  REQUIRE(rep.entries.size() == 3);
  CHECK(std::abs(rep.entries[1].phase_error) < std::abs(rep.entries[0].phase_error));
  CHECK(std::abs(rep.entries[2].phase_error) < std::abs(rep.entries[1].phase_error));
  // the 5/48 amplitude term pays for itself at h = 0.05
  CHECK(rep.entries[1].residual_bare >= 10.0 * rep.entries[1].residual_full);
}
