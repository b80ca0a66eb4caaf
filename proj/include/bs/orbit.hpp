#pragma once
// Closed orbits gamma_E of the principal symbol: focal points, Hamilton
// time parametrization, period, and the two branches xi_pm(x).

#include <vector>

#include "bs/symbol.hpp"

namespace bs {

class OrbitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FocalPoint {
  double x = 0.0;
  double xi = 0.0;
  enum class Side { right, left } side = Side::right;
};

struct OrbitSample {
  double t, x, xi, xdot, xidot;
};

struct Orbit {
  double E = 0.0;
  FocalPoint focal_right, focal_left;
  double period = 0.0;
  std::vector<OrbitSample> samples;  // uniform in t over one period, last point excluded

  double width() const { return focal_right.x - focal_left.x; }

  // Periodic trapezoid (= uniform Riemann sum) of F(x, xi) dt over one loop.
  template <class F>
  double loop_integral(F&& f) const {
    double acc = 0.0;
    for (const auto& s : samples) acc += f(s);
    return acc * period / double(samples.size());
  }

  // Shoelace area of the sample polygon, positive when the loop runs
  // anti-clockwise in the (xi, x) plane, i.e. along the Hamilton flow of
  // a well around a minimum.
  double signed_area() const;
};

// Solves {p0 = E, d_xi p0 = 0}: coarse scan over the well window, then
// Newton.  Exactly two roots are required (convex orbit).
std::pair<FocalPoint, FocalPoint> find_focal_points(const SymbolFamily& sym, double E);

// Integrates Hamilton's equations around one loop, detects the period on
// a Poincare section through the start point, then resamples uniformly
// in t; the sample count doubles from 256 until the action quadrature is
// self-consistent to `tol` (relative).
Orbit integrate_orbit(const SymbolFamily& sym, double E, double tol = 1e-11);

// xi on the requested branch at x strictly inside (x'_E, x_E): the root
// of p0(x, .) = E whose d_xi p0 sign matches the branch sign.
double branch_xi(const SymbolFamily& sym, const Orbit& orbit, double x, int branch);

// Derivative of the branch function, d xi_rho / dx = -p0_x / p0_xi.
double branch_xi_prime(const SymbolFamily& sym, double x, double xi);

}  // namespace bs
