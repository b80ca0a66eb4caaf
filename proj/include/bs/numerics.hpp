#pragma once
// Shared numerical kernels: adaptive Gauss-Kronrod quadrature, fixed
// Gauss-Legendre rules, endpoint sqrt-substitution helpers, bracketed
// root finding, Richardson-extrapolated derivatives, and finite-part
// extraction against a ladder of known singular exponents.

#include <functional>
#include <stdexcept>
#include <vector>

namespace bs {

class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Fn1 = std::function<double(double)>;

// Adaptive Gauss-Kronrod 15(7) on [a, b].  Tolerances combine as
// |I - Q| <= max(abs_tol, rel_tol*|Q|).
double integrate(const Fn1& f, double a, double b, double rel_tol = 1e-12,
                 double abs_tol = 1e-14, int max_depth = 48);

// Fixed-order Gauss-Legendre rule (nodes computed once per order).
double gauss_legendre(const Fn1& f, double a, double b, int n);
void gauss_legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w);

// Integral of f over [a, b] where f has an integrable inverse-sqrt type
// endpoint singularity at `sing` (= a or b).  Substitutes the distance
// to the singular endpoint by s^2, which makes sqrt-type behaviour
// smooth, then integrates adaptively in s.
double integrate_sqrt_endpoint(const Fn1& f, double a, double b, double sing,
                               double rel_tol = 1e-12, double abs_tol = 1e-14);

// Both endpoints singular: split at the midpoint and substitute on each half.
double integrate_sqrt_both(const Fn1& f, double a, double b, double rel_tol = 1e-12,
                           double abs_tol = 1e-14);

// Brent-style bracketed root of f on [a, b] (f(a), f(b) of opposite sign).
double brent_root(const Fn1& f, double a, double b, double tol = 1e-14, int max_iter = 200);

// Newton with bisection fallback inside a bracket.
double newton_root(const Fn1& f, const Fn1& df, double x0, double lo, double hi,
                   double tol = 1e-13, int max_iter = 60);

// Central-difference d/dE per the project convention: order 1 uses step
// delta = 1e-3*max(1,|E|) plus one Richardson level; order 2 uses the
// 5-point second difference at a wider step (2.5e-2 scale) with one
// Richardson level, which is where noise from quadrature floors out.
double d_dE(const Fn1& f, double E, int order);

// Finite part of f(delta) ~ c0 + sum_k c_k delta^{e_k} as delta -> 0,
// where the singular/vanishing exponents e_k are known in advance
// (half-integers around simple turning points plus integer regular
// terms).  Sequential Richardson-type elimination over a geometric
// ladder delta_i = delta0 * ratio^i; returns the delta^0 coefficient.
double finite_part(const Fn1& f, double delta0, double ratio,
                   const std::vector<double>& exponents);

// Exponent family for a simple focal point: delta^{-3/2} ... delta^2.
const std::vector<double>& focal_exponents();

// Least-squares slope of y against x (used for log-log order fits).
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bs
