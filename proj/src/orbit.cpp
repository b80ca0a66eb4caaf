#include "bs/orbit.hpp"

#include <algorithm>
#include <cmath>

#include "bs/numerics.hpp"
#include "bs/ode.hpp"

namespace bs {

namespace {

constexpr double kTolRoot = 1e-12;
constexpr double kTolEnergy = 1e-9;
constexpr double kTolClosure = 1e-9;

double dxi_p0(const SymbolFamily& sym, double x, double xi) {
  double px, pxi;
  sym.grad_p0(x, xi, px, pxi);
  return pxi;
}

// Roots of d_xi p0(x, .) inside the xi scan window (bisection per sign
// change; robust for odd-multiplicity roots like the quartic kinetic term).
std::vector<double> xi_stationary(const SymbolFamily& sym, double x, double span) {
  std::vector<double> roots;
  const int n = 96;
  double prev = dxi_p0(sym, x, -span);
  for (int i = 1; i <= n; ++i) {
    double xi = -span + 2.0 * span * i / n;
    double cur = dxi_p0(sym, x, xi);
    if (prev == 0.0) roots.push_back(-span + 2.0 * span * (i - 1) / n);
    if (prev * cur < 0.0)
      roots.push_back(brent_root([&](double z) { return dxi_p0(sym, x, z); },
                                 -span + 2.0 * span * (i - 1) / n, xi, 1e-15));
    prev = cur;
  }
  return roots;
}

struct Candidate {
  double x, xi;
};

}  // namespace

std::pair<FocalPoint, FocalPoint> find_focal_points(const SymbolFamily& sym, double E) {
  const double lo = sym.well_lo, hi = sym.well_hi;
  const double span = std::max(4.0, 0.75 * (hi - lo));
  const int n = 600;

  // G(x) = p0(x, xi*(x)) - E along the stationary set closest to the well.
  auto g_at = [&](double x, double& xi_star) -> double {
    auto roots = xi_stationary(sym, x, span);
    if (roots.empty()) return std::nan("");
    // choose the root closest to the previous xi_star (continuation)
    double best = roots[0];
    for (double r : roots)
      if (std::abs(r - xi_star) < std::abs(best - xi_star)) best = r;
    xi_star = best;
    return sym.eval(0, x, best) - E;
  };

  std::vector<Candidate> found;
  auto push_candidate = [&](double x, double xi) {
    for (const auto& c : found)
      if (std::abs(c.x - x) < 2.0 * (hi - lo) / n) return;
    found.push_back({x, xi});
  };

  double xi_star = 0.0;
  double gx_prev = g_at(lo, xi_star);
  double x_prev = lo;
  std::vector<double> gvals{gx_prev};
  for (int i = 1; i <= n; ++i) {
    double x = lo + (hi - lo) * i / n;
    double gx = g_at(x, xi_star);
    gvals.push_back(gx);
    if (gx == 0.0) {
      push_candidate(x, xi_star);  // scan node sits exactly on the root
    } else if (std::isfinite(gx_prev) && std::isfinite(gx) && gx_prev * gx < 0.0) {
      double seed = xi_star;
      double xr = brent_root(
          [&](double xx) {
            double s = seed;
            return g_at(xx, s);
          },
          x_prev, x, 1e-15);
      double s = seed;
      g_at(xr, s);
      push_candidate(xr, s);
    }
    gx_prev = gx;
    x_prev = x;
  }

  // Degenerate-input policy: E within 1e-8 of a critical value of p0
  // (an interior extremum of G) means the focal points collide.
  for (size_t i = 1; i + 1 < gvals.size(); ++i) {
    bool ext = (gvals[i] - gvals[i - 1]) * (gvals[i + 1] - gvals[i]) < 0.0;
    if (ext && std::abs(gvals[i]) < 1e-8 * (1.0 + std::abs(E)))
      throw OrbitError("energy within 1e-8 of a critical value of p0 (focal points collide)");
  }

  if (found.size() != 2)
    throw OrbitError("expected exactly 2 focal points in the well window, found " +
                     std::to_string(found.size()) + " (non-convex orbit?)");

  // Polish each candidate: 2-D Newton when the Jacobian is regular,
  // otherwise (pure turning points, xi* = 0 root of odd multiplicity)
  // 1-D refinement in x at frozen xi*.
  for (auto& c : found) {
    double pxx_xi = sym.partial(0, c.x, c.xi, 0, 2);
    if (std::abs(pxx_xi) > 1e-6) {
      for (int it = 0; it < 50; ++it) {
        double px, pxi;
        sym.grad_p0(c.x, c.xi, px, pxi);
        double f1 = sym.eval(0, c.x, c.xi) - E;
        double f2 = pxi;
        double j11 = px, j12 = pxi;
        double j21 = sym.partial(0, c.x, c.xi, 1, 1), j22 = sym.partial(0, c.x, c.xi, 0, 2);
        double det = j11 * j22 - j12 * j21;
        if (det == 0.0) throw OrbitError("singular Jacobian in focal-point Newton");
        double dx = (f1 * j22 - f2 * j12) / det;
        double dxi = (j11 * f2 - j21 * f1) / det;
        c.x -= dx;
        c.xi -= dxi;
        if (std::abs(f1) < kTolRoot && std::abs(f2) < kTolRoot) break;
        if (it == 49) throw OrbitError("focal-point Newton did not converge in 50 iterations");
      }
    } else {
      double w = (hi - lo) / n;
      c.x = brent_root([&](double xx) { return sym.eval(0, xx, c.xi) - E; }, c.x - w, c.x + w,
                       1e-15);
    }
    if (std::abs(sym.eval(0, c.x, c.xi) - E) > kTolRoot ||
        std::abs(dxi_p0(sym, c.x, c.xi)) > kTolRoot)
      throw OrbitError("focal point residual above tolerance");
  }

  FocalPoint right{found[0].x > found[1].x ? found[0].x : found[1].x, 0.0,
                   FocalPoint::Side::right};
  FocalPoint left{found[0].x > found[1].x ? found[1].x : found[0].x, 0.0, FocalPoint::Side::left};
  right.xi = found[0].x > found[1].x ? found[0].xi : found[1].xi;
  left.xi = found[0].x > found[1].x ? found[1].xi : found[0].xi;
  return {right, left};
}

namespace {

struct Flow {
  const SymbolFamily& sym;
  void operator()(double, const std::array<double, 2>& y, std::array<double, 2>& d) const {
    double px, pxi;
    sym.grad_p0(y[0], y[1], px, pxi);
    d[0] = pxi;
    d[1] = -px;
  }
};

// xi on the branch of p0(x, .) = E adjacent to xi_ref with the requested
// sign of d_xi p0 (branch = +1 upper in beta0, -1 lower).
double solve_branch_xi(const SymbolFamily& sym, double E, double x, double xi_ref, int branch,
                       double scale) {
  double u = 1e-4 * scale;
  double g0 = sym.eval(0, x, xi_ref) - E;
  if (std::abs(g0) < 1e-15 && branch * dxi_p0(sym, x, xi_ref) >= 0.0) return xi_ref;
  for (int k = 0; k < 60; ++k) {
    double xi_try = xi_ref + branch * u;
    double g = sym.eval(0, x, xi_try) - E;
    if (g0 * g < 0.0)
      return brent_root([&](double z) { return sym.eval(0, x, z) - E; },
                        branch > 0 ? xi_ref : xi_try, branch > 0 ? xi_try : xi_ref, 1e-15);
    u *= 1.6;
  }
  throw OrbitError("branch_xi: failed to bracket the requested branch");
}

}  // namespace

double Orbit::signed_area() const {
  double acc = 0.0;
  for (const auto& s : samples) acc += s.xi * s.xdot - s.x * s.xidot;
  return 0.5 * acc * period / double(samples.size());
}

Orbit integrate_orbit(const SymbolFamily& sym, double E, double tol) {
  auto [right, left] = find_focal_points(sym, E);
  Orbit orb;
  orb.E = E;
  orb.focal_right = right;
  orb.focal_left = left;

  const double width = right.x - left.x;
  const double delta = 1e-3 * width;
  const double x_start = right.x - delta;
  const double xi_start = solve_branch_xi(sym, E, x_start, right.xi, +1, 1.0 + std::abs(right.xi));
  const double x_mid = 0.5 * (right.x + left.x);

  using State = std::array<double, 2>;
  Flow flow{sym};
  auto rhs = [&](double t, const State& y, State& d) { flow(t, y, d); };

  // Hunt the period: time between the 1st and 3rd transversal crossing of
  // the section x = x_mid (directions alternate around a convex loop).
  Dopri5<2> ode(rhs, tol, tol);
  State y{x_start, xi_start};
  double t = 0.0;
  std::vector<std::pair<double, State>> crossings;  // refined (t, state)
  State y_prev = y;
  double t_prev = t;
  double t_budget = 1e6;
  while (crossings.size() < 3) {
    ode.step_once(t, y);
    if ((y_prev[0] - x_mid) * (y[0] - x_mid) < 0.0) {
      // refine the crossing time by Newton from the pre-step state
      double tau = t_prev + (t - t_prev) * (x_mid - y_prev[0]) / (y[0] - y_prev[0]);
      State yc = y_prev;
      double tc = t_prev;
      Dopri5<2> fine(rhs, tol, tol);
      for (int it = 0; it < 12; ++it) {
        fine.integrate_to(tc, yc, tau);
        State d;
        rhs(tc, yc, d);
        double corr = (yc[0] - x_mid) / d[0];
        tau -= corr;
        if (std::abs(corr) < 1e-15 * std::max(1.0, std::abs(tau))) break;
      }
      crossings.emplace_back(tau, yc);
      if (crossings.size() == 2)
        t_budget =
            crossings[1].first + 20.0 * (crossings[1].first - crossings[0].first);
    }
    if (t > t_budget)
      throw OrbitError("orbit failed to close within the time budget (10x period estimate)");
    y_prev = y;
    t_prev = t;
  }
  double period = crossings[2].first - crossings[0].first;
  orb.period = period;

  // Closure check at t = T from the start state.
  {
    Dopri5<2> check(rhs, tol, tol);
    State yc{x_start, xi_start};
    double tc = 0.0;
    check.integrate_to(tc, yc, period);
    if (std::abs(yc[0] - x_start) > kTolClosure || std::abs(yc[1] - xi_start) > kTolClosure)
      throw OrbitError("orbit does not close to tolerance at the detected period");
  }

  // Uniform resampling, doubling until the loop quadratures settle.
  auto resample = [&](int N) {
    std::vector<OrbitSample> s(static_cast<size_t>(N));
    Dopri5<2> run(rhs, tol, tol);
    State yy{x_start, xi_start};
    double tt = 0.0;
    for (int i = 0; i < N; ++i) {
      double target = period * i / N;
      run.integrate_to(tt, yy, target);
      State d;
      rhs(tt, yy, d);
      s[static_cast<size_t>(i)] = {tt, yy[0], yy[1], d[0], d[1]};
    }
    return s;
  };

  auto key_integrals = [&](const std::vector<OrbitSample>& s) {
    double s0 = 0.0, idelta = 0.0, igamma = 0.0;
    for (const auto& q : s) {
      s0 += q.xi * q.xdot;
      PartialTable p = sym.partials(0, q.x, q.xi);
      double dlt = p(2, 0) * p(0, 2) - p(1, 1) * p(1, 1);
      idelta += dlt;
      igamma += (p(2, 0) * p(0, 1) - p(1, 1) * p(1, 0)) * q.xdot +
                (p(1, 1) * p(0, 1) - p(0, 2) * p(1, 0)) * q.xidot;
    }
    double w = period / double(s.size());
    return std::array<double, 3>{s0 * w, idelta * w, igamma * w};
  };

  int N = 256;
  auto cur = resample(N);
  auto ref = key_integrals(cur);
  for (;;) {
    if (N >= 16384) break;
    auto next = resample(2 * N);
    auto nref = key_integrals(next);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k)
      worst = std::max(worst, std::abs(nref[k] - ref[k]) / std::max(1.0, std::abs(nref[k])));
    cur = std::move(next);
    ref = nref;
    N *= 2;
    if (worst < std::max(tol, 1e-12)) break;
  }
  orb.samples = std::move(cur);

  double drift = 0.0;
  for (const auto& s : orb.samples) drift = std::max(drift, std::abs(sym.eval(0, s.x, s.xi) - E));
  if (drift > kTolEnergy) throw OrbitError("energy drift along the orbit exceeds tolerance");

  return orb;
}

double branch_xi(const SymbolFamily& sym, const Orbit& orbit, double x, int branch) {
  if (!(x > orbit.focal_left.x && x < orbit.focal_right.x))
    throw OrbitError("branch_xi: x outside (x'_E, x_E)");
  // nearest sample on the requested branch as the Newton seed
  double best_d = 1e300, seed = 0.0;
  bool have = false;
  for (const auto& s : orbit.samples) {
    if (branch * s.xdot <= 0.0) continue;  // xdot = beta0 along the orbit
    double d = std::abs(s.x - x);
    if (d < best_d) {
      best_d = d;
      seed = s.xi;
      have = true;
    }
  }
  if (!have) throw OrbitError("branch_xi: no samples on requested branch");
  double xi = seed;
  for (int it = 0; it < 60; ++it) {
    double f = sym.eval(0, x, xi) - orbit.E;
    double d = dxi_p0(sym, x, xi);
    if (d == 0.0) break;
    double step = f / d;
    xi -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(xi)) && std::abs(f) < 1e-12) return xi;
  }
  double f = sym.eval(0, x, xi) - orbit.E;
  if (std::abs(f) < 1e-10 && branch * dxi_p0(sym, x, xi) > 0.0) return xi;
  return solve_branch_xi(sym, orbit.E, x, orbit.focal_right.xi, branch,
                         1.0 + std::abs(orbit.focal_right.xi));
}

double branch_xi_prime(const SymbolFamily& sym, double x, double xi) {
  double px, pxi;
  sym.grad_p0(x, xi, px, pxi);
  return -px / pxi;
}

}  // namespace bs
