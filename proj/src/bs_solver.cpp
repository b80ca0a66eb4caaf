#include "bs/bs_solver.hpp"

#include <algorithm>
#include <cmath>

#include "bs/numerics.hpp"

namespace bs {

namespace {

constexpr double kResidualTol = 1e-12;

struct Grid {
  std::vector<double> E, S;
};

// Safeguarded Newton on an increasing function, bisection fallback.
double polish_root(const Fn1& f, const Fn1& slope, double target, double lo, double hi,
                   double guess) {
  double x = std::clamp(guess, lo, hi);
  for (int it = 0; it < 60; ++it) {
    double fx = f(x) - target;
    if (std::abs(fx) < kResidualTol * std::max(1.0, std::abs(target))) return x;
    if (fx > 0)
      hi = x;
    else
      lo = x;
    double d = slope(x);
    double xn = (d > 0) ? x - fx / d : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) < 1e-16 * std::max(1.0, std::abs(x))) return xn;
    x = xn;
  }
  return x;
}

}  // namespace

QuantizationResult quantize(const ActionEngine& engine, double h, double E_lo, double E_hi,
                            int node_hint) {
  if (!(h > 0)) throw SolverError("quantize: h must be positive");
  if (E_hi < E_lo) throw SolverError("quantize: empty interval");
  QuantizationResult res;
  res.h = h;
  res.E_lo = E_lo;
  res.E_hi = E_hi;

  auto Sh = [&](double E) { return engine.spectral_action(E, h); };
  const double two_pi_h = 2.0 * M_PI * h;

  if (E_lo == E_hi) {
    double s = Sh(E_lo);
    long n = std::lround(s / two_pi_h);
    double r = s - n * two_pi_h;
    if (std::abs(r) < 1e-10) res.entries.push_back({n, E_lo, r});
    return res;
  }

  double s_lo = Sh(E_lo), s_hi = Sh(E_hi);
  if (!(s_hi > s_lo))
    throw SolverError("quantize: S_h not increasing across the interval endpoints");

  int nodes = node_hint;
  if (nodes <= 0) {
    double est_roots = (s_hi - s_lo) / two_pi_h;
    nodes = static_cast<int>(std::clamp(2.0 * est_roots + 9.0, 33.0, 257.0));
  }

  Grid g;
  g.E.resize(static_cast<size_t>(nodes));
  g.S.resize(static_cast<size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    double E = E_lo + (E_hi - E_lo) * i / (nodes - 1);
    g.E[static_cast<size_t>(i)] = E;
    g.S[static_cast<size_t>(i)] = Sh(E);
  }
  for (size_t i = 0; i + 1 < g.S.size(); ++i)
    if (!(g.S[i + 1] > g.S[i]))
      throw SolverError("quantize: S_h not strictly increasing on [" + std::to_string(g.E[i]) +
                        ", " + std::to_string(g.E[i + 1]) + "]");

  // period from the cached orbit dominates the slope of S_h
  auto slope = [&](double E) { return engine.period(E); };

  const double edge_tol = 1e-9 * std::max(1.0, std::abs(s_hi));
  long n_min = static_cast<long>(std::ceil((s_lo - edge_tol) / two_pi_h));
  long n_max = static_cast<long>(std::floor((s_hi + edge_tol) / two_pi_h));
  for (long n = n_min; n <= n_max; ++n) {
    double target = n * two_pi_h;
    // bracket from the grid
    size_t k = static_cast<size_t>(
        std::lower_bound(g.S.begin(), g.S.end(), target) - g.S.begin());
    double lo, hi, guess;
    if (k == 0) {
      lo = g.E.front();
      hi = g.E[1];
      guess = lo;
    } else if (k >= g.S.size()) {
      lo = g.E[g.E.size() - 2];
      hi = g.E.back();
      guess = hi;
    } else {
      lo = g.E[k - 1];
      hi = g.E[k];
      guess = lo + (hi - lo) * (target - g.S[k - 1]) / (g.S[k] - g.S[k - 1]);
    }
    double E = polish_root(Sh, slope, target, lo, hi, guess);
    E = std::clamp(E, E_lo, E_hi);
    double residual = Sh(E) - target;
    if (std::abs(residual) > 1e-10) continue;  // target fell just outside the interval
    res.entries.push_back({n, E, residual});
  }
  std::sort(res.entries.begin(), res.entries.end(),
            [](const QuantizationEntry& a, const QuantizationEntry& b) { return a.E < b.E; });
  return res;
}

double gram_det(const WkbEngine& engine, double E, double h) {
  double phi = engine.a_pm_difference(E, h);
  double c = std::cos(phi / (2.0 * h));
  return -c * c;
}

std::vector<GramRoot> gram_zero_scan(const WkbEngine& engine, double h, double E_lo, double E_hi,
                                     int node_hint) {
  if (!(h > 0)) throw SolverError("gram_zero_scan: h must be positive");
  if (E_hi < E_lo) throw SolverError("gram_zero_scan: empty interval");
  std::vector<GramRoot> roots;

  // det G is even in the phase, so a loop the Hamilton flow traverses
  // the other way round (orbits around a maximum, e.g. harper) can be
  // scanned on the negated phase without changing the root set.
  double raw_lo = engine.a_pm_difference(E_lo, h);
  double raw_hi = E_lo == E_hi ? raw_lo : engine.a_pm_difference(E_hi, h);
  double sign = (E_lo != E_hi && raw_hi < raw_lo) ? -1.0 : 1.0;
  auto phi = [&, sign](double E) { return sign * engine.a_pm_difference(E, h); };
  const double pi_h = M_PI * h;

  double p_lo = sign * raw_lo, p_hi = sign * raw_hi;
  if (E_lo == E_hi) {
    long n = std::lround((p_lo / pi_h - 1.0) / 2.0);
    if (std::abs(p_lo - (2 * n + 1) * pi_h) < 1e-10)
      roots.push_back({n, E_lo, gram_det(engine, E_lo, h)});
    return roots;
  }
  if (!(p_hi > p_lo))
    throw SolverError("gram_zero_scan: phase not increasing across the interval");

  int nodes = node_hint;
  if (nodes <= 0) {
    double est = (p_hi - p_lo) / (2.0 * pi_h);
    nodes = static_cast<int>(std::clamp(2.0 * est + 9.0, 33.0, 257.0));
  }
  std::vector<double> Eg(static_cast<size_t>(nodes)), Pg(static_cast<size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    Eg[static_cast<size_t>(i)] = E_lo + (E_hi - E_lo) * i / (nodes - 1);
    Pg[static_cast<size_t>(i)] = phi(Eg[static_cast<size_t>(i)]);
  }
  for (size_t i = 0; i + 1 < Pg.size(); ++i)
    if (!(Pg[i + 1] > Pg[i]))
      throw SolverError("gram_zero_scan: phase not strictly increasing on [" +
                        std::to_string(Eg[i]) + ", " + std::to_string(Eg[i + 1]) + "]");

  auto slope = [&](double E) { return engine.actions().period(E); };
  const double edge_tol = 1e-9 * std::max(1.0, std::abs(p_hi));
  long n_min = static_cast<long>(std::ceil(((p_lo - edge_tol) / pi_h - 1.0) / 2.0));
  long n_max = static_cast<long>(std::floor(((p_hi + edge_tol) / pi_h - 1.0) / 2.0));
  for (long n = n_min; n <= n_max; ++n) {
    double target = (2 * n + 1) * pi_h;
    size_t k =
        static_cast<size_t>(std::lower_bound(Pg.begin(), Pg.end(), target) - Pg.begin());
    double lo, hi, guess;
    if (k == 0) {
      lo = Eg.front();
      hi = Eg[1];
      guess = lo;
    } else if (k >= Pg.size()) {
      lo = Eg[Eg.size() - 2];
      hi = Eg.back();
      guess = hi;
    } else {
      lo = Eg[k - 1];
      hi = Eg[k];
      guess = lo + (hi - lo) * (target - Pg[k - 1]) / (Pg[k] - Pg[k - 1]);
    }
    double E = polish_root(phi, slope, target, lo, hi, guess);
    E = std::clamp(E, E_lo, E_hi);
    // Accept either a small residual or a confirmed sign change; the
    // branch-integral phase carries finite-part extraction noise at
    // degenerate folds, so pure residual gating would drop real roots.
    double resid = std::abs(phi(E) - target);
    bool ok = resid <= 1e-10;
    if (!ok) {
      // probe on the scale the residual suggests so the phase swing
      // clears the extraction noise
      double sl = std::max(slope(E), 1e-6);
      double eps = std::max(1e-7 * std::max(1.0, std::abs(E)), 4.0 * resid / sl);
      double a = std::max(E_lo, E - eps), b2 = std::min(E_hi, E + eps);
      if (b2 > a) ok = (phi(a) - target) * (phi(b2) - target) <= 0.0;
    }
    if (!ok) continue;
    roots.push_back({n, E, gram_det(engine, E, h)});
  }
  std::sort(roots.begin(), roots.end(),
            [](const GramRoot& a, const GramRoot& b) { return a.E < b.E; });
  return roots;
}

}  // namespace bs
