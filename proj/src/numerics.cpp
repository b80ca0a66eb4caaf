#include "bs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace bs {

namespace {

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1] (QUADPACK dqk15).
const double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                        0.741531185599394, 0.586087235467691, 0.405845151377397,
                        0.207784955007898, 0.0};
const double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                        0.140653259715525, 0.169004726639267, 0.190350578064785,
                        0.204432940075298, 0.209482141084728};
const double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469};

struct GkResult {
  double kronrod;
  double err;
};

GkResult gk15(const Fn1& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    double x = h * kXgk[j];
    double f1 = f(c - x), f2 = f(c + x);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  return {resk * h, std::abs((resk - resg) * h)};
}

void adapt(const Fn1& f, double a, double b, double rel_tol, double abs_tol, int depth,
           int max_depth, double& acc, double scale_hint) {
  GkResult r = gk15(f, a, b);
  double tol = std::max(abs_tol, rel_tol * std::max(std::abs(r.kronrod), scale_hint));
  if (r.err <= tol || depth >= max_depth) {
    acc += r.kronrod;
    return;
  }
  double m = 0.5 * (a + b);
  adapt(f, a, m, rel_tol, abs_tol, depth + 1, max_depth, acc, scale_hint);
  adapt(f, m, b, rel_tol, abs_tol, depth + 1, max_depth, acc, scale_hint);
}

}  // namespace

double integrate(const Fn1& f, double a, double b, double rel_tol, double abs_tol,
                 int max_depth) {
  if (a == b) return 0.0;
  // First pass gives a magnitude estimate that the per-panel relative
  // test is measured against, so thin spikes do not stall the recursion.
  GkResult whole = gk15(f, a, b);
  double acc = 0.0;
  adapt(f, a, b, rel_tol, abs_tol, 0, max_depth, acc, std::abs(whole.kronrod));
  return acc;
}

void gauss_legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) {
    std::vector<double> xs(n), ws(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      // Chebyshev initial guess, Newton on P_n.
      double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it2 = 0; it2 < 100; ++it2) {
        double p0 = 1.0, p1 = 0.0;
        for (int k = 0; k < n; ++k) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * k + 1.0) * t * p1 - k * p2) / (k + 1.0);
        }
        double dp = n * (t * p0 - p1) / (t * t - 1.0);
        double dt = p0 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-16) break;
      }
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * t * p1 - k * p2) / (k + 1.0);
      }
      double dp = n * (t * p0 - p1) / (t * t - 1.0);
      xs[i] = -t;
      xs[n - 1 - i] = t;
      ws[i] = ws[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    it = cache.emplace(n, std::make_pair(std::move(xs), std::move(ws))).first;
  }
  x = it->second.first;
  w = it->second.second;
}

double gauss_legendre(const Fn1& f, double a, double b, int n) {
  std::vector<double> x, w;
  gauss_legendre_nodes(n, x, w);
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += w[i] * f(c + h * x[i]);
  return acc * h;
}

double integrate_sqrt_endpoint(const Fn1& f, double a, double b, double sing, double rel_tol,
                               double abs_tol) {
  if (a == b) return 0.0;
  if (sing == a) {
    double L = b - a;
    double s_max = std::sqrt(std::abs(L));
    double sgn = L >= 0 ? 1.0 : -1.0;
    return integrate([&](double s) { return 2.0 * s * f(a + sgn * s * s); }, 0.0, s_max, rel_tol,
                     abs_tol) *
           sgn;
  }
  if (sing == b) {
    double L = b - a;
    double s_max = std::sqrt(std::abs(L));
    double sgn = L >= 0 ? 1.0 : -1.0;
    return integrate([&](double s) { return 2.0 * s * f(b - sgn * s * s); }, 0.0, s_max, rel_tol,
                     abs_tol) *
           sgn;
  }
  throw NumericsError("integrate_sqrt_endpoint: singular point must be an endpoint");
}

double integrate_sqrt_both(const Fn1& f, double a, double b, double rel_tol, double abs_tol) {
  double m = 0.5 * (a + b);
  return integrate_sqrt_endpoint(f, a, m, a, rel_tol, abs_tol) +
         integrate_sqrt_endpoint(f, m, b, b, rel_tol, abs_tol);
}

double brent_root(const Fn1& f, double a, double b, double tol, int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw NumericsError("brent_root: endpoints do not bracket a root");
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
    double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return b;
}

double newton_root(const Fn1& f, const Fn1& df, double x0, double lo, double hi, double tol,
                   int max_iter) {
  double x = x0;
  for (int i = 0; i < max_iter; ++i) {
    double fx = f(x);
    if (std::abs(fx) == 0.0) return x;
    double d = df(x);
    double step = (d != 0.0) ? fx / d : 0.0;
    double xn = x - step;
    if (d == 0.0 || xn < lo || xn > hi) xn = 0.5 * (lo + hi);
    double fn = f(xn);
    if (std::isfinite(fn)) {
      if (fn * f(lo) <= 0.0)
        hi = xn;
      else
        lo = xn;
    }
    if (std::abs(xn - x) <= tol * (1.0 + std::abs(xn))) return xn;
    x = xn;
  }
  throw NumericsError("newton_root: no convergence");
}

double d_dE(const Fn1& f, double E, int order) {
  if (order == 1) {
    double d = 1e-3 * std::max(1.0, std::abs(E));
    auto central = [&](double h) { return (f(E + h) - f(E - h)) / (2.0 * h); };
    double d1 = central(d), d2 = central(0.5 * d);
    double r = (4.0 * d2 - d1) / 3.0;
    if (!std::isfinite(r)) throw NumericsError("d_dE: non-finite stencil value");
    return r;
  }
  if (order == 2) {
    double d = 2.5e-2 * std::max(1.0, std::abs(E));
    auto second = [&](double h) {
      return (-f(E + 2 * h) + 16 * f(E + h) - 30 * f(E) + 16 * f(E - h) - f(E - 2 * h)) /
             (12.0 * h * h);
    };
    double d1 = second(d), d2 = second(0.5 * d);
    double r = (16.0 * d2 - d1) / 15.0;
    if (!std::isfinite(r)) throw NumericsError("d_dE: non-finite stencil value");
    return r;
  }
  throw NumericsError("d_dE: order must be 1 or 2");
}

double finite_part(const Fn1& f, double delta0, double ratio,
                   const std::vector<double>& exponents) {
  size_t stages = exponents.size();
  size_t n = stages + 1;
  std::vector<double> v(n);
  for (size_t i = 0; i < n; ++i) v[i] = f(delta0 * std::pow(ratio, double(i)));
  // Eliminate each known exponent in turn:  g_i = (f(d r) - r^e f(d)) / (1 - r^e).
  for (size_t s = 0; s < stages; ++s) {
    double re = std::pow(ratio, exponents[s]);
    for (size_t i = 0; i + 1 < v.size(); ++i) v[i] = (v[i + 1] - re * v[i]) / (1.0 - re);
    v.pop_back();
  }
  return v[0];
}

const std::vector<double>& focal_exponents() {
  static const std::vector<double> e = {-1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0};
  return e;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw NumericsError("fit_slope: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = double(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace bs
