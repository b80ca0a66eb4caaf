#include "bs/wkb.hpp"

#include <algorithm>
#include <cmath>

#include "bs/numerics.hpp"

namespace bs {

namespace {
constexpr double kBetaFloor = 1e-8;
}

// Per-energy branch lookup tables: orbit samples split by the sign of
// xdot (= beta0 along the orbit), sorted in x, with the focal points
// appended as anchors.  Newton from the nearest tabulated xi is then a
// couple of iterations even inside tight quadrature loops.
struct WkbEngine::BranchTable {
  std::vector<double> x[2], xi[2];  // [0] = minus branch, [1] = plus branch

  static BranchTable build(const Orbit& orb) {
    BranchTable t;
    for (int s = 0; s < 2; ++s) {
      int want = s == 0 ? -1 : +1;
      std::vector<std::pair<double, double>> pts;
      for (const auto& q : orb.samples)
        if ((q.xdot > 0 ? +1 : -1) == want) pts.emplace_back(q.x, q.xi);
      pts.emplace_back(orb.focal_right.x, orb.focal_right.xi);
      pts.emplace_back(orb.focal_left.x, orb.focal_left.xi);
      std::sort(pts.begin(), pts.end());
      t.x[s].reserve(pts.size());
      t.xi[s].reserve(pts.size());
      for (auto& p : pts) {
        t.x[s].push_back(p.first);
        t.xi[s].push_back(p.second);
      }
    }
    return t;
  }

  double seed(double xq, int branch) const {
    int s = branch > 0 ? 1 : 0;
    auto it = std::lower_bound(x[s].begin(), x[s].end(), xq);
    size_t i = static_cast<size_t>(it - x[s].begin());
    if (i == x[s].size()) --i;
    if (i > 0 && std::abs(x[s][i - 1] - xq) < std::abs(x[s][i] - xq)) --i;
    return xi[s][i];
  }
};

WkbEngine::WkbEngine(SymbolFamily sym) : sym_(std::move(sym)), actions_(sym_) {}

WkbEngine::~WkbEngine() = default;

const WkbEngine::EnergyAux& WkbEngine::aux_ro(double E) const {
  std::lock_guard<std::mutex> lock(mtx_);
  auto it = aux_.find(E);
  if (it == aux_.end()) throw std::logic_error("aux_ro: missing energy record");
  return it->second;
}

void WkbEngine::ensure_tables(double E) const {
  {
    std::lock_guard<std::mutex> lock(mtx_);
    auto it = aux_.find(E);
    if (it != aux_.end() && it->second.table) return;
  }
  auto orb = actions_.orbit(E);
  auto table = std::make_shared<BranchTable>(BranchTable::build(*orb));
  std::lock_guard<std::mutex> lock(mtx_);
  auto& a = aux_[E];
  a.orbit = orb;
  a.table = table;
}

WkbEngine::Frame WkbEngine::frame(double E) const {
  ensure_tables(E);
  std::lock_guard<std::mutex> lock(mtx_);
  auto& a = aux_[E];
  return Frame{a.orbit, a.table};
}

double WkbEngine::xi_on_branch(const Frame& f, double x, int branch) const {
  double xi = f.table->seed(x, branch);
  for (int it = 0; it < 40; ++it) {
    double fv = sym_.eval(0, x, xi) - f.orbit->E;
    double dv = sym_.partial(0, x, xi, 0, 1);
    if (dv == 0.0) break;
    double step = fv / dv;
    xi -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(xi))) return xi;
  }
  // fall back to the bracket-based solve via the public helper
  return branch_xi(sym_, *f.orbit, x, branch);
}

double WkbEngine::xi_branch(double E, double x, int branch) const {
  Frame f = frame(E);
  if (!(x > f.orbit->focal_left.x && x < f.orbit->focal_right.x))
    throw OrbitError("xi_branch: x outside (x'_E, x_E)");
  return xi_on_branch(f, x, branch);
}

double WkbEngine::beta0(double E, double x, int branch) const {
  Frame f = frame(E);
  double xi = xi_on_branch(f, x, branch);
  return sym_.partial(0, x, xi, 0, 1);
}

double WkbEngine::phi_pp(double E, double x, int branch) const {
  Frame f = frame(E);
  double xi = xi_on_branch(f, x, branch);
  return branch_xi_prime(sym_, x, xi);
}

// All branch-local data needed by the order-h^2 formulas at one point.
struct WkbEngine::Local {
  double xi;
  PartialTable P;
  double b, pp, bp;
  double p1 = 0, p2 = 0, dp1 = 0;
};

WkbEngine::Local WkbEngine::local(const Frame& f, int branch, double y) const {
  Local L;
  L.xi = xi_on_branch(f, y, branch);
  L.P = sym_.partials(0, y, L.xi);
  L.b = L.P(0, 1);
  L.pp = -L.P(1, 0) / L.b;
  L.bp = L.P(1, 1) + L.P(0, 2) * L.pp;
  if (sym_.has(1)) {
    L.p1 = sym_.eval(1, y, L.xi);
    L.dp1 = sym_.partial(1, y, L.xi, 0, 1);
  }
  if (sym_.has(2)) L.p2 = sym_.eval(2, y, L.xi);
  return L;
}

double WkbEngine::t1_local(const Local& L) const {
  const auto& P = L.P;
  double t = (1.0 / L.b) *
             (-L.p2 + P(2, 2) / 8.0 + L.pp * P(1, 3) / 12.0 - L.pp * L.pp * P(0, 4) / 24.0);
  t -= (L.bp * L.bp) / (8.0 * L.b * L.b * L.b) * P(0, 2);
  t += L.pp * L.bp / (6.0 * L.b * L.b) * P(0, 3);
  if (sym_.has(1)) t += L.p1 / (L.b * L.b) * (L.dp1 - L.p1 / (2.0 * L.b) * P(0, 2));
  return t;
}

double WkbEngine::bracket_local(const Local& L) const {
  return L.pp / (6.0 * L.b) * L.P(0, 3) - L.bp / (4.0 * L.b * L.b) * L.P(0, 2);
}

double WkbEngine::im_d1_prime_local(const Local& L) const {
  const auto& P = L.P;
  double b = L.b, pp = L.pp, bp = L.bp;
  double ppp = -((P(2, 0) + P(1, 1) * pp) * b - P(1, 0) * (P(1, 1) + P(0, 2) * pp)) / (b * b);
  double bpp = P(2, 1) + P(1, 2) * pp + (P(1, 2) + P(0, 3) * pp) * pp + P(0, 2) * ppp;
  double dP03 = P(1, 3) + P(0, 4) * pp;
  double dP02 = P(1, 2) + P(0, 3) * pp;
  double dbr = (ppp / (6.0 * b) - pp * bp / (6.0 * b * b)) * P(0, 3) + pp / (6.0 * b) * dP03 -
               (bpp / (4.0 * b * b) - bp * bp / (2.0 * b * b * b)) * P(0, 2) -
               bp / (4.0 * b * b) * dP02;
  return t1_local(L) + dbr;
}

double WkbEngine::re_d1_content_local(const Local& L) const {
  if (!sym_.has(1)) return 0.0;
  return (L.dp1 * L.b - L.p1 * L.P(0, 2)) / (L.b * L.b);
}

double WkbEngine::t1(double E, int branch, double y) const {
  Frame f = frame(E);
  Local L = local(f, branch, y);
  if (std::abs(L.b) < kBetaFloor) throw OrbitError("t1: focal proximity, |beta0| < 1e-8");
  return t1_local(L);
}

double WkbEngine::phase_const(double E, FocalBase base) const {
  if (base == FocalBase::a) return 0.0;
  {
    std::lock_guard<std::mutex> lock(mtx_);
    auto it = aux_.find(E);
    if (it != aux_.end() && it->second.have_phase_const) return it->second.phase_const_aprime;
  }
  Frame f = frame(E);
  double c = -integrate_sqrt_both([&](double y) { return xi_on_branch(f, y, +1); },
                                  f.orbit->focal_left.x, f.orbit->focal_right.x, 1e-13, 1e-14);
  std::lock_guard<std::mutex> lock(mtx_);
  auto& a = aux_[E];
  a.phase_const_aprime = c;
  a.have_phase_const = true;
  return c;
}

double WkbEngine::phase(double E, FocalBase base, int branch, double x, double h) const {
  Frame f = frame(E);
  if (!(x > f.orbit->focal_left.x && x < f.orbit->focal_right.x))
    throw OrbitError("phase: x at or beyond a focal point");
  double xb = base_x(*f.orbit, base);
  double s = phase_const(E, base);
  s += integrate_sqrt_endpoint([&](double y) { return xi_on_branch(f, y, branch); }, xb, x, xb,
                               1e-13, 1e-14);
  if (sym_.has(1)) {
    s -= h * integrate_sqrt_endpoint(
                 [&](double y) {
                   double xi = xi_on_branch(f, y, branch);
                   return sym_.eval(1, y, xi) / sym_.partial(0, y, xi, 0, 1);
                 },
                 xb, x, xb, 1e-12, 1e-14);
  }
  return s;
}

Complex WkbEngine::amplitude_b0(double E, int branch, double x) const {
  Frame f = frame(E);
  double xi = xi_on_branch(f, x, branch);
  double b0 = sym_.partial(0, x, xi, 0, 1);
  if (std::abs(b0) < kBetaFloor) throw OrbitError("amplitude_b0: beta0 vanishes (focal point)");
  double mag = M_SQRT1_2 / std::sqrt(std::abs(b0));
  if (!sym_.has(1)) return {mag, 0.0};
  double ph = integrate_sqrt_endpoint(
      [&](double y) {
        double xiy = xi_on_branch(f, y, branch);
        return sym_.eval(1, y, xiy) / sym_.partial(0, y, xiy, 0, 1);
      },
      f.orbit->focal_right.x, x, f.orbit->focal_right.x, 1e-12, 1e-14);
  return std::polar(mag, -ph);
}

Complex WkbEngine::d1_base_value(double E, FocalBase base, int branch) const {
  BranchKey key{E, base == FocalBase::a ? 0 : 1, branch};
  {
    std::lock_guard<std::mutex> lock(mtx_);
    auto it = d1_base_fp_.find(key);
    if (it != d1_base_fp_.end()) return it->second;
  }
  Frame f = frame(E);
  double w = f.orbit->width();
  double xm = 0.5 * (f.orbit->focal_left.x + f.orbit->focal_right.x);
  double xb = base_x(*f.orbit, base);
  double dir = base == FocalBase::a ? -1.0 : +1.0;

  auto g_im = [&](double d) {
    double xe = xb + dir * d;
    return integrate(
        [&](double y) { return im_d1_prime_local(local(f, branch, y)); }, xm, xe, 1e-12, 1e-13);
  };
  double im_fp = finite_part(g_im, 0.02 * w, 0.5, focal_exponents());

  double re_fp = 0.0;
  if (sym_.has(1)) {
    auto g_re = [&](double d) { return re_d1_content_local(local(f, branch, xb + dir * d)); };
    re_fp = finite_part(g_re, 0.02 * w, 0.5, focal_exponents());
  }
  Complex v{re_fp, im_fp};
  std::lock_guard<std::mutex> lock(mtx_);
  d1_base_fp_[key] = v;
  return v;
}

Complex WkbEngine::d1(double E, FocalBase base, int branch, double x) const {
  Frame f = frame(E);
  double w = f.orbit->width();
  double xb = base_x(*f.orbit, base);
  if (std::abs(x - xb) < 1e-14 * w) return {0.0, 0.0};  // normalization D1(x_base) = 0
  if (!(x > f.orbit->focal_left.x && x < f.orbit->focal_right.x))
    throw OrbitError("d1: x outside (x'_E, x_E)");

  double xm = 0.5 * (f.orbit->focal_left.x + f.orbit->focal_right.x);
  Complex base_fp = d1_base_value(E, base, branch);

  double im = integrate([&](double y) { return im_d1_prime_local(local(f, branch, y)); }, xm, x,
                        1e-12, 1e-13) +
              bracket_local(local(f, branch, x)) - base_fp.imag();
  double re =
      sym_.has(1) ? -0.5 * (re_d1_content_local(local(f, branch, x)) - base_fp.real()) : 0.0;
  return {re, im};
}

NormalizationConstants WkbEngine::normalization(double E) const {
  NormalizationConstants n;
  if (!sym_.has(1)) return n;
  Frame f = frame(E);
  auto c1_at = [&](const FocalPoint& fp) {
    double eps = 1e-5 * (1.0 + std::abs(fp.xi));
    auto ratio = [&](double xi) {
      return sym_.eval(1, fp.x, xi) / sym_.partial(0, fp.x, xi, 0, 1);
    };
    auto central = [&](double e) { return (ratio(fp.xi + e) - ratio(fp.xi - e)) / (2.0 * e); };
    double d = (4.0 * central(0.5 * eps) - central(eps)) / 3.0;
    return -std::pow(2.0, -1.5) * d;
  };
  n.C1_a = c1_at(f.orbit->focal_right);
  n.C1_aprime = c1_at(f.orbit->focal_left);
  return n;
}

Complex WkbEngine::wkb_eval(double E, FocalBase base, double h, double x) const {
  NormalizationConstants nc = normalization(E);
  double C1 = base == FocalBase::a ? nc.C1_a : nc.C1_aprime;
  Complex u{0.0, 0.0};
  for (int rho : {+1, -1}) {
    double b0 = beta0(E, x, rho);
    if (std::abs(b0) < kBetaFloor) throw OrbitError("wkb_eval: focal proximity");
    double s = phase(E, base, rho, x, h);
    int maslov_sign = base == FocalBase::a ? rho : -rho;
    Complex phase_factor = std::polar(1.0, maslov_sign * M_PI / 4.0 + s / h);
    Complex amp = nc.C0 + h * (C1 + d1(E, base, rho, x));
    u += phase_factor * amp / std::sqrt(std::abs(b0));
  }
  return u;
}

WkbBranch WkbEngine::build_branch(double E, FocalBase base, int branch, double h, int n) const {
  Frame f = frame(E);
  double w = f.orbit->width();
  double lo = f.orbit->focal_left.x + 1e-2 * w;
  double hi = f.orbit->focal_right.x - 1e-2 * w;
  WkbBranch br;
  br.base = base;
  br.branch = branch;
  br.maslov = std::polar(1.0, (base == FocalBase::a ? branch : -branch) * M_PI / 4.0);
  NormalizationConstants nc = normalization(E);
  double C1 = base == FocalBase::a ? nc.C1_a : nc.C1_aprime;
  br.x.resize(static_cast<size_t>(n));
  br.phase.resize(br.x.size());
  br.b0.resize(br.x.size());
  br.b1.resize(br.x.size());
  for (int i = 0; i < n; ++i) {
    double theta = M_PI * (n - 1 - i) / (n - 1);
    double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(theta);
    br.x[static_cast<size_t>(i)] = x;
    br.phase[static_cast<size_t>(i)] = phase(E, base, branch, x, h);
    Complex b0 = amplitude_b0(E, branch, x);
    br.b0[static_cast<size_t>(i)] = b0;
    double beta = beta0(E, x, branch);
    Complex rot = b0 / std::abs(b0);
    br.b1[static_cast<size_t>(i)] =
        (C1 + d1(E, base, branch, x)) / std::sqrt(std::abs(beta)) * rot;
  }
  return br;
}

int WkbEngine::focal_multiplicity(const FocalPoint& fp) const {
  for (int m = 2; m <= kMaxPartialOrder; ++m) {
    double scale = 1.0 + std::abs(sym_.eval(0, fp.x, fp.xi));
    if (std::abs(sym_.partial(0, fp.x, fp.xi, 0, m)) > 1e-6 * scale) {
      if (m == 3) throw OrbitError("odd-order focal point: orbit is not a convex fold");
      return m;
    }
  }
  throw OrbitError("focal multiplicity beyond the supported derivative order");
}

// Finite part of the T1 loop integral approaching one focal point.  In
// the fold parameter sigma = |x - x_focal|^{1/m} the branch-odd density
// gives an even Laurent expansion u = sum_i b_i sigma^{2i-K}, K = m+2,
// with no sigma^{-1} or constant obstruction, so the finite part is the
// integral beyond sigma_c plus the term-wise finite part of the fitted
// expansion below it.  The bracket terms of (2.37) are odd in sigma and
// contribute nothing.  At a degenerate fold (m = 4) the extraction is
// noise-limited near 1e-4 relative; the simple-fold case is good to
// better than 1e-8.
double WkbEngine::loop_t1_side_fp(const Frame& f, double xb, int dir, int m) const {
  const double w = f.orbit->width();
  const double smax = std::pow(0.5 * w, 1.0 / m);
  auto u = [&](double sig) {
    double x = xb + dir * std::pow(sig, m);
    return m * std::pow(sig, m - 1) *
           (t1_local(local(f, +1, x)) - t1_local(local(f, -1, x)));
  };
  const int K = m + 2;
  const int P = K / 2 + 5;
  const double sc = 0.25 * smax;

  // fit u * sigma^K by an even polynomial on a geometric sample ladder
  std::vector<double> ts(static_cast<size_t>(P)), gs(static_cast<size_t>(P));
  for (int k = 0; k < P; ++k) {
    double sig = sc * std::pow(0.82, k);
    ts[static_cast<size_t>(k)] = sig * sig;
    gs[static_cast<size_t>(k)] = u(sig) * std::pow(sig, K);
  }
  // Vandermonde solve in t = sigma^2 with partial pivoting
  std::vector<std::vector<double>> Amat(static_cast<size_t>(P),
                                        std::vector<double>(static_cast<size_t>(P + 1)));
  for (int i = 0; i < P; ++i) {
    double tp = 1.0;
    for (int j = 0; j < P; ++j) {
      Amat[static_cast<size_t>(i)][static_cast<size_t>(j)] = tp;
      tp *= ts[static_cast<size_t>(i)];
    }
    Amat[static_cast<size_t>(i)][static_cast<size_t>(P)] = gs[static_cast<size_t>(i)];
  }
  for (int col = 0; col < P; ++col) {
    int piv = col;
    for (int r = col + 1; r < P; ++r)
      if (std::abs(Amat[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
          std::abs(Amat[static_cast<size_t>(piv)][static_cast<size_t>(col)]))
        piv = r;
    std::swap(Amat[static_cast<size_t>(col)], Amat[static_cast<size_t>(piv)]);
    for (int r = 0; r < P; ++r) {
      if (r == col) continue;
      double fmul = Amat[static_cast<size_t>(r)][static_cast<size_t>(col)] /
                    Amat[static_cast<size_t>(col)][static_cast<size_t>(col)];
      for (int cc = col; cc <= P; ++cc)
        Amat[static_cast<size_t>(r)][static_cast<size_t>(cc)] -=
            fmul * Amat[static_cast<size_t>(col)][static_cast<size_t>(cc)];
    }
  }
  std::vector<double> b(static_cast<size_t>(P));
  for (int i = 0; i < P; ++i)
    b[static_cast<size_t>(i)] = Amat[static_cast<size_t>(i)][static_cast<size_t>(P)] /
                                Amat[static_cast<size_t>(i)][static_cast<size_t>(i)];

  // FP integral of every fitted power from the origin up to sigma_c,
  // plus the honest integral beyond.
  double tail = 0.0;
  for (int i = 0; i < P; ++i) {
    double e = 2.0 * i - K + 1.0;
    tail += b[static_cast<size_t>(i)] * std::pow(sc, e) / e;
  }
  double smooth = integrate(u, sc, smax, 1e-13, 1e-14);
  return smooth + tail;
}

void WkbEngine::ensure_loops(double E) const {
  {
    std::lock_guard<std::mutex> lock(mtx_);
    auto it = aux_.find(E);
    if (it != aux_.end() && it->second.have_loops) return;
  }
  Frame f = frame(E);
  double xl = f.orbit->focal_left.x, xr = f.orbit->focal_right.x;

  auto diff = [&](auto&& g) {
    return integrate_sqrt_both([&](double y) { return g(y, +1) - g(y, -1); }, xl, xr, 1e-13,
                               1e-14);
  };
  double s0x = diff([&](double y, int rho) { return xi_on_branch(f, y, rho); });
  double ip1x = 0, ip2x = 0;
  if (sym_.has(1))
    ip1x = diff([&](double y, int rho) {
      double xi = xi_on_branch(f, y, rho);
      return sym_.eval(1, y, xi) / sym_.partial(0, y, xi, 0, 1);
    });
  if (sym_.has(2))
    ip2x = diff([&](double y, int rho) {
      double xi = xi_on_branch(f, y, rho);
      return sym_.eval(2, y, xi) / sym_.partial(0, y, xi, 0, 1);
    });

  // Finite part of the (2.37) T1 block.  Its native value is the
  // spectral second-order term (the combination the operator spectrum
  // follows); see ActionEngine::s2_spectral and the test suite.
  int m_r = focal_multiplicity(f.orbit->focal_right);
  int m_l = focal_multiplicity(f.orbit->focal_left);
  double im_omega1 = loop_t1_side_fp(f, xr, -1, m_r) + loop_t1_side_fp(f, xl, +1, m_l);

  std::lock_guard<std::mutex> lock(mtx_);
  auto& a = aux_[E];
  a.s0x = s0x;
  a.ip1x = ip1x;
  a.ip2x = ip2x;
  a.im_omega1 = im_omega1;
  a.have_loops = true;
}

double WkbEngine::s0_x(double E) const {
  ensure_loops(E);
  return aux_ro(E).s0x;
}
double WkbEngine::loop_p1_x(double E) const {
  ensure_loops(E);
  return aux_ro(E).ip1x;
}
double WkbEngine::im_loop_omega1_x(double E) const {
  ensure_loops(E);
  return aux_ro(E).im_omega1;
}

double WkbEngine::a_pm_difference(double E, double h) const {
  ensure_loops(E);
  const EnergyAux& a = aux_ro(E);
  return a.s0x - h * a.ip1x + h * h * a.im_omega1;
}

ApmResult WkbEngine::a_pm(double E, double h) const {
  Frame f = frame(E);
  double xl = f.orbit->focal_left.x, xr = f.orbit->focal_right.x;
  double w = xr - xl;
  double d = 1e-4 * w;

  ApmResult r;
  r.inset = d;
  double cprime = phase_const(E, FocalBase::a_prime);
  for (int rho : {+1, -1}) {
    double xi_part =
        -integrate_sqrt_both([&](double y) { return xi_on_branch(f, y, rho); }, xl, xr, 1e-13,
                             1e-14);
    double h_part = 0.0;
    if (sym_.has(1))
      h_part = integrate_sqrt_both(
          [&](double y) {
            double xi = xi_on_branch(f, y, rho);
            return sym_.eval(1, y, xi) / sym_.partial(0, y, xi, 0, 1);
          },
          xl, xr, 1e-12, 1e-14);
    double t1_part =
        -integrate([&](double y) { return t1_local(local(f, rho, y)); }, xl + d, xr - d, 1e-12,
                   1e-13);
    t1_part += bracket_local(local(f, rho, xl + d)) - bracket_local(local(f, rho, xr - d));
    double A = -cprime + xi_part + h * h_part + h * h * t1_part;
    if (rho > 0) {
      r.A_plus = A;
      r.h_linear_plus = h_part;
    } else {
      r.A_minus = A;
      r.h_linear_minus = h_part;
    }
  }
  return r;
}

}  // namespace bs
