#include "bs/normal_form.hpp"

#include <cmath>

#include "bs/airy.hpp"
#include "bs/numerics.hpp"
#include "bs/ode.hpp"

namespace bs {

namespace {

// ------------- nu-polynomial helpers over a generic ring C -------------
// C is double (pointwise transport data) or Series<Real, 44> (Taylor
// hierarchy at the turning point); both carry +, -, *, / and double
// scaling, which is all the master-equation expansion needs.

template <class C>
using NP = std::vector<C>;

template <class C>
NP<C> np_zero(size_t deg) {
  return NP<C>(deg + 1, C(0.0));
}

template <class C>
NP<C> np_mul(const NP<C>& a, const NP<C>& b) {
  NP<C> r = np_zero<C>(a.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; i + j < a.size() && j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
  return r;
}

template <class C>
NP<C> np_div(const NP<C>& a, const NP<C>& b) {
  NP<C> q = np_zero<C>(a.size() - 1);
  for (size_t n = 0; n < a.size(); ++n) {
    C acc = a[n];
    for (size_t k = 0; k < n; ++k)
      if (n - k < b.size()) acc = acc - q[k] * b[n - k];
    q[n] = acc / b[0];
  }
  return q;
}

// Master-equation left-hand side minus the potential as a nu-polynomial:
//   (xr')^2 xr - (nu^2 / 2) { xr, x~ } - sum_j Q_j nu^j
// from the per-order values/derivatives of the x_j.
template <class C>
NP<C> master_np(const std::array<C, 5>& xv, const std::array<C, 5>& xd1,
                const std::array<C, 5>& xd2, const std::array<C, 5>& xd3,
                const std::array<C, 5>& qv, size_t deg) {
  NP<C> V = np_zero<C>(deg), B = np_zero<C>(deg), C2 = np_zero<C>(deg), A3 = np_zero<C>(deg),
        Q = np_zero<C>(deg);
  for (size_t i = 0; i < 5 && i <= deg; ++i) {
    V[i] = xv[i];
    B[i] = xd1[i];
    C2[i] = xd2[i];
    A3[i] = xd3[i];
    Q[i] = qv[i];
  }
  NP<C> r = np_mul(np_mul(B, B), V);
  NP<C> ab = np_div(A3, B);
  NP<C> cb = np_div(C2, B);
  NP<C> cb2 = np_mul(cb, cb);
  for (size_t k = 0; k + 2 <= deg; ++k)
    r[k + 2] = r[k + 2] - (ab[k] - cb2[k] * 1.5) * 0.5;
  for (size_t k = 0; k <= deg; ++k) r[k] = r[k] - Q[k];
  return r;
}

// ------------------- Taylor hierarchy at the turning point -------------

constexpr int kSeriesOrder = 44;

template <class Real>
using SX = Series<Real, kSeriesOrder>;

// A(u) = x0'(x0' u + 2 x0 u'), the linearized transport operator; its
// x^n coefficient carries the factor (2n+1) in front of u_n.
template <class Real>
SX<Real> transport_solve(const SX<Real>& x0, const SX<Real>& dx0, const SX<Real>& rhs) {
  SX<Real> u;
  for (int n = 0; n <= kSeriesOrder; ++n) {
    SX<Real> au = dx0 * (dx0 * u + 2.0 * (x0 * series_derivative(u)));
    Real defect = rhs.c[n] - au.c[n];
    u.c[n] = u.c[n] + defect / double(2 * n + 1);
  }
  return u;
}

template <class Real>
std::array<SX<Real>, 5> promote_taylor(const PotentialSeries& ps) {
  std::array<SX<Real>, 5> q;
  for (int j = 0; j < 5; ++j) {
    std::vector<double> t = ps.taylor(j, kSeriesOrder);
    for (int i = 0; i <= kSeriesOrder; ++i)
      q[static_cast<size_t>(j)].c[i] = Real(t[static_cast<size_t>(i)]);
  }
  return q;
}

template <class Real>
TransportSeries<Real> build_series(const PotentialSeries& ps, int degree) {
  auto q = promote_taylor<Real>(ps);

  // x0 x0'^2 = Q0, coefficient by coefficient
  SX<Real> x0;
  x0.c[1] = Real(1);
  for (int n = 2; n <= kSeriesOrder; ++n) {
    SX<Real> dx0 = series_derivative(x0);
    SX<Real> lhs = x0 * (dx0 * dx0);
    Real defect = q[0].c[n] - lhs.c[n];
    x0.c[n] = defect / double(2 * n + 1);
  }
  SX<Real> dx0 = series_derivative(x0);

  std::array<SX<Real>, 5> xs;
  xs[0] = x0;
  // x_j cancels the nu^j coefficient of the master residual assembled
  // from the lower orders.
  for (size_t j = 1; j <= 4; ++j) {
    std::array<SX<Real>, 5> xv, xd1, xd2, xd3;
    for (size_t i = 0; i < 5; ++i) {
      xv[i] = i < j ? xs[i] : SX<Real>();
      xd1[i] = series_derivative(xv[i]);
      xd2[i] = series_derivative(xd1[i]);
      xd3[i] = series_derivative(xd2[i]);
    }
    NP<SX<Real>> r = master_np<SX<Real>>(xv, xd1, xd2, xd3, q, 4);
    xs[j] = transport_solve(x0, dx0, SX<Real>() - r[j]);
  }

  TransportSeries<Real> ts;
  for (size_t j = 0; j < 5; ++j) {
    ts.x[j].assign(static_cast<size_t>(degree + 1), Real(0));
    for (int i = 0; i <= degree && i <= kSeriesOrder; ++i)
      ts.x[j][static_cast<size_t>(i)] = xs[j].c[i];
  }
  return ts;
}

}  // namespace

PotentialSeries PotentialSeries::from_strings(const std::string& q0, const std::string& q1,
                                              const std::string& q2, const std::string& q3,
                                              const std::string& q4) {
  PotentialSeries ps;
  const std::string* src[5] = {&q0, &q1, &q2, &q3, &q4};
  for (int j = 0; j < 5; ++j) {
    if (!src[j]->empty()) {
      Expr e = parse_expression(*src[j]);
      if (expr_depends_on_xi(e))
        throw NormalFormError("potential series must depend on x only");
      ps.Q[static_cast<size_t>(j)] = e;
    }
  }
  ps.validate();
  return ps;
}

double PotentialSeries::eval(int j, double x) const {
  const Expr& e = Q[static_cast<size_t>(j)];
  return e ? expr_eval(e, x, 0.0) : 0.0;
}

std::vector<double> PotentialSeries::taylor(int j, int degree) const {
  std::vector<double> out(static_cast<size_t>(degree + 1), 0.0);
  const Expr& e = Q[static_cast<size_t>(j)];
  if (!e) return out;
  if (degree > kSeriesOrder) throw NormalFormError("taylor degree capped at 44");
  using Jet = Series<double, kSeriesOrder>;
  Jet r = expr_eval(e, Jet::variable(0.0), Jet::constant(0.0));
  for (int i = 0; i <= degree; ++i) out[static_cast<size_t>(i)] = r.c[i];
  return out;
}

void PotentialSeries::validate() const {
  if (!Q[0]) throw NormalFormError("Q0 is required");
  auto t = taylor(0, 1);
  if (std::abs(t[0]) > 1e-12 || std::abs(t[1] - 1.0) > 1e-12)
    throw NormalFormError("Q0 must have a normalized simple zero: Q0(0)=0, Q0'(0)=1");
}

TransportSeries<double> transport_series(const PotentialSeries& ps, int degree) {
  ps.validate();
  return build_series<double>(ps, degree);
}

TransportSeries<__float128> transport_series_quad(const PotentialSeries& ps, int degree) {
  ps.validate();
  return build_series<__float128>(ps, degree);
}

// ------------------------------ NormalForm ------------------------------

namespace {
constexpr double kSeriesSwitch = 1e-3;  // series near the turning point
}

NormalForm::NormalForm(PotentialSeries ps, double X, int grid_n)
    : ps_(std::move(ps)), X_(X), n_(grid_n) {
  ps_.validate();
  series_ = transport_series(ps_, 18);

  auto nodes = cheb_nodes(n_, -X_, X_);
  for (double t : nodes) {
    double q0 = ps_.eval(0, t);
    if (std::abs(t) > 1e-6 && q0 * t <= 0.0)
      throw NormalFormError("Q0 must have its only zero at the origin inside [-X, X]");
  }

  auto fit_level = [&](int j, const std::function<double(double)>& f) {
    std::vector<double> vals(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) vals[i] = f(nodes[i]);
    fit_[static_cast<size_t>(j)] = cheb_fit(vals, -X_, X_);
    dfit_[static_cast<size_t>(j)] = fit_[static_cast<size_t>(j)].derivative();
    ddfit_[static_cast<size_t>(j)] = dfit_[static_cast<size_t>(j)].derivative();
    d3fit_[static_cast<size_t>(j)] = ddfit_[static_cast<size_t>(j)].derivative();
  };

  fit_level(0, [&](double t) { return x0(t); });
  for (int j = 1; j <= 4; ++j)
    fit_level(j, [&](double t) { return compute_xj_integral(j, t); });
}

double NormalForm::series_eval(int j, double xt) const {
  const auto& c = series_.x[static_cast<size_t>(j)];
  double r = 0.0;
  for (size_t i = c.size(); i-- > 0;) r = r * xt + c[i];
  return r;
}

double NormalForm::quad_x0(double xt) const {
  if (xt == 0.0) return 0.0;
  double smax = std::sqrt(std::abs(xt));
  double sgn = xt > 0 ? 1.0 : -1.0;
  auto integrand = [&](double s) {
    double t = sgn * s * s;
    double ratio = (std::abs(t) < 1e-300) ? 1.0 : sgn * ps_.eval(0, t) / (s * s);
    return 2.0 * s * s * std::sqrt(ratio);
  };
  double I = integrate(integrand, 0.0, smax, 1e-13, 1e-15);
  return sgn * std::pow(1.5 * I, 2.0 / 3.0);
}

double NormalForm::x0(double xt) const {
  if (std::abs(xt) < kSeriesSwitch) return series_eval(0, xt);
  return quad_x0(xt);
}

double NormalForm::x0_prime(double xt) const {
  if (std::abs(xt) < std::max(kSeriesSwitch, 0.04 * X_)) {
    const auto& c = series_.x[0];
    double r = 0.0;
    for (size_t i = c.size(); i-- > 1;) r = r * xt + double(i) * c[i];
    return r;
  }
  double v0 = x0(xt);
  return std::sqrt(ps_.eval(0, xt) / v0);
}

namespace {
double eval_poly_deriv(const std::vector<double>& c, double xt, int order) {
  std::vector<double> d(c);
  for (int k = 0; k < order; ++k) {
    for (size_t i = 1; i < d.size(); ++i) d[i - 1] = double(i) * d[i];
    d.pop_back();
  }
  double r = 0.0;
  for (size_t i = d.size(); i-- > 0;) r = r * xt + d[i];
  return r;
}
}  // namespace

double NormalForm::x0_second(double xt) const {
  if (std::abs(xt) < std::max(kSeriesSwitch, 0.04 * X_))
    return eval_poly_deriv(series_.x[0], xt, 2);
  double v = x0(xt), p = x0_prime(xt);
  double q0p = d_dx_q(0, xt, 1);
  return (q0p - p * p * p) / (2.0 * v * p);
}

double NormalForm::x0_third(double xt) const {
  if (std::abs(xt) < std::max(kSeriesSwitch, 0.04 * X_))
    return eval_poly_deriv(series_.x[0], xt, 3);
  double v = x0(xt), p = x0_prime(xt), pp = x0_second(xt);
  double q0pp = d_dx_q(0, xt, 2);
  return (q0pp - 5.0 * p * p * pp - 2.0 * v * pp * pp) / (2.0 * v * p);
}

double NormalForm::d_dx_q(int j, double xt, int order) const {
  const Expr& e = ps_.Q[static_cast<size_t>(j)];
  if (!e) return 0.0;
  using Jet = Series<double, 3>;
  Jet r = expr_eval(e, Jet::variable(xt), Jet::constant(0.0));
  double fact = 1.0;
  for (int k = 2; k <= order; ++k) fact *= k;
  return r.c[static_cast<size_t>(order)] * fact;
}

double NormalForm::schwarz_x0(double xt) const {
  double p = x0_prime(xt), pp = x0_second(xt), ppp = x0_third(xt);
  return ppp / p - 1.5 * (pp / p) * (pp / p);
}

double NormalForm::x1(double xt) const {
  if (!ps_.has(1)) return 0.0;
  return compute_xj_integral(1, xt);
}

double NormalForm::half_invsqrt_integral(double xt, const std::function<double(double)>& w) const {
  double smax = std::sqrt(std::abs(xt));
  double sgn = xt > 0 ? 1.0 : -1.0;
  auto integrand = [&](double s) {
    double t = sgn * s * s;
    double ratio = sgn * ps_.eval(0, t) / (s * s);  // |Q0|/s^2, smooth and positive
    return 2.0 * w(t) / std::sqrt(ratio);
  };
  double J = integrate(integrand, 0.0, smax, 1e-12, 1e-14);
  return 0.5 * J / std::sqrt(std::abs(x0(xt)));
}

// The right-hand side R_j(t) the transport operator must match at order
// nu^j, from the master expansion with x_j..x_4 zeroed out.  Uses only
// levels < j, which are already fitted when this runs.
double NormalForm::transport_rhs(int j, double t) const {
  std::array<double, 5> xv{}, xd1{}, xd2{}, xd3{}, qv{};
  xv[0] = x0(t);
  xd1[0] = x0_prime(t);
  xd2[0] = x0_second(t);
  xd3[0] = x0_third(t);
  for (int i = 1; i < j; ++i) {
    xv[static_cast<size_t>(i)] = fit_[static_cast<size_t>(i)].eval(t);
    xd1[static_cast<size_t>(i)] = dfit_[static_cast<size_t>(i)].eval(t);
    xd2[static_cast<size_t>(i)] = ddfit_[static_cast<size_t>(i)].eval(t);
    xd3[static_cast<size_t>(i)] = d3fit_[static_cast<size_t>(i)].eval(t);
  }
  for (int i = 0; i < 5; ++i) qv[static_cast<size_t>(i)] = ps_.eval(i, t);
  NP<double> r = master_np<double>(xv, xd1, xd2, xd3, qv, 4);
  return -r[static_cast<size_t>(j)];
}

double NormalForm::compute_xj_integral(int j, double xt) const {
  if (std::abs(xt) < kSeriesSwitch) return series_eval(j, xt);
  return half_invsqrt_integral(xt, [&](double t) { return transport_rhs(j, t); });
}

double NormalForm::x2(double xt) const { return compute_xj_integral(2, xt); }
double NormalForm::x3(double xt) const { return compute_xj_integral(3, xt); }
double NormalForm::x4(double xt) const { return compute_xj_integral(4, xt); }

double NormalForm::xj(int j, double xt) const {
  switch (j) {
    case 0: return x0(xt);
    case 1: return x1(xt);
    case 2: return x2(xt);
    case 3: return x3(xt);
    case 4: return x4(xt);
  }
  throw NormalFormError("xj: j out of range");
}

double NormalForm::xj_prime(int j, double xt) const {
  if (j == 0) return x0_prime(xt);
  return dfit_[static_cast<size_t>(j)].eval(xt);
}

double NormalForm::z_of(double xt, double h) const {
  double z = x0(xt);
  double hp = h;
  for (int j = 1; j <= 4; ++j) {
    z += hp * fit_[static_cast<size_t>(j)].eval(xt);
    hp *= h;
  }
  return z;
}

std::complex<double> NormalForm::transformed_solution(double xt, double h) const {
  if (std::abs(xt) > X_) throw NormalFormError("transformed_solution: outside transport grid");
  double z = z_of(xt, h);
  double zp = x0_prime(xt);
  double hp = h;
  for (int j = 1; j <= 4; ++j) {
    zp += hp * dfit_[static_cast<size_t>(j)].eval(xt);
    hp *= h;
  }
  double w = z * std::pow(h, -2.0 / 3.0);
  return {airy_ai(w) / std::sqrt(zp), 0.0};
}

double NormalForm::ode_residual(double xt, double h) const {
  double z = z_of(xt, h);
  double zp = x0_prime(xt), zpp = x0_second(xt), zppp = x0_third(xt);
  double hp = h;
  for (int j = 1; j <= 4; ++j) {
    zp += hp * dfit_[static_cast<size_t>(j)].eval(xt);
    zpp += hp * ddfit_[static_cast<size_t>(j)].eval(xt);
    zppp += hp * d3fit_[static_cast<size_t>(j)].eval(xt);
    hp *= h;
  }
  double s = std::pow(h, -2.0 / 3.0);
  double w = z * s;
  double ai = airy_ai(w), aip = airy_ai_prime(w);
  double P = 1.0 / std::sqrt(zp);
  double Pp = -0.5 * zpp * std::pow(zp, -1.5);
  double Ppp = -0.5 * zppp * std::pow(zp, -1.5) + 0.75 * zpp * zpp * std::pow(zp, -2.5);
  double upp = Ppp * ai + 2.0 * Pp * aip * zp * s + P * (w * ai * zp * zp * s * s + aip * zpp * s);
  double u = P * ai;
  return -h * h * upp + ps_.eval(0, xt) * u;
}

// --------------------------- master residual ---------------------------

namespace {
inline double to_double(__float128 v) { return static_cast<double>(v); }
inline __float128 qabs(__float128 v) { return v < 0 ? -v : v; }

template <class Real>
Real horner(const std::vector<Real>& a, Real t) {
  Real r(0);
  for (size_t i = a.size(); i-- > 0;) r = r * t + a[i];
  return r;
}

template <class Real>
std::vector<Real> vec_derivative(const std::vector<Real>& a) {
  if (a.size() <= 1) return {Real(0)};
  std::vector<Real> r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = Real(double(i)) * a[i];
  return r;
}
}  // namespace

MasterResidualReport master_residual(const PotentialSeries& ps, const std::vector<double>& etas) {
  using Q = __float128;
  const int M = 40;
  TransportSeries<Q> ts = transport_series_quad(ps, M);
  std::array<std::vector<Q>, 5> q;
  for (int j = 0; j < 5; ++j) {
    auto t = ps.taylor(j, M);
    q[static_cast<size_t>(j)].assign(t.begin(), t.end());
  }

  std::vector<double> probes;
  for (double t = -0.25; t <= 0.2501; t += 0.05)
    probes.push_back(std::abs(t) < 1e-9 ? 0.013 : t);

  MasterResidualReport rep;
  rep.eta = etas;
  for (double eta : etas) {
    Q nu = Q(1.0) / Q(eta);
    std::vector<Q> xr(static_cast<size_t>(M + 1), Q(0));
    Q np = Q(1);
    for (int j = 0; j <= 4; ++j) {
      for (size_t i = 0; i < ts.x[static_cast<size_t>(j)].size() && i <= size_t(M); ++i)
        xr[i] += np * ts.x[static_cast<size_t>(j)][i];
      np *= nu;
    }
    auto d1 = vec_derivative(xr);
    auto d2 = vec_derivative(d1);
    auto d3 = vec_derivative(d2);
    double worst = 0.0;
    for (double t : probes) {
      Q T = Q(t);
      Q v = horner(xr, T), p = horner(d1, T), pp = horner(d2, T), ppp = horner(d3, T);
      Q schwarz = ppp / p - Q(1.5) * (pp / p) * (pp / p);
      Q rhs = Q(0);
      Q npow = Q(1);
      for (int j = 0; j <= 4; ++j) {
        rhs += npow * horner(q[static_cast<size_t>(j)], T);
        npow *= nu;
      }
      Q res = p * p * v - Q(0.5) * nu * nu * schwarz - rhs;
      worst = std::max(worst, to_double(qabs(res)));
    }
    rep.residual.push_back(worst);
  }
  std::vector<double> lx, ly;
  for (size_t i = 0; i < etas.size(); ++i) {
    lx.push_back(std::log10(etas[i]));
    ly.push_back(std::log10(std::max(rep.residual[i], 1e-300)));
  }
  rep.slope = fit_slope(lx, ly);
  return rep;
}

// ----------------------------- ansatz check -----------------------------

AnsatzReport ansatz_check(const PotentialSeries& ps, const std::vector<double>& h_list) {
  NormalForm nf(ps);
  const double X = nf.half_width();
  const double x_start = 0.9 * X;
  const double fit_lo = -0.70 * X, fit_hi = -0.35 * X;
  const int n_fit = 64;

  AnsatzReport rep;
  for (double h : h_list) {
    auto rhs = [&](double t, const std::array<double, 2>& y, std::array<double, 2>& d) {
      d[0] = y[1];
      d[1] = ps.eval(0, t) * y[0] / (h * h);
    };
    double q0 = ps.eval(0, x_start);
    double S = 2.0 / 3.0 * std::pow(nf.x0(x_start), 1.5);
    double u0 = std::pow(q0, -0.25) * std::exp(-S / h);
    double q0p = (ps.eval(0, x_start + 1e-6) - ps.eval(0, x_start - 1e-6)) / 2e-6;
    double v0 = (-std::sqrt(q0) / h - q0p / (4.0 * q0)) * u0;

    Dopri5<2> ode(rhs, 1e-12, 1e-14 * u0);
    std::array<double, 2> y{u0, v0};
    double t = x_start;

    std::vector<double> xs(n_fit), us(n_fit);
    for (int i = 0; i < n_fit; ++i) {
      double target = fit_hi + (fit_lo - fit_hi) * i / (n_fit - 1);
      ode.integrate_to(t, y, target);
      xs[static_cast<size_t>(i)] = target;
      us[static_cast<size_t>(i)] = y[0];
    }

    auto fit_with = [&](bool with_h_term, double& phase_err, double& rel_residual) {
      std::vector<double> c1(xs.size()), c2(xs.size());
      for (size_t i = 0; i < xs.size(); ++i) {
        double z = nf.z_of(xs[i], h);
        double w = -z;  // oscillatory side
        auto osc = oscillatory_asymptotics(w, h);
        double R1 = with_h_term ? osc.R1 : 1.0;
        double R2 = with_h_term ? osc.R2 : 0.0;
        double zeta = osc.phase - M_PI / 4.0;
        double zp = nf.x0_prime(xs[i]);
        double hp = h;
        for (int j = 1; j <= 4; ++j) {
          zp += hp * nf.xj_prime(j, xs[i]);
          hp *= h;
        }
        double P = std::pow(w, -0.25) / std::sqrt(zp);
        std::complex<double> A = P * std::complex<double>(-R2, -R1) * std::polar(1.0, zeta);
        c1[i] = 2.0 * A.real();
        c2[i] = -2.0 * A.imag();
      }
      double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0, uu = 0;
      for (size_t i = 0; i < xs.size(); ++i) {
        a11 += c1[i] * c1[i];
        a12 += c1[i] * c2[i];
        a22 += c2[i] * c2[i];
        b1 += c1[i] * us[i];
        b2 += c2[i] * us[i];
        uu += us[i] * us[i];
      }
      double det = a11 * a22 - a12 * a12;
      if (std::abs(det) < 1e-12 * a11 * a22)
        throw NormalFormError("ansatz_check: fit ill-conditioned (branches nearly parallel)");
      double alpha = (b1 * a22 - b2 * a12) / det;
      double beta = (a11 * b2 - a12 * b1) / det;
      double ss = 0;
      for (size_t i = 0; i < xs.size(); ++i) {
        double m = alpha * c1[i] + beta * c2[i];
        ss += (us[i] - m) * (us[i] - m);
      }
      rel_residual = std::sqrt(ss / uu);
      double arg_ratio = 2.0 * std::atan2(beta, alpha);  // arg(c+/c-) for a conjugate pair
      double dev = arg_ratio - M_PI / 2.0;
      while (dev > M_PI) dev -= 2.0 * M_PI;
      while (dev < -M_PI) dev += 2.0 * M_PI;
      phase_err = dev;
    };

    AnsatzEntry e;
    e.h = h;
    double dummy;
    fit_with(true, e.phase_error, e.residual_full);
    fit_with(false, dummy, e.residual_bare);
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace bs
