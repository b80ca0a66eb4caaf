#include "bs/symbol.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace bs {

namespace {

using Jet2 = Series<Series<double, kMaxPartialOrder>, kMaxPartialOrder>;

Jet2 jet2_x(double x0) {
  Jet2 j;
  j.c[0] = Series<double, kMaxPartialOrder>::constant(x0);
  j.c[1] = Series<double, kMaxPartialOrder>::constant(1.0);
  return j;
}

Jet2 jet2_xi(double xi0) {
  Jet2 j;
  j.c[0] = Series<double, kMaxPartialOrder>::variable(xi0);
  return j;
}

double factorial(int n) {
  static const double f[] = {1, 1, 2, 6, 24};
  return f[n];
}

void check_order(int j, int a, int b) {
  if (j < 0 || j > 2) throw std::invalid_argument("symbol: order index must be 0, 1 or 2");
  if (a < 0 || b < 0 || a + b > kMaxPartialOrder)
    throw std::invalid_argument("symbol: derivative order exceeds 4");
}

}  // namespace

double SymbolFamily::eval(int j, double x, double xi) const {
  check_order(j, 0, 0);
  const Expr& e = p[static_cast<size_t>(j)];
  if (!e) return 0.0;
  return expr_eval(e, x, xi);
}

PartialTable SymbolFamily::partials(int j, double x, double xi) const {
  check_order(j, 0, 0);
  PartialTable t;
  const Expr& e = p[static_cast<size_t>(j)];
  if (!e) return t;
  Jet2 r = expr_eval(e, jet2_x(x), jet2_xi(xi));
  for (int a = 0; a <= kMaxPartialOrder; ++a)
    for (int b = 0; a + b <= kMaxPartialOrder; ++b)
      t.d[a][b] = r.c[a].c[b] * factorial(a) * factorial(b);
  return t;
}

double SymbolFamily::partial(int j, double x, double xi, int a, int b) const {
  check_order(j, a, b);
  if (partial_override) return partial_override(j, x, xi, a, b);
  const Expr& e = p[static_cast<size_t>(j)];
  if (!e) return 0.0;
  if (a == 0 && b == 0) return expr_eval(e, x, xi);
  return partials(j, x, xi)(a, b);
}

void SymbolFamily::grad_p0(double x, double xi, double& px, double& pxi) const {
  using Jet = Series<Series<double, 1>, 1>;
  Jet jx, jxi;
  jx.c[0] = Series<double, 1>::constant(x);
  jx.c[1] = Series<double, 1>::constant(1.0);
  jxi.c[0] = Series<double, 1>::variable(xi);
  Jet r = expr_eval(p[0], jx, jxi);
  px = r.c[1].c[0];
  pxi = r.c[0].c[1];
}

SymbolFamily SymbolFamily::with_p1(const std::string& expr) const {
  return with_p1_expr(parse_expression(expr));
}
SymbolFamily SymbolFamily::with_p2(const std::string& expr) const {
  return with_p2_expr(parse_expression(expr));
}
SymbolFamily SymbolFamily::with_p1_expr(Expr e) const {
  SymbolFamily s = *this;
  s.p[1] = e;
  if (s.separable) {
    if (expr_depends_on_xi(e))
      s.separable.reset();
    else
      s.separable->V1 = e;
  }
  return s;
}
SymbolFamily SymbolFamily::with_p2_expr(Expr e) const {
  SymbolFamily s = *this;
  s.p[2] = e;
  if (s.separable) {
    if (expr_depends_on_xi(e))
      s.separable.reset();
    else
      s.separable->V2 = e;
  }
  return s;
}
SymbolFamily SymbolFamily::with_well(double lo, double hi) const {
  SymbolFamily s = *this;
  s.well_lo = lo;
  s.well_hi = hi;
  return s;
}

SymbolFamily make_harmonic() {
  SymbolFamily s;
  s.name = "harmonic";
  s.p[0] = parse_expression("xi^2 + x^2");
  s.well_lo = -6.0;
  s.well_hi = 6.0;
  SeparableForm sep;
  sep.g = parse_expression("xi^2");
  sep.V = parse_expression("x^2");
  s.separable = sep;
  return s;
}

SymbolFamily make_schrodinger(const std::string& V) {
  if (V.empty()) throw std::invalid_argument("schrodinger symbol needs a potential expression");
  Expr Ve = parse_expression(V);
  if (expr_depends_on_xi(Ve)) throw std::invalid_argument("potential must not depend on xi");
  SymbolFamily s;
  s.name = "schrodinger(" + V + ")";
  s.p[0] = expr_add(expr_pow(expr_var_xi(), expr_num(2)), Ve);
  SeparableForm sep;
  sep.g = parse_expression("xi^2");
  sep.V = Ve;
  s.separable = sep;
  return s;
}

SymbolFamily make_tilted(const std::string& f, const std::string& V) {
  if (f.empty() || V.empty()) throw std::invalid_argument("tilted symbol needs f and V expressions");
  Expr fe = parse_expression(f);
  Expr Ve = parse_expression(V);
  if (expr_depends_on_xi(fe) || expr_depends_on_xi(Ve))
    throw std::invalid_argument("f and V must not depend on xi");
  SymbolFamily s;
  s.name = "tilted(" + f + "," + V + ")";
  s.p[0] = expr_add(expr_pow(expr_var_xi(), expr_num(2)),
                    expr_add(expr_mul(fe, expr_var_xi()), Ve));
  SeparableForm sep;
  sep.g = parse_expression("xi^2");
  sep.f = fe;
  sep.V = Ve;
  s.separable = sep;
  return s;
}

SymbolFamily make_quartic_kinetic(const std::string& V) {
  if (V.empty()) throw std::invalid_argument("quartic_kinetic symbol needs a potential expression");
  Expr Ve = parse_expression(V);
  if (expr_depends_on_xi(Ve)) throw std::invalid_argument("potential must not depend on xi");
  SymbolFamily s;
  s.name = "quartic_kinetic(" + V + ")";
  s.p[0] = expr_add(expr_pow(expr_var_xi(), expr_num(4)), Ve);
  SeparableForm sep;
  sep.g = parse_expression("xi^4");
  sep.V = Ve;
  s.separable = sep;
  return s;
}

SymbolFamily make_harper() {
  SymbolFamily s;
  s.name = "harper";
  s.p[0] = parse_expression("cos(xi) + cos(x)");
  s.well_lo = -3.1;
  s.well_hi = 3.1;
  SeparableForm sep;
  sep.g = parse_expression("cos(xi)");
  sep.V = parse_expression("cos(x)");
  s.separable = sep;
  return s;
}

SymbolFamily make_symbol(const std::string& name, const std::string& V, const std::string& f) {
  if (name == "harmonic") return make_harmonic();
  if (name == "schrodinger") return make_schrodinger(V);
  if (name == "tilted") return make_tilted(f, V);
  if (name == "quartic_kinetic") return make_quartic_kinetic(V);
  if (name == "harper") return make_harper();
  throw std::invalid_argument("unknown symbol '" + name + "'");
}

namespace {

// Central finite-difference stencils (offsets in units of the step).
// Orders 1-2 use the second-order 3/5-point forms with one Richardson
// level at the 1e-4 step; orders 3-4 switch to fourth-order-accurate
// 7-point stencils at a wider step, since at 1e-4 the h^-3 and h^-4
// roundoff amplification swamps double precision entirely.
struct Stencil {
  std::vector<double> offsets;
  std::vector<double> weights;  // divided by step^order by the caller
};

const Stencil& stencil_lo(int order) {
  static const std::vector<Stencil> table = {
      {{0}, {1}},
      {{-1, 1}, {-0.5, 0.5}},
      {{-1, 0, 1}, {1, -2, 1}},
  };
  return table[static_cast<size_t>(order)];
}

const Stencil& stencil_hi(int order) {
  static const std::vector<Stencil> table = {
      {{0}, {1}},
      {{-2, -1, 1, 2}, {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12}},
      {{-2, -1, 0, 1, 2}, {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12}},
      {{-3, -2, -1, 1, 2, 3}, {1.0 / 8, -1.0, 13.0 / 8, -13.0 / 8, 1.0, -1.0 / 8}},
      {{-3, -2, -1, 0, 1, 2, 3},
       {-1.0 / 6, 2.0, -6.5, 28.0 / 3, -6.5, 2.0, -1.0 / 6}},
  };
  return table[static_cast<size_t>(order)];
}

double fd_tensor(const SymbolFamily& sym, int j, double x, double xi, const Stencil& sa,
                 const Stencil& sb, int a, int b, double step) {
  double acc = 0.0;
  for (size_t i = 0; i < sa.offsets.size(); ++i)
    for (size_t k = 0; k < sb.offsets.size(); ++k)
      acc += sa.weights[i] * sb.weights[k] *
             sym.eval(j, x + sa.offsets[i] * step, xi + sb.offsets[k] * step);
  return acc / std::pow(step, a + b);
}

double fd_partial(const SymbolFamily& sym, int j, double x, double xi, int a, int b) {
  int tot = a + b;
  if (tot <= 2) {
    double step = 1e-4 * (1.0 + std::abs(x) + std::abs(xi));
    auto once = [&](double h) {
      return fd_tensor(sym, j, x, xi, stencil_lo(a), stencil_lo(b), a, b, h);
    };
    return (4.0 * once(0.5 * step) - once(step)) / 3.0;
  }
  // step balances truncation against |p|-scaled roundoff
  double mag = std::max(1.0, std::abs(sym.eval(j, x, xi)));
  double step = 0.02 * std::pow(mag, 0.125);
  return fd_tensor(sym, j, x, xi, stencil_hi(a), stencil_hi(b), a, b, step);
}

}  // namespace

FdConsistencyReport fd_consistency_report(const SymbolFamily& sym, int probes, unsigned seed) {
  if (probes < 1) throw std::invalid_argument("fd_consistency_report: probes must be >= 1");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ux(sym.well_lo, sym.well_hi);
  std::uniform_real_distribution<double> uxi(-2.0, 2.0);

  std::vector<std::pair<double, double>> points(static_cast<size_t>(probes));
  for (auto& pt : points) pt = {ux(rng), uxi(rng)};

  FdConsistencyReport rep;
  for (int j = 0; j < 3; ++j) {
    if (!sym.has(j) && !sym.partial_override) continue;
    for (int a = 0; a <= kMaxPartialOrder; ++a) {
      for (int b = 0; a + b <= kMaxPartialOrder; ++b) {
        if (a == 0 && b == 0) continue;
        double worst = 0.0;
        for (const auto& [x, xi] : points) {
          double an = sym.partial(j, x, xi, a, b);
          double fd = fd_partial(sym, j, x, xi, a, b);
          double rel = std::abs(fd - an) / std::max(1.0, std::abs(an));
          worst = std::max(worst, rel);
        }
        FdEntry e{j, a, b, worst};
        rep.entries.push_back(e);
        rep.max_rel_mismatch = std::max(rep.max_rel_mismatch, worst);
        if (worst > 1e-2) rep.flagged.push_back(e);
      }
    }
  }
  return rep;
}

}  // namespace bs
