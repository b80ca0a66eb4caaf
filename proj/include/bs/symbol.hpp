#pragma once
// Semiclassical symbol p(x,xi;h) ~ p0 + h p1 + h^2 p2 with exact partial
// derivatives up to total order 4 (nested jets over the expression AST).

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bs/expr.hpp"

namespace bs {

inline constexpr int kMaxPartialOrder = 4;

// All partials of one p_j at a point: d[a][b] = d^a_x d^b_xi p_j.
struct PartialTable {
  std::array<std::array<double, kMaxPartialOrder + 1>, kMaxPartialOrder + 1> d{};
  double operator()(int a, int b) const { return d[a][b]; }
};

// Separable decomposition g(xi) + f(x)*xi + V(x) used by the reference
// operator.  Orders 1 and 2 contribute x-only potentials.
struct SeparableForm {
  Expr g;   // g(xi); null means absent
  Expr f;   // f(x) multiplying xi; null means absent
  Expr V;   // V0(x)
  Expr V1;  // p1(x), null means 0
  Expr V2;  // p2(x), null means 0
};

class SymbolFamily {
 public:
  std::string name;
  std::array<Expr, 3> p{};  // p0, p1, p2; null slot means identically zero
  double well_lo = -4.0, well_hi = 4.0;
  std::optional<SeparableForm> separable;
  // Test hook: overrides the analytic partials (negative controls).
  std::function<double(int j, double x, double xi, int a, int b)> partial_override;

  bool has(int j) const { return p[static_cast<size_t>(j)] != nullptr; }

  double eval(int j, double x, double xi) const;
  double partial(int j, double x, double xi, int a, int b) const;
  PartialTable partials(int j, double x, double xi) const;

  // First-order gradient of p0, the Hamilton vector field data.
  void grad_p0(double x, double xi, double& px, double& pxi) const;

  SymbolFamily with_p1(const std::string& expr) const;
  SymbolFamily with_p2(const std::string& expr) const;
  SymbolFamily with_p1_expr(Expr e) const;
  SymbolFamily with_p2_expr(Expr e) const;
  SymbolFamily with_well(double lo, double hi) const;
};

// Named constructors for the built-in catalog.
SymbolFamily make_harmonic();
SymbolFamily make_schrodinger(const std::string& V);
SymbolFamily make_tilted(const std::string& f, const std::string& V);
SymbolFamily make_quartic_kinetic(const std::string& V);
SymbolFamily make_harper();

// name in {harmonic, schrodinger, tilted, quartic_kinetic, harper};
// V/f may be empty where the builtin does not need them.
SymbolFamily make_symbol(const std::string& name, const std::string& V, const std::string& f);

struct FdEntry {
  int j, a, b;
  double max_rel_mismatch;
};

struct FdConsistencyReport {
  std::vector<FdEntry> entries;
  double max_rel_mismatch = 0.0;
  // Entries whose mismatch exceeds the flag threshold (1e-2).
  std::vector<FdEntry> flagged;
};

FdConsistencyReport fd_consistency_report(const SymbolFamily& sym, int probes,
                                          unsigned seed = 12345u);

}  // namespace bs
