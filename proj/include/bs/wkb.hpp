#pragma once
// Pointwise WKB machinery: branch phases, transport amplitudes b0 and
// b1 = (C1 + D1)|beta0|^{-1/2}e^{-i int p1/beta0}, the order-h^2 density
// T1, the normalization constants, and the A_pm phase data consumed by
// the Gram-determinant route.
//
// Quantities that the formulas normalize at a focal point are divergent
// there for generic symbols (D1 grows like |beta0|^{-3} at a simple
// focal point); those base values are taken in the finite-part sense:
// the inset-parameter family is extrapolated against the half-integer
// and integer powers of the inset and the delta^0 coefficient is kept.

#include <complex>
#include <map>
#include <memory>
#include <mutex>

#include "bs/actions.hpp"
#include "bs/orbit.hpp"

namespace bs {

using Complex = std::complex<double>;

enum class FocalBase { a, a_prime };  // a = right focal point, a' = left

struct NormalizationConstants {
  double C0 = M_SQRT1_2;
  double C1_a = 0.0;
  double C1_aprime = 0.0;
};

// Raw A_pm diagnostics per (2.37)-style assembly, evaluated with the
// divergent bracket terms frozen at a documented inset from the focal
// points (they have no finite limit on their own).
struct ApmResult {
  double A_plus = 0.0, A_minus = 0.0;
  double h_linear_plus = 0.0, h_linear_minus = 0.0;  // coefficient of h
  double inset = 0.0;                                // inset used for the h^2 block
};

struct WkbBranch {
  FocalBase base = FocalBase::a;
  int branch = +1;  // sign of d_xi p0 along this branch
  std::vector<double> x;
  std::vector<double> phase;  // S_rho(x_base, x; h) including the -h int p1/beta0 part
  std::vector<Complex> b0;
  std::vector<Complex> b1;
  Complex maslov{1.0, 0.0};
};

class WkbEngine {
 public:
  explicit WkbEngine(SymbolFamily sym);
  ~WkbEngine();

  const SymbolFamily& symbol() const { return sym_; }
  const ActionEngine& actions() const { return actions_; }

  // xi on the branch, beta0 and phi'' along it.
  double xi_branch(double E, double x, int branch) const;
  double beta0(double E, double x, int branch) const;
  double phi_pp(double E, double x, int branch) const;

  // Phase S_rho(x_base, x; h) per (2.11)/(2.27).
  double phase(double E, FocalBase base, int branch, double x, double h) const;

  // Leading amplitude b0 (2.5).
  Complex amplitude_b0(double E, int branch, double x) const;

  // Order-h^2 density T1 (2.19) along a branch.
  double t1(double E, int branch, double y) const;

  // D1 with the finite-part base normalization D1(x_base) = 0.
  Complex d1(double E, FocalBase base, int branch, double x) const;

  NormalizationConstants normalization(double E) const;

  // Full u^a / u^{a'} per (2.28), both branches with Maslov factors.
  Complex wkb_eval(double E, FocalBase base, double h, double x) const;

  WkbBranch build_branch(double E, FocalBase base, int branch, double h, int n = 201) const;

  // Raw A_pm at a fixed inset (diagnostics only; see ApmResult).
  ApmResult a_pm(double E, double h) const;

  // Regularized A_minus - A_plus: the quantity the Gram route consumes.
  // Reconstructed purely from x-parametrized branch integrals:
  //   S0_x - h * (loop p1 dt)_x + h^2 * Im loop Omega1_x  (all finite parts).
  double a_pm_difference(double E, double h) const;

  // The three h-independent ingredients of a_pm_difference.
  double s0_x(double E) const;
  double loop_p1_x(double E) const;
  double im_loop_omega1_x(double E) const;

  std::shared_ptr<const Orbit> orbit(double E) const { return actions_.orbit(E); }

 private:
  SymbolFamily sym_;
  ActionEngine actions_;

  struct BranchTable;
  struct Local;
  struct Frame {
    std::shared_ptr<const Orbit> orbit;
    std::shared_ptr<const BranchTable> table;
  };
  struct BranchKey {
    double E;
    int base;
    int branch;
    bool operator<(const BranchKey& o) const {
      if (E != o.E) return E < o.E;
      if (base != o.base) return base < o.base;
      return branch < o.branch;
    }
  };
  struct EnergyAux {
    std::shared_ptr<const Orbit> orbit;
    std::shared_ptr<const BranchTable> table;
    double s0x = 0, ip1x = 0, ip2x = 0, im_omega1 = 0;
    bool have_loops = false;
    double phase_const_aprime = 0;
    bool have_phase_const = false;
  };
  mutable std::mutex mtx_;
  mutable std::map<double, EnergyAux> aux_;
  mutable std::map<BranchKey, Complex> d1_base_fp_;  // finite-part base values

  void ensure_tables(double E) const;
  void ensure_loops(double E) const;
  const EnergyAux& aux_ro(double E) const;
  Frame frame(double E) const;
  double xi_on_branch(const Frame& f, double x, int branch) const;
  Local local(const Frame& f, int branch, double y) const;
  double t1_local(const Local& L) const;
  double bracket_local(const Local& L) const;
  double im_d1_prime_local(const Local& L) const;
  double re_d1_content_local(const Local& L) const;
  double phase_const(double E, FocalBase base) const;
  double base_x(const Orbit& orb, FocalBase base) const {
    return base == FocalBase::a ? orb.focal_right.x : orb.focal_left.x;
  }
  Complex d1_base_value(double E, FocalBase base, int branch) const;
  int focal_multiplicity(const FocalPoint& fp) const;
  double loop_t1_side_fp(const Frame& f, double xb, int dir, int m) const;
};

}  // namespace bs
