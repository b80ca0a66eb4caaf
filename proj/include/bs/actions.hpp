#pragma once
// Semiclassical action series S0(E), S1(E), S2(E).  Every loop integral
// is taken in the Hamilton time parametrization (smooth periodic
// integrand, periodic trapezoid rule); E-derivatives are central
// differences with one Richardson level.

#include <map>
#include <memory>
#include <mutex>

#include "bs/orbit.hpp"

namespace bs {

struct ActionDiagnostics {
  double T = 0.0;         // period
  double i_delta = 0.0;   // loop of Delta dt
  double i_p1 = 0.0;      // loop of p1 dt
  double i_p1sq = 0.0;    // loop of p1^2 dt
  double i_p2 = 0.0;      // loop of p2 dt
  double i_gamma = 0.0;   // loop of Gamma dt (omega0 restricted to the orbit)
};

struct ActionSeries {
  double E = 0.0;
  double S0 = 0.0, S1 = 0.0, S2 = 0.0;
  ActionDiagnostics diagnostics;

  double value(double h) const { return S0 + h * S1 + h * h * S2; }
};

// Orbit plus the period integrals at one energy, cached and shared.
struct PeriodIntegrals {
  std::shared_ptr<const Orbit> orbit;
  ActionDiagnostics diag;
  double S0 = 0.0;
};

class ActionEngine {
 public:
  explicit ActionEngine(SymbolFamily sym, double orbit_tol = 1e-11)
      : sym_(std::move(sym)), orbit_tol_(orbit_tol), cache_(std::make_shared<Cache>()) {}

  const SymbolFamily& symbol() const { return sym_; }

  const PeriodIntegrals& at(double E) const;
  std::shared_ptr<const Orbit> orbit(double E) const { return at(E).orbit; }

  double s0(double E) const { return at(E).S0; }
  double period(double E) const { return at(E).diag.T; }
  double subprincipal_term(double E) const;  // S1
  // Second-order term in the source convention:
  //   (1/24) d/dE loop Delta dt - loop p2 dt - (1/2) d/dE loop p1^2 dt.
  double s2(double E) const;
  double s2_gamma_form(double E) const;
  // The sign combination the Weyl operator's spectrum actually follows:
  //   -(1/24) d/dE loop Delta dt - loop p2 dt + (1/2) d/dE loop p1^2 dt.
  // Pinned by exactly solvable cases (p0 = xi^2+x^2 with p1 = x has
  // spectrum (2k+1)h - h^2/4; a constant p2 shifts by +h^2) and by the
  // quartic-well operator diagonalization; the transport-route loop
  // integral of T1 reproduces this combination natively.  The
  // quantization condition uses this term.
  double s2_spectral(double E) const;
  ActionSeries action_series(double E) const;
  double action_value(double E, double h) const { return action_series(E).value(h); }
  // S0 + h S1 + h^2 s2_spectral: the left-hand side of the eigenvalue
  // condition spectral_action(E) = 2 pi n h.
  double spectral_action(double E, double h) const;

  void clear_cache() const;
  size_t cache_size() const;

 private:
  struct Cache {
    std::mutex mtx;
    std::map<double, PeriodIntegrals> map;
  };
  SymbolFamily sym_;
  double orbit_tol_;
  std::shared_ptr<Cache> cache_;

  PeriodIntegrals compute(double E) const;
};

}  // namespace bs
