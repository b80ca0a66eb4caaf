#pragma once
// Bohr-Sommerfeld quantization: roots of S_h(E) = 2 pi n h, and the
// Gram-determinant route det G = -cos^2((A_- - A_+)/2h) whose zeros are
// the same eigenvalue predictions through the independently assembled
// branch-integral phase.

#include <vector>

#include "bs/actions.hpp"
#include "bs/wkb.hpp"

namespace bs {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuantizationEntry {
  long n = 0;        // integer of the condition S_h(E_n) = 2 pi n h
  double E = 0.0;
  double residual = 0.0;  // S_h(E_n) - 2 pi n h
};

struct QuantizationResult {
  double h = 0.0;
  double E_lo = 0.0, E_hi = 0.0;
  std::vector<QuantizationEntry> entries;
};

struct GramRoot {
  long n = 0;  // A_- - A_+ = (2n+1) pi h
  double E = 0.0;
  double det_residual = 0.0;  // det G at the root
};

// Bracketed search on a strictly increasing S_h over [E_lo, E_hi];
// node_hint pins the interpolation grid size (0 = automatic).  Roots are
// polished on direct evaluations to |S_h - 2 pi n h| < 1e-12 scale.
QuantizationResult quantize(const ActionEngine& engine, double h, double E_lo, double E_hi,
                            int node_hint = 0);

// det G(E) for diagnostics.
double gram_det(const WkbEngine& engine, double E, double h);

// Zeros of cos((A_- - A_+)/2h) in [E_lo, E_hi].
std::vector<GramRoot> gram_zero_scan(const WkbEngine& engine, double h, double E_lo, double E_hi,
                                     int node_hint = 0);

}  // namespace bs
