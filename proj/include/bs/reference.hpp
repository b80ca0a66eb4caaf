#pragma once
// Reference operator: Weyl quantization of separable symbols
// g(xi) + f(x) xi + V(x) on a periodic Fourier grid, assembled densely
// and diagonalized as ground truth for the BS predictions.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "bs/symbol.hpp"

namespace bs {

class ReferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridOperator {
  int N = 0;
  double L = 0.0;  // box is [-L, L)
  double h = 0.0;
  bool real_symmetric = false;          // f == 0 path
  Eigen::MatrixXd mat_real;             // used when real_symmetric
  Eigen::MatrixXcd mat_cplx;            // otherwise
  double hermiticity_defect = 0.0;      // max |M - M*| before symmetrization

  std::vector<double> grid_x() const;
  // y = M u for a complex vector sampled on the grid.
  std::vector<std::complex<double>> apply(const std::vector<std::complex<double>>& u) const;
};

// Assemble the operator; throws if the symbol carries no separable form.
GridOperator assemble(const SymbolFamily& sym, double h, int N = 1024, double L = 12.0);

struct EigenvalueList {
  std::vector<double> values;        // sorted, <= E_max
  std::vector<double> certificates;  // |E(N) - E(2N)| per value
};

// All eigenvalues <= E_max with a doubling-in-N convergence certificate.
EigenvalueList low_eigenvalues(const SymbolFamily& sym, double h, double E_max, int N = 1024,
                               double L = 12.0, bool certify = true);

// Eigenvalues of an already assembled operator (no certificate).
std::vector<double> eigenvalues_below(const GridOperator& op, double E_max);

}  // namespace bs
