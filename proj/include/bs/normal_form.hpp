#pragma once
// Reduction of -h^2 d^2/dx^2 + Q(x; h) to the Airy operator near a
// simple zero of Q0: the coordinate hierarchy x0..x4, the transformed
// solution, the master-equation residual, and the connection-phase
// (Maslov) check.

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "bs/cheb.hpp"
#include "bs/expr.hpp"

namespace bs {

class NormalFormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PotentialSeries {
  std::array<Expr, 5> Q{};  // Q0..Q4; null slot = identically zero

  static PotentialSeries from_strings(const std::string& q0, const std::string& q1 = "",
                                      const std::string& q2 = "", const std::string& q3 = "",
                                      const std::string& q4 = "");
  bool has(int j) const { return Q[static_cast<size_t>(j)] != nullptr; }
  double eval(int j, double x) const;
  // Taylor coefficients of Q_j at 0 up to the requested degree.
  std::vector<double> taylor(int j, int degree) const;
  // checks Q0(0) = 0, Q0'(0) = 1 within 1e-12
  void validate() const;
};

// Taylor solution of the transport hierarchy at the turning point,
// templated over the working precision.
template <class Real>
struct TransportSeries {
  std::array<std::vector<Real>, 5> x;  // coefficients of x0..x4
};

TransportSeries<double> transport_series(const PotentialSeries& ps, int degree);
TransportSeries<__float128> transport_series_quad(const PotentialSeries& ps, int degree);

class NormalForm {
 public:
  explicit NormalForm(PotentialSeries ps, double X = 0.8, int grid_n = 129);

  double half_width() const { return X_; }
  const PotentialSeries& potential() const { return ps_; }

  double x0(double xt) const;
  double x1(double xt) const;
  double x2(double xt) const;
  double x3(double xt) const;
  double x4(double xt) const;
  double xj(int j, double xt) const;

  double x0_prime(double xt) const;
  // d x_j / d x~ from the fitted grid series (j = 1..4)
  double xj_prime(int j, double xt) const;

  // Taylor coefficients of x_j at the turning point (double precision).
  const std::vector<double>& taylor(int j) const {
    return series_.x[static_cast<size_t>(j)];
  }

  // z(x~; h) = x0 + x1 h + ... + x4 h^4 and the transformed solution
  // (3.19) evaluated through it.
  double z_of(double xt, double h) const;
  std::complex<double> transformed_solution(double xt, double h) const;

  // residual of (-h^2 d2/dx~2 + Q0) applied to the transformed solution,
  // using analytic Airy derivatives and grid derivatives of the data
  double ode_residual(double xt, double h) const;

 private:
  PotentialSeries ps_;
  double X_;
  int n_;
  TransportSeries<double> series_;
  std::array<ChebSeries, 5> fit_;     // grids of x0..x4
  std::array<ChebSeries, 5> dfit_;    // first derivatives
  std::array<ChebSeries, 5> ddfit_;   // second derivatives
  std::array<ChebSeries, 5> d3fit_;   // third derivatives

  double series_eval(int j, double xt) const;
  double quad_x0(double xt) const;
  double x0_second(double xt) const;
  double x0_third(double xt) const;
  double d_dx_q(int j, double xt, int order) const;
  double schwarz_x0(double xt) const;
  double half_invsqrt_integral(double xt, const std::function<double(double)>& w) const;
  double transport_rhs(int j, double t) const;
  double compute_xj_integral(int j, double xt) const;
};

struct MasterResidualReport {
  std::vector<double> eta;
  std::vector<double> residual;  // max over the probe points
  double slope = 0.0;            // d log10(residual) / d log10(eta)
};

// Residual of the master equation with x~r truncated at eta^{-4},
// evaluated from the quad-precision Taylor hierarchy (the eta^{-5}
// remainder at eta = 1e4 sits far below double cancellation noise).
MasterResidualReport master_residual(const PotentialSeries& ps,
                                     const std::vector<double>& etas);

struct AnsatzEntry {
  double h = 0.0;
  double phase_error = 0.0;     // arg(c+/c-) - pi/2 from the full model
  double residual_full = 0.0;   // relative fit residual, full amplitudes
  double residual_bare = 0.0;   // same with the 5/48 h-term removed
};

struct AnsatzReport {
  std::vector<AnsatzEntry> entries;
};

// Connection check per Ansatz: ODE solution from decaying data fitted to
// the two-branch oscillatory form.
AnsatzReport ansatz_check(const PotentialSeries& ps, const std::vector<double>& h_list);

}  // namespace bs
