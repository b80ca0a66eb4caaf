#include "bs/reference.hpp"

#include <cmath>

namespace bs {

namespace {

// Circulant kernel c_m = (1/N) sum_k mult(h kappa_k) e^{i kappa_k m dx},
// the position-space row of a Fourier multiplier on the periodic grid.
std::vector<std::complex<double>> multiplier_kernel(const std::function<double(double)>& mult,
                                                    int N, double L, double h,
                                                    bool zero_nyquist) {
  std::vector<std::complex<double>> c(static_cast<size_t>(N));
  const double dx = 2.0 * L / N;
  for (int m = 0; m < N; ++m) {
    std::complex<double> acc{0.0, 0.0};
    for (int k = -N / 2; k < N / 2; ++k) {
      if (zero_nyquist && k == -N / 2) continue;
      double kappa = M_PI * k / L;
      acc += mult(h * kappa) * std::polar(1.0, kappa * m * dx);
    }
    c[static_cast<size_t>(m)] = acc / double(N);
  }
  return c;
}

}  // namespace

std::vector<double> GridOperator::grid_x() const {
  std::vector<double> x(static_cast<size_t>(N));
  for (int j = 0; j < N; ++j) x[static_cast<size_t>(j)] = -L + 2.0 * L * j / N;
  return x;
}

std::vector<std::complex<double>> GridOperator::apply(
    const std::vector<std::complex<double>>& u) const {
  if (static_cast<int>(u.size()) != N) throw ReferenceError("apply: size mismatch");
  Eigen::VectorXcd v(N);
  for (int i = 0; i < N; ++i) v(i) = u[static_cast<size_t>(i)];
  Eigen::VectorXcd y = real_symmetric ? Eigen::VectorXcd(mat_real * v)
                                      : Eigen::VectorXcd(mat_cplx * v);
  std::vector<std::complex<double>> out(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i) out[static_cast<size_t>(i)] = y(i);
  return out;
}

GridOperator assemble(const SymbolFamily& sym, double h, int N, double L) {
  if (!sym.separable)
    throw ReferenceError("symbol is not separable (g(xi) + f(x) xi + V(x)); no reference operator");
  if (N < 8 || N % 2 != 0) throw ReferenceError("grid size must be even and at least 8");
  const SeparableForm& sep = *sym.separable;

  GridOperator op;
  op.N = N;
  op.L = L;
  op.h = h;

  auto g_mult = [&](double xi) { return sep.g ? expr_eval(sep.g, 0.0, xi) : 0.0; };
  auto kernel_g = multiplier_kernel(g_mult, N, L, h, false);

  bool has_f = static_cast<bool>(sep.f);
  std::vector<std::complex<double>> kernel_d;
  if (has_f) kernel_d = multiplier_kernel([](double xi) { return xi; }, N, L, h, true);

  std::vector<double> x = op.grid_x();
  auto Vtot = [&](double xx) {
    double v = sep.V ? expr_eval(sep.V, xx, 0.0) : 0.0;
    if (sep.V1) v += h * expr_eval(sep.V1, xx, 0.0);
    if (sep.V2) v += h * h * expr_eval(sep.V2, xx, 0.0);
    return v;
  };

  Eigen::MatrixXcd M(N, N);
  for (int j = 0; j < N; ++j) {
    for (int l = 0; l < N; ++l) {
      int m = j - l;
      if (m < 0) m += N;
      std::complex<double> v = kernel_g[static_cast<size_t>(m)];
      if (has_f) {
        double fj = expr_eval(sep.f, x[static_cast<size_t>(j)], 0.0);
        double fl = expr_eval(sep.f, x[static_cast<size_t>(l)], 0.0);
        v += 0.5 * (fj + fl) * kernel_d[static_cast<size_t>(m)];
      }
      M(j, l) = v;
    }
    M(j, j) += Vtot(x[static_cast<size_t>(j)]);
  }

  op.hermiticity_defect = (M - M.adjoint()).cwiseAbs().maxCoeff();
  M = 0.5 * (M + M.adjoint()).eval();

  double max_imag = M.imag().cwiseAbs().maxCoeff();
  if (!has_f && max_imag < 1e-13) {
    op.real_symmetric = true;
    op.mat_real = M.real();
    op.mat_real = 0.5 * (op.mat_real + op.mat_real.transpose()).eval();
  } else {
    op.mat_cplx = std::move(M);
  }
  return op;
}

std::vector<double> eigenvalues_below(const GridOperator& op, double E_max) {
  Eigen::VectorXd ev;
  if (op.real_symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.mat_real,
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw ReferenceError("eigensolver failed to converge");
    ev = solver.eigenvalues();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.mat_cplx,
                                                           Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw ReferenceError("eigensolver failed to converge");
    ev = solver.eigenvalues();
  }
  std::vector<double> out;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) <= E_max) out.push_back(ev(i));
  return out;
}

EigenvalueList low_eigenvalues(const SymbolFamily& sym, double h, double E_max, int N, double L,
                               bool certify) {
  EigenvalueList list;
  list.values = eigenvalues_below(assemble(sym, h, N, L), E_max);
  if (!certify) {
    list.certificates.assign(list.values.size(), 0.0);
    return list;
  }
  std::vector<double> fine = eigenvalues_below(assemble(sym, h, 2 * N, L), E_max);
  list.certificates.resize(list.values.size(), 0.0);
  for (size_t i = 0; i < list.values.size(); ++i) {
    double cert = (i < fine.size()) ? std::abs(list.values[i] - fine[i])
                                    : std::numeric_limits<double>::infinity();
    list.certificates[i] = cert;
    if (i < fine.size()) list.values[i] = fine[i];  // report the finer value
  }
  return list;
}

}  // namespace bs
