#pragma once
// Chebyshev interpolation on [a, b]: values at the extrema grid, series
// coefficients, Clenshaw evaluation and spectral differentiation.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bs {

struct ChebSeries {
  double a = -1.0, b = 1.0;
  std::vector<double> coeff;

  double eval(double x) const {
    double t = (2.0 * x - (a + b)) / (b - a);
    double b0 = 0.0, b1 = 0.0;
    for (size_t k = coeff.size(); k-- > 1;) {
      double tmp = 2.0 * t * b0 - b1 + coeff[k];
      b1 = b0;
      b0 = tmp;
    }
    return coeff.empty() ? 0.0 : coeff[0] + t * b0 - b1;
  }

  ChebSeries derivative() const {
    ChebSeries d;
    d.a = a;
    d.b = b;
    size_t n = coeff.size();
    d.coeff.assign(n, 0.0);
    if (n < 2) return d;
    // standard recurrence c'_{k-1} = c'_{k+1} + 2k c_k, then scale
    std::vector<double> cp(n + 2, 0.0);
    for (size_t k = n - 1; k >= 1; --k) {
      cp[k - 1] = cp[k + 1] + 2.0 * double(k) * coeff[k];
      if (k == 1) break;
    }
    cp[0] *= 0.5;
    double scale = 2.0 / (b - a);
    for (size_t k = 0; k < n; ++k) d.coeff[k] = cp[k] * scale;
    return d;
  }
};

// Chebyshev extrema nodes x_i = mid + half*cos(pi i/(n-1)), i = 0..n-1,
// returned in increasing order.
inline std::vector<double> cheb_nodes(int n, double a, double b) {
  std::vector<double> x(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double theta = M_PI * double(n - 1 - i) / double(n - 1);
    x[static_cast<size_t>(i)] = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(theta);
  }
  return x;
}

// Fit values given at cheb_nodes(n, a, b) (increasing order).
inline ChebSeries cheb_fit(const std::vector<double>& values, double a, double b) {
  int n = static_cast<int>(values.size());
  if (n < 2) throw std::invalid_argument("cheb_fit: need at least 2 nodes");
  ChebSeries s;
  s.a = a;
  s.b = b;
  s.coeff.assign(static_cast<size_t>(n), 0.0);
  // values reordered to the standard theta ordering (decreasing x)
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double vi = values[static_cast<size_t>(n - 1 - i)];
      double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      acc += wi * vi * std::cos(M_PI * k * i / (n - 1));
    }
    s.coeff[static_cast<size_t>(k)] = 2.0 * acc / (n - 1);
  }
  s.coeff[0] *= 0.5;
  s.coeff[static_cast<size_t>(n - 1)] *= 0.5;
  return s;
}

}  // namespace bs
