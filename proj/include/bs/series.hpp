#pragma once
// Truncated Taylor series (jets) with a nestable coefficient ring.
//
// Series<double, N> is a degree-N jet in one variable; nesting the
// coefficient type, Series<Series<double, N>, M>, gives a bivariate jet
// from which all mixed partials up to (M, N) fall out exactly.  All the
// elementary functions the expression grammar supports are provided via
// the standard power-series recurrences, so derivatives carry no
// finite-difference error.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>

namespace bs {

template <class T>
struct scalar_ops {
  static T zero() { return T(0); }
  static T one() { return T(1); }
};

template <class T, int N>
class Series {
 public:
  static_assert(N >= 1, "jet order must be at least 1");
  std::array<T, N + 1> c{};

  Series() {
    for (auto& v : c) v = T(0);
  }
  explicit Series(const T& value) : Series() { c[0] = value; }
  // Lift a plain scalar through however many nesting levels there are.
  template <class U = T>
    requires(!std::is_same_v<U, double>)
  explicit Series(double v) : Series() {
    c[0] = T(v);
  }
  Series(const T& value, const T& slope) : Series() {
    c[0] = value;
    c[1] = slope;
  }

  // Jet of the independent variable itself, centered at `value`.
  static Series variable(const T& value) { return Series(value, T(1)); }
  static Series constant(const T& value) { return Series(value); }

  const T& operator[](int k) const { return c[static_cast<size_t>(k)]; }
  T& operator[](int k) { return c[static_cast<size_t>(k)]; }

  Series operator-() const {
    Series r;
    for (int k = 0; k <= N; ++k) r.c[k] = -c[k];
    return r;
  }
  friend Series operator+(const Series& a, const Series& b) {
    Series r;
    for (int k = 0; k <= N; ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
  }
  friend Series operator-(const Series& a, const Series& b) {
    Series r;
    for (int k = 0; k <= N; ++k) r.c[k] = a.c[k] - b.c[k];
    return r;
  }
  friend Series operator*(const Series& a, const Series& b) {
    Series r;
    for (int i = 0; i <= N; ++i)
      for (int j = 0; i + j <= N; ++j) r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
    return r;
  }
  friend Series operator/(const Series& a, const Series& b) {
    Series q;
    for (int n = 0; n <= N; ++n) {
      T acc = a.c[n];
      for (int k = 0; k < n; ++k) acc = acc - q.c[k] * b.c[n - k];
      q.c[n] = acc / b.c[0];
    }
    return q;
  }

  friend Series operator+(const Series& a, double s) { return a + constant(T(s)); }
  friend Series operator+(double s, const Series& a) { return a + constant(T(s)); }
  friend Series operator-(const Series& a, double s) { return a - constant(T(s)); }
  friend Series operator-(double s, const Series& a) { return constant(T(s)) - a; }
  friend Series operator*(const Series& a, double s) {
    Series r;
    for (int k = 0; k <= N; ++k) r.c[k] = a.c[k] * s;
    return r;
  }
  friend Series operator*(double s, const Series& a) { return a * s; }
  friend Series operator/(const Series& a, double s) { return a * (1.0 / s); }
  friend Series operator/(double s, const Series& a) { return constant(T(s)) / a; }
};

// Elementary functions.  Each recurrence reduces to the same function on
// the coefficient ring, so nesting terminates at double.

template <class T, int N>
Series<T, N> exp(const Series<T, N>& u) {
  using std::exp;
  Series<T, N> e;
  e.c[0] = exp(u.c[0]);
  for (int n = 1; n <= N; ++n) {
    T acc = T(0);
    for (int k = 1; k <= n; ++k) acc = acc + double(k) * u.c[k] * e.c[n - k];
    e.c[n] = acc / double(n);
  }
  return e;
}

template <class T, int N>
Series<T, N> log(const Series<T, N>& u) {
  using std::log;
  Series<T, N> l;
  l.c[0] = log(u.c[0]);
  for (int n = 1; n <= N; ++n) {
    T acc = double(n) * u.c[n];
    for (int k = 1; k < n; ++k) acc = acc - double(k) * l.c[k] * u.c[n - k];
    l.c[n] = acc / (double(n) * u.c[0]);
  }
  return l;
}

template <class T, int N>
void sincos(const Series<T, N>& u, Series<T, N>& s, Series<T, N>& c) {
  using std::cos;
  using std::sin;
  s.c[0] = sin(u.c[0]);
  c.c[0] = cos(u.c[0]);
  for (int n = 1; n <= N; ++n) {
    T sa = T(0), ca = T(0);
    for (int k = 1; k <= n; ++k) {
      sa = sa + double(k) * u.c[k] * c.c[n - k];
      ca = ca + double(k) * u.c[k] * s.c[n - k];
    }
    s.c[n] = sa / double(n);
    c.c[n] = T(0) - ca / double(n);
  }
}

template <class T, int N>
Series<T, N> sin(const Series<T, N>& u) {
  Series<T, N> s, c;
  sincos(u, s, c);
  return s;
}

template <class T, int N>
Series<T, N> cos(const Series<T, N>& u) {
  Series<T, N> s, c;
  sincos(u, s, c);
  return c;
}

// Integer power by repeated multiplication (valid for any base).
template <class T, int N>
Series<T, N> powi(const Series<T, N>& u, long long e) {
  if (e < 0) return Series<T, N>::constant(T(1)) / powi(u, -e);
  Series<T, N> r = Series<T, N>::constant(T(1));
  Series<T, N> b = u;
  while (e > 0) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

// Real power via the differential recurrence; requires u[0] > 0 when the
// leading coefficient is a plain double (checked by the caller).
template <class T, int N>
Series<T, N> pow(const Series<T, N>& u, double r) {
  using std::pow;
  Series<T, N> p;
  p.c[0] = pow(u.c[0], r);
  for (int n = 1; n <= N; ++n) {
    T acc = T(0);
    for (int k = 1; k <= n; ++k)
      acc = acc + ((r + 1.0) * double(k) - double(n)) * u.c[k] * p.c[n - k];
    p.c[n] = acc / (double(n) * u.c[0]);
  }
  return p;
}

// Leading (constant) coefficient all the way down a nest of jets.
inline double jet_value(double x) { return x; }
template <class T, int N>
double jet_value(const Series<T, N>& s) {
  return jet_value(s.c[0]);
}

// d/dt of the series in its own variable (coefficient shift).
template <class T, int N>
Series<T, N> series_derivative(const Series<T, N>& s) {
  Series<T, N> d;
  for (int k = 1; k <= N; ++k) d.c[k - 1] = double(k) * s.c[k];
  return d;
}

}  // namespace bs
