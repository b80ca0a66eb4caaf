#pragma once
// Embedded Dormand-Prince 5(4) integrator with step-size control, small
// fixed dimension (orbits are 2-D, the connection check is 2-D as well).

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bs {

template <int Dim>
class Dopri5 {
 public:
  using State = std::array<double, Dim>;
  using Rhs = std::function<void(double t, const State& y, State& dydt)>;

  Dopri5(Rhs rhs, double rel_tol, double abs_tol)
      : rhs_(std::move(rhs)), rel_tol_(rel_tol), abs_tol_(abs_tol) {}

  // Advance from (t, y) exactly to t_end (last step clipped).
  void integrate_to(double& t, State& y, double t_end) {
    if (t_end == t) return;
    double dir = t_end > t ? 1.0 : -1.0;
    if (h_ == 0.0 || (h_ > 0) != (dir > 0)) h_ = dir * initial_step(t, y, dir);
    size_t steps = 0;
    while (dir * (t_end - t) > 1e-15 * std::max(1.0, std::abs(t))) {
      if (++steps > max_steps_) throw std::runtime_error("ode: step budget exhausted");
      double h = h_;
      if (dir * (t + h - t_end) > 0.0) h = t_end - t;
      if (try_step(t, y, h)) continue;
    }
  }

  // Advance by one accepted adaptive step from the current state.
  void step_once(double& t, State& y) {
    if (h_ == 0.0) h_ = initial_step(t, y, 1.0);
    size_t steps = 0;
    for (;;) {
      if (++steps > 64) throw std::runtime_error("ode: repeated step rejection");
      if (try_step(t, y, h_)) return;
    }
  }

  void set_max_steps(size_t n) { max_steps_ = n; }

 private:
  Rhs rhs_;
  double rel_tol_, abs_tol_;
  double h_ = 0.0;
  size_t max_steps_ = 20'000'000;

  double error_norm(const State& y, const State& ynew, const State& err) const {
    double n = 0.0;
    for (int i = 0; i < Dim; ++i) {
      double sc = abs_tol_ + rel_tol_ * std::max(std::abs(y[i]), std::abs(ynew[i]));
      n = std::max(n, std::abs(err[i]) / sc);
    }
    return n;
  }

  double initial_step(double t, const State& y, double dir) const {
    State f{};
    rhs_(t, y, const_cast<State&>(f));
    double dy = 0, df = 0;
    for (int i = 0; i < Dim; ++i) {
      dy = std::max(dy, std::abs(y[i]));
      df = std::max(df, std::abs(f[i]));
    }
    double h = (df > 0) ? 0.01 * std::max(1e-6, dy) / df : 1e-6;
    (void)dir;
    return std::min(h, 0.1);
  }

  // One attempted step; updates t, y and h_ on acceptance, shrinks h_ on
  // rejection.  Returns true when accepted.
  bool try_step(double& t, State& y, double h) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    State k1, k2, k3, k4, k5, k6, k7, tmp, ynew, err;
    rhs_(t, y, k1);
    for (int i = 0; i < Dim; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    rhs_(t + c2 * h, tmp, k2);
    for (int i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs_(t + c3 * h, tmp, k3);
    for (int i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs_(t + c4 * h, tmp, k4);
    for (int i = 0; i < Dim; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs_(t + c5 * h, tmp, k5);
    for (int i = 0; i < Dim; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs_(t + h, tmp, k6);
    for (int i = 0; i < Dim; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs_(t + h, ynew, k7);
    for (int i = 0; i < Dim; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

    double en = error_norm(y, ynew, err);
    if (en <= 1.0) {
      t += h;
      y = ynew;
      double fac = std::clamp(0.9 * std::pow(en > 0 ? en : 1e-10, -0.2), 0.2, 5.0);
      h_ = h * fac;
      return true;
    }
    h_ = h * std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
    return false;
  }
};

}  // namespace bs
