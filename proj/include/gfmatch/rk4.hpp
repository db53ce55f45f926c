#pragma once

#include <cmath>
#include <cstddef>

#include "gfmatch/errors.hpp"

namespace gfm {

// Largest state vector any model in this project uses (two coupled
// converters plus network branches). Buffers live on the stack.
inline constexpr int kMaxStates = 24;

// One classic fourth-order Runge-Kutta step, x(t) -> x(t + dt), in place.
// F has signature f(double t, const double* x, double* dx).
template <class F>
void rk4_step(F&& f, double t, double dt, double* x, int n) {
  double k1[kMaxStates], k2[kMaxStates], k3[kMaxStates], k4[kMaxStates];
  double tmp[kMaxStates];
  f(t, x, k1);
  for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
  f(t + 0.5 * dt, tmp, k2);
  for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
  f(t + 0.5 * dt, tmp, k3);
  for (int i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
  f(t + dt, tmp, k4);
  const double w = dt / 6.0;
  for (int i = 0; i < n; ++i) {
    x[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

// Divergence guard: integration must never continue through NaNs or
// megavolt-scale excursions that only grow.
inline void check_state_finite(const double* x, int n, double t) {
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || std::abs(x[i]) > 1e9) {
      throw BlowupError("state diverged at t = " + std::to_string(t) +
                        " (component " + std::to_string(i) + ")");
    }
  }
}

}  // namespace gfm
