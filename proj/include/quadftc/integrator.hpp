#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "quadftc/errors.hpp"

namespace quadftc {

struct IntegratorConfig {
  double dt = 0.001;   ///< [s]
  double t_end = 10.0; ///< [s]

  bool operator==(const IntegratorConfig&) const = default;

  /// Number of steps of size dt spanning [0, t_end].
  long steps() const { return std::lround(t_end / dt); }

  void validate() const {
    if (!(dt > 0.0) || dt > 0.01) throw ConfigError("integrator.dt", "must satisfy 0 < dt <= 0.01");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("integrator.t_end", "must be finite and > 0");
    const double n = t_end / dt;
    if (std::abs(n - std::round(n)) > 1e-6 * std::max(1.0, n)) {
      throw ConfigError("integrator.t_end", "must be a whole number of dt steps");
    }
  }
};

inline bool is_finite(double v) { return std::isfinite(v); }

/// One classical fourth-order Runge-Kutta step for y' = f(t, y).
///
/// `State` needs `State + State`, `double * State`, and an ADL-visible
/// `is_finite(const State&)`. Throws DivergenceError carrying `t` when any
/// stage or the result stops being finite.
template <typename State, typename Derivative>
State rk4_step(Derivative&& f, const State& y, double t, double dt) {
  if (!(dt > 0.0)) throw DomainError("rk4_step: dt must be > 0");

  auto check = [t](const State& s, const char* where) {
    if (!is_finite(s)) {
      throw DivergenceError(std::string("simulation diverged (") + where + ") at t=" + std::to_string(t), t);
    }
  };

  const double h2 = 0.5 * dt;
  const State k1 = f(t, y);
  check(k1, "k1");
  const State k2 = f(t + h2, y + h2 * k1);
  check(k2, "k2");
  const State k3 = f(t + h2, y + h2 * k2);
  check(k3, "k3");
  const State k4 = f(t + dt, y + dt * k3);
  check(k4, "k4");

  State next = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  check(next, "result");
  return next;
}

}  // namespace quadftc
