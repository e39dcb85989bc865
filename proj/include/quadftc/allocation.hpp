/**
 * @file allocation.hpp
 * @brief Fault-aware control allocation.
 *
 * A rotor with effectiveness k spins at k * commanded, so its squared speed
 * (and therefore its column of the mixing matrix B) is scaled by k^2. The
 * commanded squared speeds solve the square system
 *
 *   B * diag(k1^2, ..., k4^2) * v = u
 *
 * and are clamped to [0, omega_max^2] afterwards. With k = 1 this is the plain
 * inverse of the mixing map.
 *
 * Saturation policies:
 *  - clamp:      clamp each squared speed independently.
 *  - relax_yaw:  first slide the solution along (B E)^-1 e4, the direction that
 *                changes only the yaw torque, by the smallest amount that brings
 *                every rotor inside its range; then clamp whatever is left.
 *  - relax_thrust: the same along (B E)^-1 e1, giving up collective thrust
 *                and keeping all three torques.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "quadftc/errors.hpp"
#include "quadftc/model.hpp"

namespace quadftc {

/// Per-rotor health, k = 1 - LE. 1 is fully functional, 0 is dead.
struct EffectivenessVector {
  std::array<double, 4> k{1.0, 1.0, 1.0, 1.0};

  double& operator[](std::size_t i) { return k[i]; }
  double operator[](std::size_t i) const { return k[i]; }
  bool operator==(const EffectivenessVector&) const = default;
};

/// Condition number of B*E above which allocation is refused.
inline constexpr double kMaxAllocationCondition = 1e8;
/// A rotor counts as usable above this effectiveness.
inline constexpr double kMinUsableEffectiveness = 0.05;

inline double loss_of_effectiveness(double w_desired, double w_actual) {
  if (!(w_desired > 0.0)) throw DomainError("loss_of_effectiveness: desired speed must be > 0");
  return std::clamp((w_desired - w_actual) / w_desired, 0.0, 1.0);
}

/// k_i = 1 - LE_i. Rotors commanded at zero keep their `previous` estimate.
inline EffectivenessVector estimate_effectiveness(const RotorSpeeds& commanded, const RotorSpeeds& measured,
                                                  const EffectivenessVector& previous = {}) {
  EffectivenessVector out = previous;
  for (std::size_t i = 0; i < 4; ++i) {
    if (commanded[i] > 0.0) {
      out[i] = 1.0 - loss_of_effectiveness(commanded[i], measured[i]);
    }
  }
  return out;
}

enum class SaturationPolicy { clamp, relax_yaw, relax_thrust };

inline std::string_view to_string(SaturationPolicy p) {
  switch (p) {
    case SaturationPolicy::clamp: return "clamp";
    case SaturationPolicy::relax_yaw: return "relax-yaw";
    case SaturationPolicy::relax_thrust: return "relax-thrust";
  }
  return "clamp";
}

struct Allocation {
  RotorSpeeds commanded;
  std::array<double, 4> unclamped_sq{};  ///< solution before clamping [(rad/s)^2]
  bool clamped = false;                  ///< any squared speed left [0, omega_max^2]
};

inline Eigen::Matrix4d effective_mixing_matrix(const EffectivenessVector& K, const QuadrotorParams& p) {
  Eigen::Vector4d e;
  for (int i = 0; i < 4; ++i) e[i] = K[static_cast<std::size_t>(i)] * K[static_cast<std::size_t>(i)];
  return mixing_matrix(p) * e.asDiagonal();
}

namespace detail {

/// Smallest |alpha| with 0 <= v + alpha * dir <= hi elementwise; when no such
/// alpha exists, the one that balances the worst violations.
inline double axis_shift(const Eigen::Vector4d& v, const Eigen::Vector4d& dir, double hi) {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    if (dir[i] == 0.0) continue;
    double a = (0.0 - v[i]) / dir[i];
    double b = (hi - v[i]) / dir[i];
    if (a > b) std::swap(a, b);
    lower = std::max(lower, a);
    upper = std::min(upper, b);
  }
  if (lower <= upper) return std::clamp(0.0, lower, upper);
  return 0.5 * (lower + upper);
}

}  // namespace detail

inline Allocation allocate(const ControlWrench& u, const EffectivenessVector& K, const QuadrotorParams& p,
                           SaturationPolicy policy = SaturationPolicy::clamp) {
  const auto v = u.vector();
  if (!v.allFinite()) throw DomainError("allocate: non-finite wrench");

  int usable = 0;
  for (double k : K.k) {
    if (!(k >= 0.0 && k <= 1.0)) throw DomainError("allocate: effectiveness must be in [0, 1]");
    usable += k > kMinUsableEffectiveness ? 1 : 0;
  }
  if (usable < 3) throw AllocationInfeasible("allocate: fewer than 3 usable rotors");

  const Eigen::Matrix4d BE = effective_mixing_matrix(K, p);
  if (!(condition_number(BE) <= kMaxAllocationCondition)) {
    throw AllocationInfeasible("allocate: effectiveness-weighted mixing matrix is ill-conditioned");
  }
  const auto lu = BE.partialPivLu();
  Eigen::Vector4d sq = lu.solve(v);

  Allocation out;
  const double max_sq = p.omega_max * p.omega_max;
  for (std::size_t i = 0; i < 4; ++i) {
    const double raw = sq[static_cast<Eigen::Index>(i)];
    out.unclamped_sq[i] = raw;
    out.clamped = out.clamped || raw < 0.0 || raw > max_sq;
  }
  if (out.clamped && policy != SaturationPolicy::clamp) {
    const Eigen::Vector4d axis = policy == SaturationPolicy::relax_yaw ? Eigen::Vector4d(0.0, 0.0, 0.0, 1.0)
                                                                       : Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
    const Eigen::Vector4d dir = lu.solve(axis);
    sq += detail::axis_shift(sq, dir, max_sq) * dir;
  }
  for (std::size_t i = 0; i < 4; ++i) {
    out.commanded[i] = std::sqrt(std::clamp(sq[static_cast<Eigen::Index>(i)], 0.0, max_sq));
  }
  return out;
}

}  // namespace quadftc
