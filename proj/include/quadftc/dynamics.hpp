#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "quadftc/errors.hpp"
#include "quadftc/model.hpp"

namespace quadftc {

/// 12-state rigid body: earth-frame position, Euler angles, and their rates.
/// Also used as the time derivative of itself.
struct SimState {
  double x = 0.0, y = 0.0, z = 0.0;
  double phi = 0.0, theta = 0.0, psi = 0.0;
  double xd = 0.0, yd = 0.0, zd = 0.0;
  double phid = 0.0, thetad = 0.0, psid = 0.0;

  static constexpr std::size_t size = 12;

  bool operator==(const SimState&) const = default;

  std::array<double, size> to_array() const {
    return {x, y, z, phi, theta, psi, xd, yd, zd, phid, thetad, psid};
  }
  static SimState from_array(const std::array<double, size>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9], a[10], a[11]};
  }

  friend SimState operator+(const SimState& a, const SimState& b) {
    auto va = a.to_array();
    const auto vb = b.to_array();
    for (std::size_t i = 0; i < size; ++i) va[i] += vb[i];
    return from_array(va);
  }
  friend SimState operator*(double s, const SimState& a) {
    auto va = a.to_array();
    for (double& v : va) v *= s;
    return from_array(va);
  }
  friend SimState operator*(const SimState& a, double s) { return s * a; }
  friend SimState operator-(const SimState& a, const SimState& b) { return a + (-1.0) * b; }
};

inline bool is_finite(const SimState& s) {
  const auto v = s.to_array();
  return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

inline double max_abs_difference(const SimState& a, const SimState& b) {
  const auto va = a.to_array();
  const auto vb = b.to_array();
  double m = 0.0;
  for (std::size_t i = 0; i < SimState::size; ++i) m = std::max(m, std::abs(va[i] - vb[i]));
  return m;
}

/// Distance from pi/2 below which |theta| is treated as singular.
inline constexpr double kEulerGuard = 1e-3;

/// How the relative propeller speed Omega_R in the gyroscopic terms is formed.
enum class GyroConvention {
  signed_sum,  ///< Omega_R = -W1 + W2 - W3 + W4 (actual speeds)
  none,        ///< Omega_R = 0
};

inline double relative_rotor_speed(const RotorSpeeds& actual, GyroConvention c) {
  if (c == GyroConvention::none) return 0.0;
  return -actual[0] + actual[1] - actual[2] + actual[3];
}

/// Time derivative of the 12-state model under a held wrench.
///
/// The pitch gyroscopic term is scaled by J_R/Ix rather than J_R/Iy, and the
/// yaw input enters as (l/Iz) U4. Both are deliberate and covered by tests.

inline SimState state_derivative(const SimState& s, const ControlWrench& u, double omega_r,
                                 const QuadrotorParams& p) {
  if (std::abs(s.theta) >= std::numbers::pi / 2.0 - kEulerGuard) {
    throw SingularityError("state_derivative: |theta| within guard of pi/2");
  }
  const double Ix = p.Ix, Iy = p.Iy, Iz = p.Iz;
  const double l = p.arm_length;
  const double jr = p.rotor_inertia;

  SimState d;
  d.x = s.xd;
  d.y = s.yd;
  d.z = s.zd;
  d.phi = s.phid;
  d.theta = s.thetad;
  d.psi = s.psid;

  d.phid = s.psid * s.thetad * ((Iy - Iz) / Ix) + s.thetad * omega_r * jr / Ix + (l / Ix) * u.roll;
  d.thetad = s.psid * s.thetad * ((Iz - Ix) / Iy) + s.phid * omega_r * jr / Ix + (l / Iy) * u.pitch;
  d.psid = s.phid * s.thetad * ((Ix - Iy) / Iz) + (l / Iz) * u.yaw;

  const double cf = std::cos(s.phi), sf = std::sin(s.phi);
  const double ct = std::cos(s.theta), st = std::sin(s.theta);
  const double cp = std::cos(s.psi), sp = std::sin(s.psi);
  const double a = u.thrust / p.mass;
  d.xd = (cf * st * cp + sp * sf) * a;
  d.yd = (cf * st * sp - cp * sf) * a;
  d.zd = (ct * cf) * a - p.gravity;
  return d;
}

// ---------------------------------------------------------------------------
// Actuator faults
// ---------------------------------------------------------------------------

struct FaultEntry {
  int rotor = 4;        ///< 1..4
  double start = 0.0;   ///< [s]
  double loss = 0.0;    ///< loss of effectiveness in [0, 1]

  bool operator==(const FaultEntry&) const = default;
};

/// Multiplicative loss-of-effectiveness faults. An entry stays active from its
/// start time until a later entry on the same rotor supersedes it.
class FaultSchedule {
public:
  FaultSchedule() = default;
  explicit FaultSchedule(std::vector<FaultEntry> entries) : entries_(std::move(entries)) {
    for (const auto& e : entries_) {
      if (e.rotor < 1 || e.rotor > 4) throw DomainError("FaultSchedule: rotor index must be 1..4");
      if (!(e.start >= 0.0) || !std::isfinite(e.start)) {
        throw DomainError("FaultSchedule: start time must be finite and >= 0");
      }
      if (!(e.loss >= 0.0 && e.loss <= 1.0)) throw DomainError("FaultSchedule: loss must be in [0, 1]");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      for (std::size_t j = i + 1; j < entries_.size(); ++j) {
        if (entries_[i].rotor == entries_[j].rotor && entries_[i].start == entries_[j].start) {
          throw DomainError("FaultSchedule: two entries for the same rotor at the same instant");
        }
      }
    }
  }

  const std::vector<FaultEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  bool operator==(const FaultSchedule&) const = default;

  /// Active loss per rotor at time t (0 where no entry has started).
  std::array<double, 4> loss_at(double t) const {
    std::array<double, 4> loss{};
    std::array<double, 4> since{-1.0, -1.0, -1.0, -1.0};
    for (const auto& e : entries_) {
      const auto i = static_cast<std::size_t>(e.rotor - 1);
      if (e.start <= t && e.start >= since[i]) {
        since[i] = e.start;
        loss[i] = e.loss;
      }
    }
    return loss;
  }

private:
  std::vector<FaultEntry> entries_;
};

/// Actual speed = (1 - LE) * commanded on each faulted rotor.
inline RotorSpeeds apply_fault(const RotorSpeeds& commanded, const FaultSchedule& schedule, double t) {
  const auto loss = schedule.loss_at(t);
  RotorSpeeds actual = commanded;
  for (std::size_t i = 0; i < 4; ++i) actual[i] = (1.0 - loss[i]) * commanded[i];
  return actual;
}

}  // namespace quadftc
