/**
 * @file controller.hpp
 * @brief Sliding-mode attitude/altitude controller.
 *
 * Four channels (altitude, roll, pitch, yaw) each carry a sliding surface
 *
 *   s = de/dt + lambda * e,   e = desired - measured
 *
 * and an equivalent control that holds ds/dt = 0 for the nominal model. A
 * switching term drives s to zero; three switching laws are available:
 *
 *   signum-baseline  U = Ueq + sign(s)
 *   continuous-fn    U = Ueq + [(1+s)^n - (1-s)^n] / [(1+s)^n + (1-s)^n]
 *   super-twisting   U = Ueq - 1.5 sqrt(k) |sigma|^(1/2) sign(sigma) - int 1.1 k sign(sigma)
 *
 * The super-twisting law is written on sigma = measured-minus-desired surface
 * (sigma = -s), which is the orientation in which its minus signs stabilize.
 */
#pragma once

#include <array>
#include <cmath>
#include <string_view>

#include "quadftc/dynamics.hpp"
#include "quadftc/errors.hpp"
#include "quadftc/model.hpp"

namespace quadftc {

/// Channel order used for every 4-vector in the controller: matches U1..U4.
enum Channel : std::size_t { kAltitude = 0, kRoll = 1, kPitch = 2, kYaw = 3 };

using ChannelArray = std::array<double, 4>;

enum class ControllerMode { signum_baseline, continuous_fn, super_twisting };

inline std::string_view to_string(ControllerMode m) {
  switch (m) {
    case ControllerMode::signum_baseline: return "signum-baseline";
    case ControllerMode::continuous_fn: return "continuous-fn";
    case ControllerMode::super_twisting: return "super-twisting";
  }
  return "super-twisting";
}

inline bool parse_mode(std::string_view s, ControllerMode& out) {
  for (auto m : {ControllerMode::signum_baseline, ControllerMode::continuous_fn, ControllerMode::super_twisting}) {
    if (s == to_string(m)) {
      out = m;
      return true;
    }
  }
  return false;
}

struct ControllerGains {
  ChannelArray lambda{20.0, 20.0, 20.0, 20.0};  ///< surface slope per channel [1/s]
  /// Super-twisting gains in the units of U1..U4. The torque channels see an
  /// input gain of l/I (roughly 37 to 80), so their gains are much smaller.
  ChannelArray k{2.0, 0.005, 0.005, 0.005};
  int n = 2;  ///< even exponent of the continuous switching function
  ControllerMode mode = ControllerMode::super_twisting;

  bool operator==(const ControllerGains&) const = default;

  static ControllerGains with_shared_lambda(double lambda, ChannelArray k, int n = 2,
                                            ControllerMode mode = ControllerMode::super_twisting) {
    return {{lambda, lambda, lambda, lambda}, k, n, mode};
  }

  void validate() const {
    for (double l : lambda) {
      if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("gains.lambda", "must be finite and > 0");
    }
    static constexpr const char* kKeys[] = {"gains.k1", "gains.k2", "gains.k3", "gains.k4"};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!(k[i] > 0.0) || !std::isfinite(k[i])) throw ConfigError(kKeys[i], "must be finite and > 0");
    }
    if (n < 2 || n % 2 != 0) throw ConfigError("gains.n", "must be an even integer >= 2");
  }
};

/// Desired value and its first two time derivatives for one channel.
struct ChannelReference {
  double value = 0.0;
  double rate = 0.0;
  double accel = 0.0;
};

/// References for all four channels at a single instant, in Channel order.
using ReferencePoint = std::array<ChannelReference, 4>;

/// Super-twisting integral accumulators, one per channel, in units of the channel's U.
struct ControllerState {
  ChannelArray integral{};
  bool operator==(const ControllerState&) const = default;
};

/// sign with sign(0) = 0.
inline double sign(double v) { return (v > 0.0) - (v < 0.0); }

inline ChannelArray measured_values(const SimState& s) { return {s.z, s.phi, s.theta, s.psi}; }
inline ChannelArray measured_rates(const SimState& s) { return {s.zd, s.phid, s.thetad, s.psid}; }

inline ChannelArray sliding_surfaces(const SimState& state, const ReferencePoint& ref, const ChannelArray& lambda) {
  const auto value = measured_values(state);
  const auto rate = measured_rates(state);
  ChannelArray s{};
  for (std::size_t i = 0; i < 4; ++i) {
    const double e = ref[i].value - value[i];
    const double edot = ref[i].rate - rate[i];
    s[i] = edot + lambda[i] * e;
  }
  return s;
}

inline ChannelArray sliding_surfaces(const SimState& state, const ReferencePoint& ref, double lambda) {
  return sliding_surfaces(state, ref, ChannelArray{lambda, lambda, lambda, lambda});
}

/// Lower bound on cos(phi)cos(theta) for the altitude channel.
inline constexpr double kTiltGuard = 1e-3;

/// Input that keeps ds/dt = 0 on every channel for the nominal model. Rotor
/// gyroscopic terms are not compensated.
inline ControlWrench equivalent_control(const SimState& s, const ReferencePoint& ref, const ChannelArray& lambda,
                                        const QuadrotorParams& p) {
  const double tilt = std::cos(s.phi) * std::cos(s.theta);
  if (!(tilt > kTiltGuard)) {
    throw SingularityError("equivalent_control: cos(phi)cos(theta) below guard");
  }
  const double Ix = p.Ix, Iy = p.Iy, Iz = p.Iz, l = p.arm_length;
  const auto& z = ref[kAltitude];
  const auto& phi = ref[kRoll];
  const auto& theta = ref[kPitch];
  const auto& psi = ref[kYaw];

  ControlWrench u;
  u.thrust = p.mass / tilt * (p.gravity + z.accel + lambda[kAltitude] * (z.rate - s.zd));
  u.roll = (Ix / l) * (-s.thetad * s.psid * ((Iy - Iz) / Ix) + phi.accel + lambda[kRoll] * (phi.rate - s.phid));
  // Pitch cross-coupling uses phid*psid while the plant carries psid*thetad;
  // the mismatch is left to the switching term.
  u.pitch = (Iy / l) * (-s.phid * s.psid * ((Iz - Ix) / Iy) + theta.accel + lambda[kPitch] * (theta.rate - s.thetad));
  u.yaw = (Iz / l) * (-s.phid * s.thetad * ((Ix - Iy) / Iz) + psi.accel + lambda[kYaw] * (psi.rate - s.psid));
  return u;
}

inline ControlWrench equivalent_control(const SimState& s, const ReferencePoint& ref, double lambda,
                                        const QuadrotorParams& p) {
  return equivalent_control(s, ref, ChannelArray{lambda, lambda, lambda, lambda}, p);
}

/// Continuous sign replacement; odd in s, exactly +-1 at s = +-1, 0 at s = 0.
inline double smooth_sign(double s, int n) {
  if (n < 2 || n % 2 != 0) throw DomainError("smooth_sign: n must be an even integer >= 2");
  if (s < 0.0) return -smooth_sign(-s, n);
  // For s >= 0, |1 - s| <= 1 + s, so the ratio stays in [0, 1] and never overflows.
  const double r = std::pow((1.0 - s) / (1.0 + s), n);
  return (1.0 - r) / (1.0 + r);
}

struct SuperTwistingStep {
  ChannelArray correction{};
  ControllerState next;
};

/// correction = -1.5 sqrt(k) |s|^(1/2) sign(s) - acc, then acc += 1.1 k sign(s) dt
/// (explicit Euler, independent of the plant integrator's stages).
inline SuperTwistingStep super_twisting_update(const ChannelArray& surfaces, const ChannelArray& k,
                                               const ControllerState& state, double dt) {
  if (!(dt > 0.0)) throw DomainError("super_twisting_update: dt must be > 0");
  SuperTwistingStep out;
  for (std::size_t i = 0; i < 4; ++i) {
    const double s = surfaces[i];
    const double sg = sign(s);
    out.correction[i] = -1.5 * std::sqrt(k[i]) * std::sqrt(std::abs(s)) * sg - state.integral[i];
    out.next.integral[i] = state.integral[i] + 1.1 * k[i] * sg * dt;
  }
  return out;
}

struct ControlOutput {
  ControlWrench wrench;
  ChannelArray surfaces{};  ///< s = de/dt + lambda e, e = desired - measured
  ControllerState next;
};

/// One control evaluation. The integral state only advances in super-twisting mode.
inline ControlOutput control(const SimState& state, const ReferencePoint& ref, const ControllerGains& gains,
                             const ControllerState& cstate, double dt, const QuadrotorParams& p) {
  const ControlWrench ueq = equivalent_control(state, ref, gains.lambda, p);
  const ChannelArray s = sliding_surfaces(state, ref, gains.lambda);

  ChannelArray switching{};
  ControllerState next = cstate;
  switch (gains.mode) {
    case ControllerMode::signum_baseline:
      for (std::size_t i = 0; i < 4; ++i) switching[i] = sign(s[i]);
      break;
    case ControllerMode::continuous_fn:
      for (std::size_t i = 0; i < 4; ++i) switching[i] = smooth_sign(s[i], gains.n);
      break;
    case ControllerMode::super_twisting: {
      const ChannelArray sigma{-s[0], -s[1], -s[2], -s[3]};
      auto st = super_twisting_update(sigma, gains.k, cstate, dt);
      switching = st.correction;
      next = st.next;
      break;
    }
  }

  ControlOutput out;
  out.wrench = {ueq.thrust + switching[0], ueq.roll + switching[1], ueq.pitch + switching[2], ueq.yaw + switching[3]};
  out.surfaces = s;
  out.next = next;
  return out;
}

}  // namespace quadftc
