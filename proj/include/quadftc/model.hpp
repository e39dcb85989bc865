/**
 * @file model.hpp
 * @brief Quadrotor physical parameters, body-to-earth rotation and rotor mixing.
 *
 * Mixing map from squared rotor speeds to the control wrench:
 *
 *   [U1]   [ Kf     Kf     Kf     Kf  ] [W1^2]
 *   [U2] = [ 0     -l*Kf   0     l*Kf ] [W2^2]
 *   [U3]   [ l*Kf   0     -l*Kf   0   ] [W3^2]
 *   [U4]   [-Km     Km    -Km     Km  ] [W4^2]
 *
 * U1 = total thrust F, U2..U4 = roll/pitch/yaw torques. Rotor 1 sits on the
 * arm producing positive pitch torque, rotor 4 on the arm producing positive
 * roll torque. The (1,3) and (2,4) pairs spin in opposite directions.
 */
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "quadftc/errors.hpp"

namespace quadftc {

/// Parrot AR Drone 2.0 (indoor hull) constants.
struct QuadrotorParams {
  double mass = 0.429;            ///< [kg]
  double arm_length = 0.1785;     ///< [m]
  double rotor_inertia = 2.03e-5; ///< J_R [kg m^2]
  double Ix = 2.24e-3;            ///< [kg m^2]
  double Iy = 2.98e-3;            ///< [kg m^2]
  double Iz = 4.80e-3;            ///< [kg m^2]
  double thrust_factor = 8.05e-6; ///< Kf [N/(rad/s)^2]
  double torque_factor = 2.42e-7; ///< Km [N m/(rad/s)^2]
  double omega_max = 1047.2;      ///< [rad/s]
  double gravity = 9.81;          ///< [m/s^2]

  bool operator==(const QuadrotorParams&) const = default;

  /// Throws DomainError naming the first field that is not finite and strictly positive.
  void validate() const {
    const std::array<std::pair<const char*, double>, 10> fields{{
        {"mass", mass},
        {"arm_length", arm_length},
        {"rotor_inertia", rotor_inertia},
        {"Ix", Ix},
        {"Iy", Iy},
        {"Iz", Iz},
        {"thrust_factor", thrust_factor},
        {"torque_factor", torque_factor},
        {"omega_max", omega_max},
        {"gravity", gravity},
    }};
    for (const auto& [name, value] : fields) {
      if (!std::isfinite(value) || value <= 0.0) {
        throw DomainError(std::string("QuadrotorParams.") + name + " must be finite and > 0");
      }
    }
  }

  double hover_thrust() const { return mass * gravity; }
  /// Per-rotor speed that balances gravity with all four rotors equal.
  double hover_speed() const { return std::sqrt(mass * gravity / (4.0 * thrust_factor)); }
};

/// Angular speed per rotor [rad/s], rotors indexed 1..4 stored at 0..3.
struct RotorSpeeds {
  std::array<double, 4> omega{};

  double& operator[](std::size_t i) { return omega[i]; }
  double operator[](std::size_t i) const { return omega[i]; }
  bool operator==(const RotorSpeeds&) const = default;

  std::array<double, 4> squared() const {
    return {omega[0] * omega[0], omega[1] * omega[1], omega[2] * omega[2], omega[3] * omega[3]};
  }
};

/// (U1, U2, U3, U4) = (F, T_phi, T_theta, T_psi).
struct ControlWrench {
  double thrust = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  bool operator==(const ControlWrench&) const = default;

  Eigen::Vector4d vector() const { return {thrust, roll, pitch, yaw}; }
  static ControlWrench from_vector(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

  double operator[](std::size_t i) const {
    switch (i) {
      case 0: return thrust;
      case 1: return roll;
      case 2: return pitch;
      default: return yaw;
    }
  }
};

/// Body-to-earth rotation, ZYX composition R = Rz(psi) Ry(theta) Rx(phi).
inline Eigen::Matrix3d rotation_matrix(double phi, double theta, double psi) {
  if (!std::isfinite(phi) || !std::isfinite(theta) || !std::isfinite(psi)) {
    throw DomainError("rotation_matrix: non-finite angle");
  }
  const double cf = std::cos(phi), sf = std::sin(phi);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(psi), sp = std::sin(psi);

  Eigen::Matrix3d R;
  R << ct * cp, sf * st * cp - cf * sp, cf * st * cp + sf * sp,
       ct * sp, sf * st * sp + cf * cp, cf * st * sp - sf * cp,
       -st,     sf * ct,                cf * ct;
  return R;
}

struct RotorLoad {
  double force = 0.0;   ///< [N]
  double moment = 0.0;  ///< [N m]
};

inline RotorLoad rotor_thrust_and_moment(double omega, const QuadrotorParams& p) {
  if (!(omega >= 0.0)) {
    throw DomainError("rotor_thrust_and_moment: omega must be >= 0");
  }
  const double w2 = omega * omega;
  return {p.thrust_factor * w2, p.torque_factor * w2};
}

/// The 4x4 matrix B mapping squared rotor speeds to the wrench.
inline Eigen::Matrix4d mixing_matrix(const QuadrotorParams& p) {
  const double kf = p.thrust_factor;
  const double lkf = p.arm_length * p.thrust_factor;
  const double km = p.torque_factor;
  Eigen::Matrix4d B;
  B << kf,   kf,   kf,   kf,
       0.0, -lkf,  0.0,  lkf,
       lkf,  0.0, -lkf,  0.0,
      -km,   km,  -km,   km;
  return B;
}

/// Pure linear map; no saturation is applied here.
inline ControlWrench mix(const std::array<double, 4>& omega_sq, const QuadrotorParams& p) {
  for (double v : omega_sq) {
    if (!(v >= 0.0)) {
      throw DomainError("mix: squared rotor speed must be >= 0");
    }
  }
  const double kf = p.thrust_factor;
  const double lkf = p.arm_length * p.thrust_factor;
  const double km = p.torque_factor;
  const auto& w = omega_sq;
  return {
      kf * (w[0] + w[1] + w[2] + w[3]),
      lkf * (w[3] - w[1]),
      lkf * (w[0] - w[2]),
      km * (-w[0] + w[1] - w[2] + w[3]),
  };
}

/// 2-norm condition number via SVD.
inline double condition_number(const Eigen::Matrix4d& M) {
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(M);
  const auto& sv = svd.singularValues();
  if (sv[3] == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return sv[0] / sv[3];
}

}  // namespace quadftc
