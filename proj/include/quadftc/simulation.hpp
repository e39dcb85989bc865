/**
 * @file simulation.hpp
 * @brief Closed loop: reference -> controller -> allocation -> faulted rotors -> plant.
 *
 * The controller runs once per integration step and its wrench is held
 * constant across the RK4 stages. Loss of effectiveness is measured on the
 * previous step's commands with an optional detection delay.
 */
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "quadftc/allocation.hpp"
#include "quadftc/controller.hpp"
#include "quadftc/dynamics.hpp"
#include "quadftc/integrator.hpp"
#include "quadftc/model.hpp"
#include "quadftc/scenario.hpp"

namespace quadftc {

/// Everything observable at one integration step.
struct TelemetryRecord {
  double t = 0.0;
  SimState state;
  ControlWrench wrench;          ///< controller output U1..U4
  RotorSpeeds commanded;         ///< allocator output
  RotorSpeeds actual;            ///< after the fault
  ChannelArray surfaces{};       ///< s_z, s_phi, s_theta, s_psi
  EffectivenessVector effectiveness;
  bool clamped = false;

  bool operator==(const TelemetryRecord&) const = default;
};

using Telemetry = std::vector<TelemetryRecord>;

inline void check_attitude(const SimState& s, double t) {
  const double limit = std::numbers::pi / 2.0 - kEulerGuard;
  if (std::abs(s.phi) >= limit || std::abs(s.theta) >= limit) {
    throw DivergenceError("simulation diverged (Euler singularity) at t=" + std::to_string(t), t);
  }
}

/// Runs the scenario over [0, t_end] and returns one record per step
/// (t_end / dt + 1 records). Throws DivergenceError (carrying the time) or
/// AllocationInfeasible on numerical failure.
inline Telemetry simulate(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto& p = cfg.params;
  const double dt = cfg.integrator.dt;
  const long n = cfg.integrator.steps();

  Telemetry out;
  out.reserve(static_cast<std::size_t>(n) + 1);

  SimState state = cfg.initial_state;
  ControllerState cstate;
  EffectivenessVector K;
  const double hover = p.hover_speed();
  RotorSpeeds probe{{hover, hover, hover, hover}};

  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    try {
      const ReferencePoint ref = cfg.references.at(t);
      const ControlOutput ctl = control(state, ref, cfg.gains, cstate, dt, p);

      const RotorSpeeds measured = apply_fault(probe, cfg.faults, t - cfg.options.detection_delay);
      K = estimate_effectiveness(probe, measured, K);

      const Allocation alloc = allocate(ctl.wrench, K, p, cfg.options.saturation);
      const RotorSpeeds actual = apply_fault(alloc.commanded, cfg.faults, t);
      const ControlWrench achieved = mix(actual.squared(), p);
      const double omega_r = relative_rotor_speed(actual, cfg.options.gyro);

      out.push_back({t, state, ctl.wrench, alloc.commanded, actual, ctl.surfaces, K, alloc.clamped});
      if (k == n) break;

      state = rk4_step(
          [&](double, const SimState& y) { return state_derivative(y, achieved, omega_r, p); }, state, t, dt);
      check_attitude(state, t + dt);
      cstate = ctl.next;
      for (std::size_t i = 0; i < 4; ++i) {
        if (alloc.commanded[i] > 0.0) probe[i] = alloc.commanded[i];
      }
    } catch (const SingularityError& e) {
      // Reaching the Euler guard means the attitude has left the valid range.
      throw DivergenceError(std::string(e.what()) + " (t=" + std::to_string(t) + ")", t);
    } catch (const AllocationInfeasible& e) {
      throw AllocationInfeasible(std::string(e.what()) + " (t=" + std::to_string(t) + ")");
    } catch (const DomainError& e) {
      throw DivergenceError(std::string(e.what()) + " (t=" + std::to_string(t) + ")", t);
    }
  }
  return out;
}

}  // namespace quadftc
