#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "quadftc/allocation.hpp"
#include "quadftc/controller.hpp"
#include "quadftc/dynamics.hpp"
#include "quadftc/errors.hpp"
#include "quadftc/integrator.hpp"
#include "quadftc/model.hpp"

namespace quadftc {

/// r(t) = offset + A sin(w t + phase), with analytic first and second derivatives.
struct Sinusoid {
  double amplitude = 0.0;
  double frequency = 0.0;  ///< angular frequency [rad/s]
  double phase = 0.0;      ///< [rad]
  double offset = 0.0;

  bool operator==(const Sinusoid&) const = default;

  ChannelReference at(double t) const {
    const double arg = frequency * t + phase;
    const double s = std::sin(arg), c = std::cos(arg);
    return {offset + amplitude * s, amplitude * frequency * c, -amplitude * frequency * frequency * s};
  }
};

inline Sinusoid sinusoid_reference(double amplitude, double frequency, double phase, double offset) {
  if (!(frequency >= 0.0)) throw DomainError("sinusoid_reference: frequency must be >= 0");
  return {amplitude, frequency, phase, offset};
}

/// One sinusoid per channel, in Channel order (altitude, roll, pitch, yaw).
struct ReferenceSet {
  std::array<Sinusoid, 4> channel{};

  bool operator==(const ReferenceSet&) const = default;

  ReferencePoint at(double t) const {
    return {channel[0].at(t), channel[1].at(t), channel[2].at(t), channel[3].at(t)};
  }
};

/// Loop options that are not part of the airframe or the control law.
struct SimulationOptions {
  double detection_delay = 0.0;  ///< latency of the LE measurement [s]
  GyroConvention gyro = GyroConvention::signed_sum;
  SaturationPolicy saturation = SaturationPolicy::clamp;

  bool operator==(const SimulationOptions&) const = default;
};

struct ScenarioConfig {
  QuadrotorParams params;
  ControllerGains gains;
  IntegratorConfig integrator;
  ReferenceSet references;
  FaultSchedule faults;
  SimState initial_state;
  SimulationOptions options;

  bool operator==(const ScenarioConfig&) const = default;

  void validate() const {
    try {
      params.validate();
    } catch (const DomainError& e) {
      throw ConfigError("params", e.what());
    }
    gains.validate();
    integrator.validate();
    static constexpr const char* kNames[] = {"z", "phi", "theta", "psi"};
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& r = references.channel[i];
      const std::string key = std::string("references.") + kNames[i];
      if (!(r.frequency >= 0.0) || !std::isfinite(r.frequency)) throw ConfigError(key + ".frequency", "must be >= 0");
      if (!std::isfinite(r.amplitude)) throw ConfigError(key + ".amplitude", "must be finite");
      if (!std::isfinite(r.phase)) throw ConfigError(key + ".phase", "must be finite");
      if (!std::isfinite(r.offset)) throw ConfigError(key + ".offset", "must be finite");
    }
    if (!is_finite(initial_state)) throw ConfigError("initial_state", "all fields must be finite");
    if (!(options.detection_delay >= 0.0) || !std::isfinite(options.detection_delay)) {
      throw ConfigError("simulation.detection_delay", "must be finite and >= 0");
    }
  }
};

/// At rest, with altitude and attitude equal to the references at t = 0.
inline SimState initial_state_from(const ReferenceSet& refs) {
  SimState s;
  s.z = refs.channel[kAltitude].at(0.0).value;
  s.phi = refs.channel[kRoll].at(0.0).value;
  s.theta = refs.channel[kPitch].at(0.0).value;
  s.psi = refs.channel[kYaw].at(0.0).value;
  return s;
}

/// Reference defaults: 0.5 rad attitude sinusoids, 1 m altitude sinusoid about
/// 2 m, all at 0.5 rad/s, over a 10 s horizon. The vehicle starts at rest on
/// the reference (hovering at 2 m, level).
inline ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.references.channel[kAltitude] = {1.0, 0.5, 0.0, 2.0};
  c.references.channel[kRoll] = {0.5, 0.5, 0.0, 0.0};
  c.references.channel[kPitch] = {0.5, 0.5, 0.0, 0.0};
  c.references.channel[kYaw] = {0.5, 0.5, 0.0, 0.0};
  c.options.saturation = SaturationPolicy::relax_yaw;
  c.initial_state = initial_state_from(c.references);
  return c;
}

struct ScenarioPair {
  ScenarioConfig nominal;
  ScenarioConfig faulted;
};

/// Nominal run and the same run with rotor 4 losing 60% effectiveness from t = 0.
inline ScenarioPair build_comparison_scenarios() {
  ScenarioPair pair{default_scenario(), default_scenario()};
  pair.faulted.faults = FaultSchedule({FaultEntry{4, 0.0, 0.6}});
  return pair;
}

// ---------------------------------------------------------------------------
// Scenario documents (JSON). Every key is optional; unknown keys are rejected.
// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(prefix.empty() ? key : prefix + "." + key, "unknown key");
  }
}

inline void read_number(const json& obj, const std::string& prefix, const char* key, double& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(prefix + "." + key, "expected a number");
  out = v.get<double>();
}

inline void read_int(const json& obj, const std::string& prefix, const char* key, int& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(prefix + "." + key, "expected an integer");
  out = v.get<int>();
}

inline constexpr std::array<const char*, 4> kChannelKeys{"z", "phi", "theta", "psi"};

}  // namespace detail

inline ScenarioConfig parse_scenario(const nlohmann::json& doc) {
  using detail::json;
  using detail::read_number;

  ScenarioConfig c = default_scenario();
  if (doc.is_null()) return c;
  detail::reject_unknown(doc, "",
                         {"params", "gains", "integrator", "references", "faults", "initial_state", "mode", "simulation"});

  if (doc.contains("params")) {
    const auto& p = doc.at("params");
    detail::reject_unknown(p, "params",
                           {"mass", "arm_length", "rotor_inertia", "Ix", "Iy", "Iz", "thrust_factor", "torque_factor",
                            "omega_max", "gravity"});
    auto& q = c.params;
    read_number(p, "params", "mass", q.mass);
    read_number(p, "params", "arm_length", q.arm_length);
    read_number(p, "params", "rotor_inertia", q.rotor_inertia);
    read_number(p, "params", "Ix", q.Ix);
    read_number(p, "params", "Iy", q.Iy);
    read_number(p, "params", "Iz", q.Iz);
    read_number(p, "params", "thrust_factor", q.thrust_factor);
    read_number(p, "params", "torque_factor", q.torque_factor);
    read_number(p, "params", "omega_max", q.omega_max);
    read_number(p, "params", "gravity", q.gravity);
  }

  if (doc.contains("gains")) {
    const auto& g = doc.at("gains");
    detail::reject_unknown(g, "gains", {"lambda", "k1", "k2", "k3", "k4", "n"});
    if (g.contains("lambda")) {
      const auto& l = g.at("lambda");
      if (l.is_number()) {
        c.gains.lambda.fill(l.get<double>());
      } else if (l.is_object()) {
        detail::reject_unknown(l, "gains.lambda", {"z", "phi", "theta", "psi"});
        for (std::size_t i = 0; i < 4; ++i) read_number(l, "gains.lambda", detail::kChannelKeys[i], c.gains.lambda[i]);
      } else {
        throw ConfigError("gains.lambda", "expected a number or a per-channel object");
      }
    }
    read_number(g, "gains", "k1", c.gains.k[0]);
    read_number(g, "gains", "k2", c.gains.k[1]);
    read_number(g, "gains", "k3", c.gains.k[2]);
    read_number(g, "gains", "k4", c.gains.k[3]);
    detail::read_int(g, "gains", "n", c.gains.n);
  }

  if (doc.contains("mode")) {
    const auto& m = doc.at("mode");
    if (!m.is_string() || !parse_mode(m.get<std::string>(), c.gains.mode)) {
      throw ConfigError("mode", "expected one of signum-baseline, continuous-fn, super-twisting");
    }
  }

  if (doc.contains("integrator")) {
    const auto& i = doc.at("integrator");
    detail::reject_unknown(i, "integrator", {"dt", "t_end"});
    read_number(i, "integrator", "dt", c.integrator.dt);
    read_number(i, "integrator", "t_end", c.integrator.t_end);
  }

  if (doc.contains("references")) {
    const auto& r = doc.at("references");
    detail::reject_unknown(r, "references", {"z", "phi", "theta", "psi"});
    for (std::size_t ch = 0; ch < 4; ++ch) {
      const char* name = detail::kChannelKeys[ch];
      if (!r.contains(name)) continue;
      const std::string prefix = std::string("references.") + name;
      const auto& s = r.at(name);
      detail::reject_unknown(s, prefix, {"amplitude", "frequency", "phase", "offset"});
      auto& out = c.references.channel[ch];
      read_number(s, prefix, "amplitude", out.amplitude);
      read_number(s, prefix, "frequency", out.frequency);
      read_number(s, prefix, "phase", out.phase);
      read_number(s, prefix, "offset", out.offset);
    }
  }

  if (doc.contains("faults")) {
    const auto& f = doc.at("faults");
    if (!f.is_array()) throw ConfigError("faults", "expected an array");
    std::vector<FaultEntry> entries;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::string prefix = "faults[" + std::to_string(i) + "]";
      const auto& e = f.at(i);
      detail::reject_unknown(e, prefix, {"rotor", "start", "loss"});
      FaultEntry fe;
      detail::read_int(e, prefix, "rotor", fe.rotor);
      read_number(e, prefix, "start", fe.start);
      read_number(e, prefix, "loss", fe.loss);
      entries.push_back(fe);
    }
    try {
      c.faults = FaultSchedule(std::move(entries));
    } catch (const DomainError& e) {
      throw ConfigError("faults", e.what());
    }
  }

  // Unless overridden key by key, the vehicle starts at rest on the references.
  c.initial_state = initial_state_from(c.references);
  if (doc.contains("initial_state")) {
    const auto& s = doc.at("initial_state");
    detail::reject_unknown(s, "initial_state",
                           {"x", "y", "z", "phi", "theta", "psi", "xd", "yd", "zd", "phid", "thetad", "psid"});
    auto& st = c.initial_state;
    const std::string p = "initial_state";
    read_number(s, p, "x", st.x);
    read_number(s, p, "y", st.y);
    read_number(s, p, "z", st.z);
    read_number(s, p, "phi", st.phi);
    read_number(s, p, "theta", st.theta);
    read_number(s, p, "psi", st.psi);
    read_number(s, p, "xd", st.xd);
    read_number(s, p, "yd", st.yd);
    read_number(s, p, "zd", st.zd);
    read_number(s, p, "phid", st.phid);
    read_number(s, p, "thetad", st.thetad);
    read_number(s, p, "psid", st.psid);
  }

  if (doc.contains("simulation")) {
    const auto& s = doc.at("simulation");
    detail::reject_unknown(s, "simulation", {"detection_delay", "gyroscopic", "saturation"});
    read_number(s, "simulation", "detection_delay", c.options.detection_delay);
    if (s.contains("gyroscopic")) {
      const auto& g = s.at("gyroscopic");
      if (!g.is_boolean()) throw ConfigError("simulation.gyroscopic", "expected a boolean");
      c.options.gyro = g.get<bool>() ? GyroConvention::signed_sum : GyroConvention::none;
    }
    if (s.contains("saturation")) {
      const auto& v = s.at("saturation");
      if (v.is_string() && v.get<std::string>() == "clamp") {
        c.options.saturation = SaturationPolicy::clamp;
      } else if (v.is_string() && v.get<std::string>() == "relax-yaw") {
        c.options.saturation = SaturationPolicy::relax_yaw;
      } else if (v.is_string() && v.get<std::string>() == "relax-thrust") {
        c.options.saturation = SaturationPolicy::relax_thrust;
      } else {
        throw ConfigError("simulation.saturation", "expected clamp, relax-yaw or relax-thrust");
      }
    }
  }

  c.validate();
  return c;
}

/// Parses a scenario document. Empty or whitespace-only text is the default scenario.
inline ScenarioConfig parse_scenario_text(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return parse_scenario(nlohmann::json());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  return parse_scenario(doc);
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

inline nlohmann::json serialize_scenario(const ScenarioConfig& c) {
  using nlohmann::json;
  json doc;
  const auto& p = c.params;
  doc["params"] = {{"mass", p.mass},
                   {"arm_length", p.arm_length},
                   {"rotor_inertia", p.rotor_inertia},
                   {"Ix", p.Ix},
                   {"Iy", p.Iy},
                   {"Iz", p.Iz},
                   {"thrust_factor", p.thrust_factor},
                   {"torque_factor", p.torque_factor},
                   {"omega_max", p.omega_max},
                   {"gravity", p.gravity}};

  const auto& l = c.gains.lambda;
  json lambda;
  if (l[0] == l[1] && l[0] == l[2] && l[0] == l[3]) {
    lambda = l[0];
  } else {
    lambda = {{"z", l[0]}, {"phi", l[1]}, {"theta", l[2]}, {"psi", l[3]}};
  }
  doc["gains"] = {{"lambda", lambda},
                  {"k1", c.gains.k[0]},
                  {"k2", c.gains.k[1]},
                  {"k3", c.gains.k[2]},
                  {"k4", c.gains.k[3]},
                  {"n", c.gains.n}};
  doc["mode"] = std::string(to_string(c.gains.mode));
  doc["integrator"] = {{"dt", c.integrator.dt}, {"t_end", c.integrator.t_end}};

  json refs = json::object();
  for (std::size_t ch = 0; ch < 4; ++ch) {
    const auto& r = c.references.channel[ch];
    refs[detail::kChannelKeys[ch]] = {
        {"amplitude", r.amplitude}, {"frequency", r.frequency}, {"phase", r.phase}, {"offset", r.offset}};
  }
  doc["references"] = refs;

  json faults = json::array();
  for (const auto& e : c.faults.entries()) faults.push_back({{"rotor", e.rotor}, {"start", e.start}, {"loss", e.loss}});
  doc["faults"] = faults;

  const auto& s = c.initial_state;
  doc["initial_state"] = {{"x", s.x},       {"y", s.y},     {"z", s.z},       {"phi", s.phi},
                          {"theta", s.theta}, {"psi", s.psi}, {"xd", s.xd},     {"yd", s.yd},
                          {"zd", s.zd},     {"phid", s.phid}, {"thetad", s.thetad}, {"psid", s.psid}};
  doc["simulation"] = {{"detection_delay", c.options.detection_delay},
                       {"gyroscopic", c.options.gyro == GyroConvention::signed_sum},
                       {"saturation", std::string(to_string(c.options.saturation))}};
  return doc;
}

}  // namespace quadftc
