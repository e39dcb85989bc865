#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "quadftc/controller.hpp"
#include "quadftc/metrics.hpp"
#include "quadftc/scenario.hpp"
#include "quadftc/telemetry.hpp"

namespace quadftc {

struct ChannelReport {
  std::string_view name;
  Channel channel;
  ResponseMetrics metrics;
};

/// Row order of the time-response tables: roll, pitch, yaw, altitude.
using MetricTable = std::array<ChannelReport, 4>;

inline constexpr std::array<std::pair<std::string_view, Channel>, 4> kReportRows{{
    {"roll", kRoll},
    {"pitch", kPitch},
    {"yaw", kYaw},
    {"altitude", kAltitude},
}};

inline MetricTable analyze(const TelemetryTable& tel, const ReferenceSet& refs, double band = 0.02) {
  static constexpr std::array<std::string_view, 4> kState{"z", "phi", "theta", "psi"};
  static constexpr std::array<std::string_view, 4> kInput{"U1", "U2", "U3", "U4"};
  const auto& t = tel.column("t");

  MetricTable table;
  for (std::size_t row = 0; row < 4; ++row) {
    const auto [name, ch] = kReportRows[row];
    std::vector<double> ref(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) ref[i] = refs.channel[ch].at(t[i]).value;
    table[row] = {name, ch,
                  sinusoid_tracking_metrics(t, ref, tel.column(kState[ch]), tel.column(kInput[ch]), band)};
  }
  return table;
}

inline nlohmann::json metric_time_json(const MetricTime& m) {
  if (m) return *m;
  return "not-reached";
}

inline nlohmann::json to_json(const MetricTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table) {
    rows.push_back({{"channel", std::string(r.name)},
                    {"rise_time", metric_time_json(r.metrics.rise_time)},
                    {"overshoot", r.metrics.overshoot},
                    {"settling_time", metric_time_json(r.metrics.settling_time)},
                    {"rms_error", r.metrics.rms_error},
                    {"control_total_variation", r.metrics.control_total_variation}});
  }
  return rows;
}

inline std::string format_time(const MetricTime& m) {
  if (!m) return "n/r";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *m);
  return buf;
}

inline std::string format_table(const MetricTable& table, std::string_view title) {
  std::string out(title);
  out += '\n';
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %12s %14s %18s %12s %14s\n", "Reference", "Rise time(s)", "Overshoot(%)",
                "Settling time(s)", "RMS error", "Control TV");
  out += buf;
  for (const auto& r : table) {
    std::snprintf(buf, sizeof buf, "%-10s %12s %14.3f %18s %12.3e %14.4g\n", std::string(r.name).c_str(),
                  format_time(r.metrics.rise_time).c_str(), r.metrics.overshoot,
                  format_time(r.metrics.settling_time).c_str(), r.metrics.rms_error,
                  r.metrics.control_total_variation);
    out += buf;
  }
  return out;
}

/// Two tables side by side: overshoot and settling for each.
inline std::string format_comparison(const MetricTable& nominal, const MetricTable& faulted) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s | %10s %10s %10s | %10s %10s %10s\n", "", "nominal", "", "", "faulted", "",
                "");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-10s | %10s %10s %10s | %10s %10s %10s\n", "Reference", "rise(s)", "OS(%)",
                "settle(s)", "rise(s)", "OS(%)", "settle(s)");
  out += buf;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = nominal[i].metrics;
    const auto& b = faulted[i].metrics;
    std::snprintf(buf, sizeof buf, "%-10s | %10s %10.3f %10s | %10s %10.3f %10s\n", std::string(nominal[i].name).c_str(),
                  format_time(a.rise_time).c_str(), a.overshoot, format_time(a.settling_time).c_str(),
                  format_time(b.rise_time).c_str(), b.overshoot, format_time(b.settling_time).c_str());
    out += buf;
  }
  return out;
}

}  // namespace quadftc
