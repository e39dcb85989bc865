#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "quadftc/errors.hpp"
#include "quadftc/simulation.hpp"

namespace quadftc {

inline constexpr std::string_view kTelemetryVersionLine = "# quadftc-telemetry v1";

inline constexpr std::array<std::string_view, 34> kTelemetryColumns{
    "t",     "x",       "y",       "z",     "phi",  "theta", "psi", "xd",  "yd",  "zd",  "phid", "thetad",
    "psid",  "U1",      "U2",      "U3",    "U4",   "w1c",   "w2c", "w3c", "w4c", "w1a", "w2a",  "w3a",
    "w4a",   "s_z",     "s_phi",   "s_theta", "s_psi", "k1", "k2",  "k3",  "k4",  "clamped"};

inline std::string telemetry_header() {
  std::string h;
  for (std::size_t i = 0; i < kTelemetryColumns.size(); ++i) {
    if (i) h += ',';
    h += kTelemetryColumns[i];
  }
  return h;
}

namespace detail {

inline void append_number(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace detail

inline std::vector<double> record_fields(const TelemetryRecord& r) {
  std::vector<double> f;
  f.reserve(kTelemetryColumns.size());
  f.push_back(r.t);
  for (double v : r.state.to_array()) f.push_back(v);
  for (std::size_t i = 0; i < 4; ++i) f.push_back(r.wrench[i]);
  for (double v : r.commanded.omega) f.push_back(v);
  for (double v : r.actual.omega) f.push_back(v);
  for (double v : r.surfaces) f.push_back(v);
  for (double v : r.effectiveness.k) f.push_back(v);
  f.push_back(r.clamped ? 1.0 : 0.0);
  return f;
}

inline void write_telemetry(std::ostream& os, const Telemetry& tel) {
  std::string line;
  os << kTelemetryVersionLine << '\n' << telemetry_header() << '\n';
  for (const auto& r : tel) {
    line.clear();
    const auto f = record_fields(r);
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
      if (i) line += ',';
      detail::append_number(line, f[i]);
    }
    line += r.clamped ? ",1" : ",0";
    os << line << '\n';
  }
}

inline void write_telemetry_file(const std::string& path, const Telemetry& tel) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("<output>", "cannot open " + path + " for writing");
  write_telemetry(os, tel);
  if (!os) throw ConfigError("<output>", "write failed for " + path);
}

/// Column-oriented view of a telemetry file.
class TelemetryTable {
public:
  const std::vector<double>& column(std::string_view name) const {
    for (std::size_t i = 0; i < kTelemetryColumns.size(); ++i) {
      if (kTelemetryColumns[i] == name) return columns_[i];
    }
    throw ConfigError(std::string(name), "no such telemetry column");
  }
  std::size_t rows() const { return columns_[0].size(); }

  static TelemetryTable parse(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || strip_cr(line) != kTelemetryVersionLine) {
      throw ConfigError("<telemetry>", "missing or unsupported version line (expected '" +
                                           std::string(kTelemetryVersionLine) + "')");
    }
    if (!std::getline(is, line)) throw ConfigError("<telemetry>", "missing header line");
    const auto header = split(strip_cr(line));
    std::string missing;
    for (auto col : kTelemetryColumns) {
      bool found = false;
      for (const auto& h : header) found = found || h == col;
      if (!found) missing += (missing.empty() ? "" : ", ") + std::string(col);
    }
    if (!missing.empty()) throw ConfigError("<telemetry>", "missing columns: " + missing);
    if (header.size() != kTelemetryColumns.size()) throw ConfigError("<telemetry>", "unexpected extra columns");
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] != kTelemetryColumns[i]) throw ConfigError("<telemetry>", "columns out of order at " + header[i]);
    }

    TelemetryTable t;
    std::size_t lineno = 2;
    while (std::getline(is, line)) {
      ++lineno;
      const std::string_view row = strip_cr(line);
      if (row.empty()) continue;
      const auto cells = split(row);
      if (cells.size() != kTelemetryColumns.size()) {
        throw ConfigError("<telemetry>", "line " + std::to_string(lineno) + ": wrong number of fields");
      }
      for (std::size_t i = 0; i < cells.size(); ++i) {
        double v = 0.0;
        const auto* b = cells[i].data();
        const auto res = std::from_chars(b, b + cells[i].size(), v);
        if (res.ec != std::errc() || res.ptr != b + cells[i].size()) {
          throw ConfigError("<telemetry>", "line " + std::to_string(lineno) + ": bad number '" + cells[i] + "'");
        }
        t.columns_[i].push_back(v);
      }
    }
    if (t.rows() == 0) throw ConfigError("<telemetry>", "no data rows");
    return t;
  }

  static TelemetryTable load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("<telemetry>", "cannot open " + path);
    return parse(in);
  }

  static TelemetryTable from_records(const Telemetry& tel) {
    std::stringstream ss;
    write_telemetry(ss, tel);
    return parse(ss);
  }

private:
  std::array<std::vector<double>, kTelemetryColumns.size()> columns_;

  static std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
  }
  static std::vector<std::string> split(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      const auto pos = s.find(',', start);
      out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return out;
  }
};

}  // namespace quadftc
