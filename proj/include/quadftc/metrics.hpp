/**
 * @file metrics.hpp
 * @brief Step-response style metrics on sampled signals.
 *
 *  - rise time: 10% -> 90% of the target, linear interpolation between samples
 *  - overshoot: 100 * (peak - target) / |target|, floored at 0
 *  - settling time: time after which the signal stays inside target +- band*|target|
 *
 * Times are measured from the first sample, so every metric is invariant to a
 * uniform shift of the time axis. `std::nullopt` marks "not reached".
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "quadftc/errors.hpp"

namespace quadftc {

using MetricTime = std::optional<double>;

namespace detail {

inline void check_series(std::span<const double> t, std::span<const double> y) {
  if (t.empty() || t.size() != y.size()) throw DomainError("metrics: time and value series must be non-empty and equal length");
}

/// Time at which `y/target` first reaches `fraction`, interpolated.
inline MetricTime first_crossing(std::span<const double> t, std::span<const double> y, double target, double fraction) {
  const double level = fraction;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double v = y[i] / target;
    if (v >= level) {
      if (i == 0) return t[0];
      const double prev = y[i - 1] / target;
      const double a = (level - prev) / (v - prev);
      return t[i - 1] + a * (t[i] - t[i - 1]);
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline MetricTime rise_time(std::span<const double> t, std::span<const double> y, double target) {
  detail::check_series(t, y);
  if (target == 0.0 || !std::isfinite(target)) throw DomainError("rise_time: target must be finite and non-zero");
  const auto t10 = detail::first_crossing(t, y, target, 0.1);
  const auto t90 = detail::first_crossing(t, y, target, 0.9);
  if (!t10 || !t90) return std::nullopt;
  return *t90 - *t10;
}

/// Percent by which the signal's peak (in the direction of the target) exceeds it.
inline double overshoot(std::span<const double> y, double target) {
  if (y.empty()) throw DomainError("overshoot: empty series");
  if (target == 0.0 || !std::isfinite(target)) throw DomainError("overshoot: target must be finite and non-zero");
  const double dir = target > 0.0 ? 1.0 : -1.0;
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : y) peak = std::max(peak, dir * v);
  return std::max(0.0, 100.0 * (peak - std::abs(target)) / std::abs(target));
}

/// Time (from t[0]) after which |deviation| stays <= tolerance. 0 if it never
/// leaves, nullopt if it is still outside at the last sample.
inline MetricTime last_exit_time(std::span<const double> t, std::span<const double> deviation, double tolerance) {
  detail::check_series(t, deviation);
  std::optional<std::size_t> last_out;
  for (std::size_t i = 0; i < deviation.size(); ++i) {
    if (std::abs(deviation[i]) > tolerance) last_out = i;
  }
  if (!last_out) return 0.0;
  const std::size_t i = *last_out;
  if (i + 1 == deviation.size()) return std::nullopt;
  const double g0 = std::abs(deviation[i]) - tolerance;
  const double g1 = std::abs(deviation[i + 1]) - tolerance;
  const double a = g0 / (g0 - g1);
  return t[i] + a * (t[i + 1] - t[i]) - t[0];
}

inline MetricTime settling_time(std::span<const double> t, std::span<const double> y, double target,
                                double band = 0.02) {
  detail::check_series(t, y);
  if (target == 0.0 || !std::isfinite(target)) throw DomainError("settling_time: target must be finite and non-zero");
  std::vector<double> dev(y.size());
  std::transform(y.begin(), y.end(), dev.begin(), [target](double v) { return v - target; });
  return last_exit_time(t, dev, band * std::abs(target));
}

inline double rms(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double e : v) acc += e * e;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

/// Sum of |u[i+1] - u[i]| over samples with t >= from.
inline double total_variation(std::span<const double> t, std::span<const double> u, double from) {
  detail::check_series(t, u);
  double tv = 0.0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (t[i - 1] >= from) tv += std::abs(u[i] - u[i - 1]);
  }
  return tv;
}

struct ResponseMetrics {
  MetricTime rise_time;
  double overshoot = 0.0;  ///< percent
  MetricTime settling_time;
  double rms_error = 0.0;
  double control_total_variation = 0.0;
  double target = 0.0;      ///< first reference peak, relative to the reference's starting value
  double target_time = 0.0; ///< when that peak occurs (from t[0])
};

/// Index of the first local extremum of `r - r[0]`; the last index if the
/// series is monotone.
inline std::size_t first_peak_index(std::span<const double> r) {
  const double base = r[0];
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const double d = std::abs(r[i] - base);
    if (d > 0.0 && d >= std::abs(r[i - 1] - base) && std::abs(r[i + 1] - base) < d) return i;
  }
  return r.size() - 1;
}

/// Step metrics applied to sinusoid tracking.
///
/// Both series are taken relative to the reference's starting value, and the
/// first reference peak is the "specified value" for rise time and overshoot.
/// Settling is the last time the tracking error leaves band * |peak|. Control
/// total variation covers the second half of the horizon.
inline ResponseMetrics sinusoid_tracking_metrics(std::span<const double> t, std::span<const double> reference,
                                                 std::span<const double> measured, std::span<const double> control,
                                                 double band = 0.02) {
  if (reference.size() != measured.size() || t.size() != measured.size() || control.size() != measured.size()) {
    throw DomainError("sinusoid_tracking_metrics: series lengths differ");
  }
  detail::check_series(t, measured);

  const double base = reference[0];
  const std::size_t peak = first_peak_index(reference);
  ResponseMetrics m;
  m.target = reference[peak] - base;
  m.target_time = t[peak] - t[0];

  std::vector<double> rel(measured.size()), err(measured.size());
  for (std::size_t i = 0; i < measured.size(); ++i) {
    rel[i] = measured[i] - base;
    err[i] = measured[i] - reference[i];
  }
  m.rms_error = rms(err);
  m.control_total_variation = total_variation(t, control, t[0] + 0.5 * (t.back() - t[0]));
  if (m.target == 0.0) {
    // Constant reference: nothing to rise toward. The band is taken on the
    // held value (absolute units when that is zero).
    m.rise_time = 0.0;
    m.overshoot = 0.0;
    m.settling_time = last_exit_time(t, err, band * (base != 0.0 ? std::abs(base) : 1.0));
    return m;
  }
  m.rise_time = quadftc::rise_time(t, rel, m.target);
  m.overshoot = quadftc::overshoot(rel, m.target);
  m.settling_time = last_exit_time(t, err, band * std::abs(m.target));
  return m;
}

}  // namespace quadftc
