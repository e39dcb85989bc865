/**
 * @file experiments.hpp
 * @brief Batch runs: the nominal/faulted comparison and the gain sweep.
 *
 * Independent simulations run on worker threads. Each job owns its config and
 * its output slot, so results come back ordered by job index regardless of
 * which thread finished first.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "quadftc/errors.hpp"
#include "quadftc/report.hpp"
#include "quadftc/scenario.hpp"
#include "quadftc/simulation.hpp"
#include "quadftc/telemetry.hpp"

namespace quadftc {

/// Calls job(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any job is rethrown after all workers have joined.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        if (!failed.exchange(true)) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct RunResult {
  Telemetry telemetry;
  MetricTable metrics;
};

inline RunResult run_and_analyze(const ScenarioConfig& cfg, double band = 0.02) {
  RunResult r;
  r.telemetry = simulate(cfg);
  r.metrics = analyze(TelemetryTable::from_records(r.telemetry), cfg.references, band);
  return r;
}

struct ComparisonResult {
  RunResult nominal;
  RunResult faulted;
};

inline ComparisonResult run_comparison(const ScenarioPair& pair, double band = 0.02, unsigned threads = 2) {
  ComparisonResult out;
  parallel_for(2, threads, [&](std::size_t i) {
    if (i == 0) {
      out.nominal = run_and_analyze(pair.nominal, band);
    } else {
      out.faulted = run_and_analyze(pair.faulted, band);
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Gain sweep
// ---------------------------------------------------------------------------

/// Candidate values per gain. An empty axis keeps the base config's value.
/// `lambda` sets all four slopes at once; `lambda_z` etc. override one channel.
struct GainGrid {
  std::vector<double> lambda;
  std::array<std::vector<double>, 4> lambda_channel;
  std::array<std::vector<double>, 4> k;
  std::vector<int> n;

  std::vector<ControllerGains> expand(const ControllerGains& base) const {
    std::vector<ControllerGains> out{base};
    auto product = [&out](std::size_t size, const std::function<void(ControllerGains&, std::size_t)>& set) {
      if (size == 0) return;
      std::vector<ControllerGains> next;
      next.reserve(out.size() * size);
      for (const auto& g : out) {
        for (std::size_t j = 0; j < size; ++j) {
          next.push_back(g);
          set(next.back(), j);
        }
      }
      out = std::move(next);
    };
    product(lambda.size(), [this](ControllerGains& g, std::size_t j) { g.lambda.fill(lambda[j]); });
    for (std::size_t c = 0; c < 4; ++c) {
      const auto& axis = lambda_channel[c];
      product(axis.size(), [&axis, c](ControllerGains& g, std::size_t j) { g.lambda[c] = axis[j]; });
    }
    for (std::size_t c = 0; c < 4; ++c) {
      const auto& axis = k[c];
      product(axis.size(), [&axis, c](ControllerGains& g, std::size_t j) { g.k[c] = axis[j]; });
    }
    product(n.size(), [this](ControllerGains& g, std::size_t j) { g.n = n[j]; });
    return out;
  }
};

inline GainGrid parse_grid(const nlohmann::json& doc) {
  detail::reject_unknown(doc, "",
                         {"lambda", "lambda_z", "lambda_phi", "lambda_theta", "lambda_psi", "k1", "k2", "k3", "k4", "n"});
  auto numbers = [&doc](const char* key) {
    std::vector<double> v;
    if (!doc.contains(key)) return v;
    const auto& a = doc.at(key);
    if (!a.is_array()) throw ConfigError(key, "expected an array of numbers");
    for (const auto& x : a) {
      if (!x.is_number()) throw ConfigError(key, "expected an array of numbers");
      v.push_back(x.get<double>());
    }
    return v;
  };
  GainGrid g;
  g.lambda = numbers("lambda");
  g.lambda_channel = {numbers("lambda_z"), numbers("lambda_phi"), numbers("lambda_theta"), numbers("lambda_psi")};
  g.k = {numbers("k1"), numbers("k2"), numbers("k3"), numbers("k4")};
  for (double v : numbers("n")) {
    if (v != std::floor(v)) throw ConfigError("n", "expected integers");
    g.n.push_back(static_cast<int>(v));
  }
  return g;
}

struct SweepRow {
  std::size_t index = 0;
  ControllerGains gains;
  std::string status;  ///< "ok", "invalid", or "diverged"
  double objective = std::numeric_limits<double>::infinity();
  MetricTable metrics{};
};

/// Lower is better: summed overshoot [%] plus ten times summed settling time
/// [s]. A channel that never settles is charged the whole horizon.
inline double sweep_objective(const MetricTable& m, double horizon) {
  double j = 0.0;
  for (const auto& row : m) {
    j += row.metrics.overshoot;
    j += 10.0 * row.metrics.settling_time.value_or(horizon);
  }
  return j;
}

inline std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const GainGrid& grid, unsigned threads = 0,
                                       double band = 0.02) {
  const auto candidates = grid.expand(base.gains);
  std::vector<SweepRow> rows(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.index = i;
    row.gains = candidates[i];
    ScenarioConfig cfg = base;
    cfg.gains = candidates[i];
    try {
      cfg.validate();
    } catch (const ConfigError&) {
      row.status = "invalid";
      return;
    }
    try {
      row.metrics = run_and_analyze(cfg, band).metrics;
      row.objective = sweep_objective(row.metrics, cfg.integrator.t_end);
      row.status = "ok";
    } catch (const DivergenceError&) {
      row.status = "diverged";
    } catch (const SingularityError&) {
      row.status = "diverged";
    } catch (const AllocationInfeasible&) {
      row.status = "diverged";
    }
  });
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "index,lambda_z,lambda_phi,lambda_theta,lambda_psi,k1,k2,k3,k4,n,status,objective,"
      "os_roll,os_pitch,os_yaw,os_altitude,ts_roll,ts_pitch,ts_yaw,ts_altitude\n";
  auto num = [&out](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    out += ',';
    out += buf;
  };
  for (const auto& r : rows) {
    out += std::to_string(r.index);
    for (double v : r.gains.lambda) num(v);
    for (double v : r.gains.k) num(v);
    out += ',' + std::to_string(r.gains.n) + ',' + r.status;
    num(r.objective);
    for (const auto& m : r.metrics) num(m.metrics.overshoot);
    for (const auto& m : r.metrics) num(m.metrics.settling_time.value_or(std::nan("")));
    out += '\n';
  }
  return out;
}

}  // namespace quadftc
