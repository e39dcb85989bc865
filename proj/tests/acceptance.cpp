// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fail.
//
// Usage: acceptance [path-to-quadftc-cli]
// With the CLI path, criterion 10 runs `quadftc compare` twice as separate
// processes; without it, the same comparison runs in-process.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "quadftc/allocation.hpp"
#include "quadftc/controller.hpp"
#include "quadftc/dynamics.hpp"
#include "quadftc/experiments.hpp"
#include "quadftc/integrator.hpp"
#include "quadftc/metrics.hpp"
#include "quadftc/model.hpp"
#include "quadftc/report.hpp"
#include "quadftc/scenario.hpp"
#include "quadftc/telemetry.hpp"

using namespace quadftc;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string fmt_time(const MetricTime& t) { return t ? fmt("%.3f", *t) : "n/r"; }

struct TimedRun {
  RunResult result;
  double seconds = 0.0;
};

TimedRun timed(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  TimedRun r{run_and_analyze(cfg), 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

const ChannelReport& row(const MetricTable& m, std::string_view name) {
  for (const auto& r : m) {
    if (r.name == name) return r;
  }
  throw std::logic_error("no row " + std::string(name));
}

constexpr std::array<std::string_view, 4> kRows{"roll", "pitch", "yaw", "altitude"};

// Shared runs for criteria 1 to 4.
struct ComparisonRuns {
  TimedRun nominal, faulted, nominal_signum;
};

ComparisonRuns& comparison_runs() {
  static ComparisonRuns runs = [] {
    const auto pair = build_comparison_scenarios();
    ScenarioConfig signum = pair.nominal;
    signum.gains.mode = ControllerMode::signum_baseline;
    return ComparisonRuns{timed(pair.nominal), timed(pair.faulted), timed(signum)};
  }();
  return runs;
}

Verdict criterion_1() {
  Verdict v;
  const auto& run = comparison_runs().nominal;
  v.require(run.seconds <= 2.0, "wall-clock " + fmt("%.2f s", run.seconds));
  for (auto name : kRows) {
    const auto& m = row(run.result.metrics, name).metrics;
    const double os_limit = name == "altitude" ? 5.0 : 3.0;
    v.note(std::string(name) + " OS " + fmt("%.3f%%", m.overshoot) + " ts " + fmt_time(m.settling_time));
    v.require(m.overshoot <= os_limit, std::string(name) + " overshoot above " + fmt("%.0f%%", os_limit));
    v.require(m.settling_time && *m.settling_time <= 0.5, std::string(name) + " settling above 0.5 s");
  }
  return v;
}

Verdict criterion_2() {
  Verdict v;
  const auto& runs = comparison_runs();
  v.require(runs.faulted.seconds <= 2.0, "wall-clock " + fmt("%.2f s", runs.faulted.seconds));
  bool bounded = true;
  for (const auto& r : runs.faulted.result.telemetry) {
    bounded = bounded && is_finite(r.state) && std::abs(r.state.phi) < std::numbers::pi / 2 &&
              std::abs(r.state.theta) < std::numbers::pi / 2;
  }
  v.require(bounded, "state left the bounded region");
  v.require(runs.faulted.result.telemetry.size() == 10001, "incomplete run");

  const double yaw = row(runs.faulted.result.metrics, "yaw").metrics.overshoot;
  for (auto name : kRows) {
    const double f = row(runs.faulted.result.metrics, name).metrics.overshoot;
    const double n = row(runs.nominal.result.metrics, name).metrics.overshoot;
    v.note(std::string(name) + " OS " + fmt("%.4g%%", f) + " vs nominal " + fmt("%.4g%%", n));
    v.require(f > n, std::string(name) + " faulted overshoot not above nominal");
    v.require(f <= 25.0, std::string(name) + " overshoot above 25%");
    if (name != "yaw") v.require(yaw > f, "yaw overshoot not strictly above " + std::string(name));
  }
  return v;
}

Verdict criterion_3() {
  Verdict v;
  const auto& m = comparison_runs().faulted.result.metrics;
  const auto yaw = row(m, "yaw").metrics.settling_time;
  for (auto name : kRows) {
    const auto ts = row(m, name).metrics.settling_time;
    v.note(std::string(name) + " ts " + fmt_time(ts));
    v.require(ts && *ts <= 1.5, std::string(name) + " settling above 1.5 s or not reached");
    if (name != "yaw") v.require(yaw && ts && *yaw > *ts, "yaw not slower than " + std::string(name));
  }
  return v;
}

Verdict criterion_4() {
  Verdict v;
  const auto& runs = comparison_runs();
  const auto stw = TelemetryTable::from_records(runs.nominal.result.telemetry);
  const auto sgn = TelemetryTable::from_records(runs.nominal_signum.result.telemetry);
  for (const char* u : {"U1", "U2", "U3", "U4"}) {
    const double a = total_variation(stw.column("t"), stw.column(u), 5.0);
    const double b = total_variation(sgn.column("t"), sgn.column(u), 5.0);
    v.note(std::string(u) + " TV " + fmt("%.4g", a) + " vs signum " + fmt("%.4g", b));
    v.require(a <= 0.1 * b, std::string(u) + " ratio " + fmt("%.3g", a / b));
  }
  return v;
}

Verdict criterion_5() {
  Verdict v;
  const QuadrotorParams p;
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> sq(0.05e6, 1.0e6);
  double worst = 0.0;
  auto check = [&](const ControlWrench& u, const ControlWrench& back) {
    for (std::size_t i = 0; i < 4; ++i) {
      const double rel = std::abs(back[i] - u[i]) / std::max(std::abs(u[i]), 1e-300);
      worst = std::max(worst, rel);
    }
  };
  for (int i = 0; i < 100; ++i) {
    const auto u = mix({sq(rng), sq(rng), sq(rng), sq(rng)}, p);
    const auto a = allocate(u, {}, p);
    v.require(!a.clamped, "feasible wrench clamped");
    check(u, mix(a.commanded.squared(), p));
  }
  v.note("K=1 worst rel " + fmt("%.2e", worst));
  v.require(worst <= 1e-9, "K=1 round trip above 1e-9");

  worst = 0.0;
  int compared = 0;
  std::uniform_real_distribution<double> health(0.4, 1.0);
  while (compared < 100) {
    const EffectivenessVector K{{health(rng), health(rng), health(rng), health(rng)}};
    const auto full = mix({sq(rng), sq(rng), sq(rng), sq(rng)}, p);
    const ControlWrench u{0.3 * full.thrust, 0.3 * full.roll, 0.3 * full.pitch, 0.3 * full.yaw};
    const auto a = allocate(u, K, p);
    if (a.clamped) continue;
    RotorSpeeds actual = a.commanded;
    for (std::size_t i = 0; i < 4; ++i) actual[i] *= K[i];
    check(u, mix(actual.squared(), p));
    ++compared;
  }
  v.note("faulted worst rel " + fmt("%.2e", worst));
  v.require(worst <= 1e-9, "fault-compensated round trip above 1e-9");
  return v;
}

Verdict criterion_6() {
  Verdict v;
  auto error_at_one = [](double dt) {
    double y = 1.0;
    const long n = std::lround(1.0 / dt);
    for (long k = 0; k < n; ++k) y = rk4_step([](double, double x) { return -x; }, y, k * dt, dt);
    return std::abs(y - std::exp(-1.0));
  };
  const double ratio = error_at_one(0.01) / error_at_one(0.005);
  v.note("ratio " + fmt("%.3f", ratio));
  v.require(ratio >= 14.0 && ratio <= 18.0, "ratio outside [14, 18]");
  return v;
}

Verdict criterion_7() {
  Verdict v;
  const double dt = 1e-3, tau = 1.0;
  std::vector<double> t, first, second;
  const double zeta = 0.5, wn = 2.0, wd = wn * std::sqrt(1 - zeta * zeta);
  for (int k = 0; k <= 20000; ++k) {
    const double tk = k * dt;
    t.push_back(tk);
    first.push_back(1.0 - std::exp(-tk / tau));
    second.push_back(1.0 - std::exp(-zeta * wn * tk) / std::sqrt(1 - zeta * zeta) * std::sin(wd * tk + std::acos(zeta)));
  }
  const auto tr = rise_time(t, first, 1.0);
  const auto ts = settling_time(t, first, 1.0, 0.02);
  const double os = overshoot(second, 1.0);
  v.note("rise " + fmt_time(tr) + " settle " + fmt_time(ts) + " overshoot " + fmt("%.3f%%", os));
  v.require(tr && std::abs(*tr - tau * std::log(9.0)) <= 0.01, "rise time off tau ln 9");
  v.require(ts && std::abs(*ts - tau * std::log(50.0)) <= 0.01, "settling time off tau ln 50");
  v.require(std::abs(os - 16.3) <= 0.2, "overshoot off 16.3%");
  return v;
}

Verdict criterion_8() {
  Verdict v;
  const RotorSpeeds cmd{{361.5, 512.25, 800.0, 1000.0}};
  double worst = 0.0;
  for (double le : {0.0, 0.25, 0.6, 1.0}) {
    for (int rotor = 1; rotor <= 4; ++rotor) {
      const auto K = estimate_effectiveness(cmd, apply_fault(cmd, FaultSchedule({{rotor, 0.0, le}}), 0.0));
      worst = std::max(worst, std::abs((1.0 - K[static_cast<std::size_t>(rotor - 1)]) - le));
    }
  }
  v.note("worst " + fmt("%.2e", worst));
  v.require(worst <= 1e-12, "LE not recovered to 1e-12");
  return v;
}

Verdict criterion_9() {
  Verdict v;
  const QuadrotorParams p;
  SimState s0;
  s0.z = 2.0;
  const ControlWrench u{p.mass * p.gravity, 0, 0, 0};
  SimState s = s0;
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    s = rk4_step([&](double, const SimState& y) { return state_derivative(y, u, 0.0, p); }, s, k * 1e-3, 1e-3);
    worst = std::max(worst, max_abs_difference(s, s0));
  }
  v.note("max deviation " + fmt("%.2e", worst));
  v.require(worst < 1e-9, "hover drifted");
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion_10(const char* cli) {
  Verdict v;
  if (cli) {
    const auto base = std::filesystem::temp_directory_path() / ("quadftc_accept_" + std::to_string(::getpid()));
    std::string outputs[2][2];
    for (int run = 0; run < 2; ++run) {
      const auto dir = base / std::to_string(run);
      const std::string cmd = std::string("\"") + cli + "\" compare --out-dir \"" + dir.string() + "\" > /dev/null";
      v.require(std::system(cmd.c_str()) == 0, "compare run " + std::to_string(run) + " failed");
      outputs[run][0] = slurp(dir / "nominal.csv");
      outputs[run][1] = slurp(dir / "faulted.csv");
    }
    std::filesystem::remove_all(base);
    v.require(!outputs[0][0].empty() && outputs[0][0] == outputs[1][0], "nominal.csv differs");
    v.require(!outputs[0][1].empty() && outputs[0][1] == outputs[1][1], "faulted.csv differs");
    v.note("two CLI compare runs, " + std::to_string(outputs[0][0].size() + outputs[0][1].size()) + " bytes each");
  } else {
    auto csv = [] {
      const auto r = run_comparison(build_comparison_scenarios());
      std::ostringstream a;
      write_telemetry(a, r.nominal.telemetry);
      write_telemetry(a, r.faulted.telemetry);
      return a.str();
    };
    v.require(csv() == csv(), "telemetry differs between runs");
    v.note("in-process comparison");
  }
  return v;
}

Verdict criterion_11() {
  Verdict v;
  bool odd = true, bounded = true, monotone = true, converges = true;
  for (int n : {2, 8, 32}) {
    double prev = -2.0;
    for (int i = 0; i <= 2000; ++i) {
      const double s = -1.0 + i * 1e-3;
      const double f = smooth_sign(s, n);
      odd = odd && smooth_sign(-s, n) == -f;
      bounded = bounded && f >= -1.0 && f <= 1.0;
      monotone = monotone && f >= prev;
      prev = f;
    }
    for (double s : {-50.0, -2.0, 2.0, 1e6}) bounded = bounded && std::abs(smooth_sign(s, n)) <= 1.0;
  }
  for (double s : {-0.9, -0.5, -0.1, -0.01, 0.01, 0.1, 0.5, 0.9}) {
    const double e2 = std::abs(smooth_sign(s, 2) - sign(s));
    const double e8 = std::abs(smooth_sign(s, 8) - sign(s));
    const double e32 = std::abs(smooth_sign(s, 32) - sign(s));
    converges = converges && e8 < e2 && e32 < e8;
  }
  v.note("n = 2, 8, 32 on [-1, 1] at step 1e-3");
  v.require(odd, "not odd");
  v.require(bounded, "not bounded");
  v.require(monotone, "not monotone on [-1, 1]");
  v.require(converges, "no pointwise convergence at n = 2, 8, 32");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"C1  nominal overshoot and settling", criterion_1},
      {"C2  faulted overshoot ordering", criterion_2},
      {"C3  faulted settling with yaw slowest", criterion_3},
      {"C4  chattering: super-twisting TV <= 1/10 signum", criterion_4},
      {"C5  mixing round trip", criterion_5},
      {"C6  RK4 order", criterion_6},
      {"C7  metric oracles", criterion_7},
      {"C8  fault-model identity", criterion_8},
      {"C9  hover invariance", criterion_9},
      {"C10 determinism of compare", [cli] { return criterion_10(cli); }},
      {"C11 smooth_sign properties", criterion_11},
  };

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    failed += v.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
