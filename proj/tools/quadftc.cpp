// quadftc: run, report, compare and sweep quadrotor fault-tolerant control scenarios.
//
// Exit codes: 0 success, 2 config or schema error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "quadftc/errors.hpp"
#include "quadftc/experiments.hpp"
#include "quadftc/report.hpp"
#include "quadftc/scenario.hpp"
#include "quadftc/simulation.hpp"
#include "quadftc/telemetry.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

using namespace quadftc;

ScenarioConfig config_or_default(const std::string& path) {
  return path.empty() ? default_scenario() : load_scenario(path);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("<output>", "cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw ConfigError("<output>", "write failed for " + path.string());
}

int cmd_run(const std::string& config, const std::string& out) {
  const ScenarioConfig cfg = config_or_default(config);
  const Telemetry tel = simulate(cfg);
  write_telemetry_file(out, tel);
  std::fprintf(stderr, "wrote %zu records to %s\n", tel.size(), out.c_str());
  return 0;
}

int cmd_report(const std::string& in, double band, const std::string& config, const std::string& format) {
  const ScenarioConfig cfg = config_or_default(config);
  const TelemetryTable table = TelemetryTable::load(in);
  const MetricTable metrics = analyze(table, cfg.references, band);
  if (format == "json") {
    std::cout << to_json(metrics).dump(2) << '\n';
  } else {
    std::cout << format_table(metrics, "Time response (" + in + ")");
  }
  return 0;
}

int cmd_compare(const std::string& out_dir, double band) {
  std::filesystem::create_directories(out_dir);
  const ComparisonResult r = run_comparison(build_comparison_scenarios(), band);
  const std::filesystem::path dir(out_dir);
  write_telemetry_file((dir / "nominal.csv").string(), r.nominal.telemetry);
  write_telemetry_file((dir / "faulted.csv").string(), r.faulted.telemetry);
  const nlohmann::json metrics = {{"band", band},
                                  {"nominal", to_json(r.nominal.metrics)},
                                  {"faulted", to_json(r.faulted.metrics)}};
  write_text(dir / "metrics.json", metrics.dump(2) + "\n");

  std::cout << format_table(r.nominal.metrics, "Time response without rotor failure") << '\n'
            << format_table(r.faulted.metrics, "Time response with rotor 4 at 60% loss of effectiveness") << '\n'
            << format_comparison(r.nominal.metrics, r.faulted.metrics);
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& grid_path, const std::string& out, unsigned jobs) {
  const ScenarioConfig base = config_or_default(config);
  std::ifstream in(grid_path);
  if (!in) throw ConfigError("<grid>", "cannot open " + grid_path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<grid>", e.what());
  }
  const auto rows = run_sweep(base, parse_grid(doc), jobs);
  write_text(out, sweep_csv(rows));

  const SweepRow* best = nullptr;
  for (const auto& r : rows) {
    if (r.status == "ok" && (!best || r.objective < best->objective)) best = &r;
  }
  std::fprintf(stderr, "evaluated %zu candidates, wrote %s\n", rows.size(), out.c_str());
  if (best) {
    const auto& g = best->gains;
    std::printf("best #%zu objective=%.6g lambda=[%g %g %g %g] k=[%g %g %g %g] n=%d\n", best->index, best->objective,
                g.lambda[0], g.lambda[1], g.lambda[2], g.lambda[3], g.k[0], g.k[1], g.k[2], g.k[3], g.n);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrotor fault-tolerant sliding-mode control simulator"};
  app.require_subcommand(1);

  std::string config, out, in, out_dir, grid, format = "text";
  double band = 0.02;
  unsigned jobs = 0;

  auto* run = app.add_subcommand("run", "Simulate one scenario and write telemetry CSV");
  run->add_option("--config", config, "Scenario JSON (omit for the nominal scenario)");
  run->add_option("--out", out, "Telemetry CSV path")->required();

  auto* report = app.add_subcommand("report", "Metric table for a telemetry CSV");
  report->add_option("--in", in, "Telemetry CSV path")->required();
  report->add_option("--band", band, "Settling band as a fraction of the target")->check(CLI::PositiveNumber);
  report->add_option("--config", config, "Scenario JSON that produced the telemetry (references)");
  report->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* compare = app.add_subcommand("compare", "Run the nominal and faulted scenarios side by side");
  compare->add_option("--out-dir", out_dir, "Directory for nominal.csv, faulted.csv, metrics.json")->required();
  compare->add_option("--band", band, "Settling band as a fraction of the target")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Grid search over controller gains");
  sweep->add_option("--config", config, "Base scenario JSON")->required();
  sweep->add_option("--grid", grid, "Grid JSON: arrays for lambda, lambda_z.., k1..k4, n")->required();
  sweep->add_option("--out", out, "Results CSV path")->required();
  sweep->add_option("--jobs", jobs, "Worker threads (0 = hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out);
    if (*report) return cmd_report(in, band, config, format);
    if (*compare) return cmd_compare(out_dir, band);
    if (*sweep) return cmd_sweep(config, grid, out, jobs);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: config: %s\n", e.what());
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "error: numerical failure at t=%.6g: %s\n", e.time(), e.what());
    return kExitNumerical;
  } catch (const SingularityError& e) {
    std::fprintf(stderr, "error: numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const AllocationInfeasible& e) {
    std::fprintf(stderr, "error: numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
