// Copyright 2026 The chainbreak Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Talks to the library only through chainbreak.h.

#include "chainbreak/chainbreak.h"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace {

struct ConfigDeleter {
  void operator()(cb_config* c) const { cb_config_destroy(c); }
};
struct ReportDeleter {
  void operator()(cb_report* r) const { cb_report_destroy(r); }
};
struct StringDeleter {
  void operator()(char* s) const { cb_string_free(s); }
};
using ConfigPtr = std::unique_ptr<cb_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<cb_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Thrown out of a subcommand; main() turns it into exit status 1.
struct Failure {
  cb_status status;
};

void check(cb_status s) {
  if (s != CB_OK) throw Failure{s};
}

ConfigPtr load_config(const std::string& path, std::optional<int> workers) {
  cb_config* raw = nullptr;
  check(cb_config_read(path.c_str(), &raw));
  ConfigPtr cfg(raw);
  if (workers) check(cb_config_set_workers(cfg.get(), *workers));
  return cfg;
}

void print_owned(char* text) {
  StringPtr owned(text);
  std::printf("%s\n", owned.get());
}

int cmd_theory(int d, double sigma, double epsilon) {
  char* json = nullptr;
  check(cb_theory_json(d, sigma, epsilon, &json));
  print_owned(json);
  return 0;
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed, const std::string& trace) {
  ConfigPtr cfg = load_config(config_path, std::nullopt);
  cb_break_result r{};
  check(cb_config_simulate(cfg.get(), seed, trace.empty() ? nullptr : trace.c_str(), &r));
  std::printf(
      "{\n  \"seed\": %" PRIu64 ",\n  \"break_time\": %.17g,\n  \"break_bond\": %d,\n  \"censored\": %s,\n"
      "  \"steps\": %" PRIu64 "\n}\n",
      seed, r.break_time, r.break_bond, r.censored ? "true" : "false", r.steps);
  return 0;
}

int cmd_experiment(const std::string& config_path, std::optional<int> workers, std::string out,
                   bool no_timing) {
  ConfigPtr cfg = load_config(config_path, workers);
  cb_report* raw = nullptr;
  check(cb_experiment_run(cfg.get(), &raw));
  ReportPtr report(raw);
  if (out.empty()) out = cb_config_output_path(cfg.get());
  if (out.empty()) {
    char* json = nullptr;
    check(cb_report_json(report.get(), no_timing ? 0 : 1, &json));
    print_owned(json);
  } else {
    check(cb_report_write(report.get(), out.c_str()));
    std::fprintf(stderr, "wrote %s (%zu records)\n", out.c_str(), cb_report_record_count(report.get()));
  }
  return 0;
}

int cmd_phase(const std::string& config_path, const std::string& grid_path, std::optional<int> workers,
              std::string out) {
  ConfigPtr cfg = load_config(config_path, workers);
  if (out.empty()) {
    const std::filesystem::path base = cb_config_output_path(cfg.get());
    out = base.empty() ? std::string("phase_summary.csv")
                       : (base.parent_path() / (base.stem().string() + "_phase.csv")).string();
  }
  char* json = nullptr;
  check(cb_phase_sweep(cfg.get(), grid_path.c_str(), out.c_str(), &json));
  print_owned(json);
  std::fprintf(stderr, "wrote %s\n", out.c_str());
  return 0;
}

int cmd_verify(bool quiet) {
  int failures = 0;
  char* log = nullptr;
  check(cb_verify(&failures, &log));
  StringPtr owned(log);
  if (!quiet || failures > 0) std::fputs(owned.get(), stdout);
  std::printf("%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Breaking-chain simulator and verification harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cb_version()));

  int d = 3;
  double sigma = 0.0;
  double epsilon = 0.0;
  auto* theory = app.add_subcommand("theory", "Print limit-law constants and the regime as JSON");
  theory->add_option("--d", d, "Number of bonds")->required();
  theory->add_option("--sigma", sigma, "Noise intensity")->required();
  theory->add_option("--epsilon", epsilon, "Pulling speed")->required();

  std::string config_path;
  std::uint64_t seed = 0;
  std::string trace;
  auto* simulate = app.add_subcommand("simulate", "Run one trajectory of a config with an explicit seed");
  simulate->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "RNG seed")->required();
  simulate->add_option("--trace", trace, "Write the gap trace to this CSV file");

  std::optional<int> workers;
  std::string out;
  bool no_timing = false;
  auto* experiment = app.add_subcommand("experiment", "Run a full Monte Carlo experiment");
  experiment->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  experiment->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  experiment->add_option("--out", out, "Report path (overrides output_path)");
  experiment->add_flag("--no-timing", no_timing, "Omit the timing block when printing to stdout");

  std::string grid_path;
  auto* phase = app.add_subcommand("phase", "Sweep a (sigma, epsilon) grid");
  phase->add_option("--config", config_path, "Base experiment config (JSON)")->required()->check(CLI::ExistingFile);
  phase->add_option("--grid", grid_path, "Grid file (JSON)")->required()->check(CLI::ExistingFile);
  phase->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  phase->add_option("--out", out, "Summary CSV path");

  bool quiet = false;
  auto* verify = app.add_subcommand("verify", "Run the built-in invariant suite");
  verify->add_flag("-q,--quiet", quiet, "Only print failing checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (theory->parsed()) return cmd_theory(d, sigma, epsilon);
    if (simulate->parsed()) return cmd_simulate(config_path, seed, trace);
    if (experiment->parsed()) return cmd_experiment(config_path, workers, out, no_timing);
    if (phase->parsed()) return cmd_phase(config_path, grid_path, workers, out);
    if (verify->parsed()) return cmd_verify(quiet);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error [%s]: %s\n", cb_status_name(f.status), cb_last_error());
    return 1;
  }
  return 0;
}
