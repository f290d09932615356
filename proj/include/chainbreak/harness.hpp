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

// Experiment orchestration: a declarative config in, N seeded trajectories
// run in parallel, and a report comparing the empirical break statistics to
// the limit law of the configured regime. Reports are a pure function of the
// config apart from the timing block; the worker count only changes speed.
//
// The JSON schema is documented in docs/schema.md.

#pragma once

#include "chainbreak/simulator.hpp"
#include "chainbreak/stats.hpp"
#include "chainbreak/theory.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chainbreak {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kWorkersEnv = "CHAINBREAK_WORKERS";

/// seed_k = splitmix64_finalize(master + (index + 1) * 0x9E3779B97F4A7C15) mod 2^64.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64_finalize(master + (index + 1) * kGoldenGamma);
}

enum class ExperimentMode { kFullChain, kStationaryFixedLevel, kStationaryMovingLevel };

std::string_view to_string(ExperimentMode mode);

struct ExperimentConfig {
  int d = 3;
  double sigma = 0.0;
  double epsilon = 0.0;
  double threshold = kDefaultThreshold;
  long long n_trajectories = 1;
  std::uint64_t master_seed = 0;
  SimConfig sim;
  ExperimentMode mode = ExperimentMode::kFullChain;
  int workers = 1;
  std::string output_path;

  bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Parses JSON text; kMalformedJson on syntax errors, kSchemaVersion on a
/// version mismatch, kMissingField naming the absent field.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig read_config(const std::filesystem::path& path);
void write_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

/// Checks every module precondition the run would hit, before any work starts.
void validate(const ExperimentConfig& cfg);

/// Builds the chain described by the config.
ChainModel model_of(const ExperimentConfig& cfg);

/// Single trajectory with an explicit seed, dispatched on cfg.mode.
BreakResult simulate_one(const ExperimentConfig& cfg, std::uint64_t seed);

enum class LimitLaw { kNone, kDeterministic, kExponential, kGumbel };

std::string_view to_string(LimitLaw law);

struct TrajectoryRecord {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  double break_time = 0.0;
  int break_bond = 0;
  bool censored = false;
  bool failed = false;
  std::string error;
  std::optional<double> normalized_time;
  std::uint64_t steps = 0;
};

struct PositionSummary {
  double level = 0.99;
  std::vector<long long> counts;
  std::vector<double> frequencies;
  std::vector<stats::Interval> intervals;
  int modal_bond = 0;
};

struct GofEntry {
  std::string name;
  std::optional<stats::GofResult> result;
  std::string skipped;  // reason, when result is empty
};

struct Timing {
  double wall_seconds = 0.0;
  std::uint64_t total_steps = 0;
  double steps_per_second = 0.0;
  int workers = 1;
};

struct ExperimentReport {
  ExperimentConfig config;
  Regime regime;
  LimitLaw law = LimitLaw::kNone;
  RegimeConstants constants;
  Vector position_law;
  std::optional<DeterministicBreak> deterministic;
  std::optional<double> theta;
  std::optional<ModerateNormalization> moderate;

  std::vector<TrajectoryRecord> records;
  long long censored = 0;
  long long failed = 0;
  bool censoring_flag = false;  // censored fraction above 0.1%

  PositionSummary positions;
  std::vector<double> normalized;  // uncensored records only, in index order
  std::optional<double> normalized_mean;
  std::optional<double> normalized_median;
  std::optional<double> median_break_time;
  std::vector<GofEntry> gof;
  std::vector<std::string> notes;

  Timing timing;
};

/// Worker count after applying the CHAINBREAK_WORKERS override.
int effective_workers(const ExperimentConfig& cfg);

/// Runs the experiment. Trajectory k uses derive_seed(master_seed, k).
/// Failed trajectories are recorded; more than 1% failures throws
/// kExperimentAborted.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentReport& report, bool include_timing = true);

/// CSV columns: seed,break_time,break_bond,censored,normalized_time.
void write_samples_csv(const ExperimentReport& report, std::ostream& out);

struct ReportPaths {
  std::filesystem::path json;
  std::filesystem::path csv;
};

/// Writes the JSON report to `path` and the per-trajectory CSV next to it
/// (same stem, .csv extension).
ReportPaths write_report(const ExperimentReport& report, const std::filesystem::path& path);

using GridPoint = std::pair<double, double>;  // (sigma, epsilon)

/// Accepts {"schema_version": 1, "points": [{"sigma": s, "epsilon": e}, ...]}
/// or a bare array of [sigma, epsilon] pairs.
std::vector<GridPoint> parse_grid(std::string_view text);
std::vector<GridPoint> read_grid(const std::filesystem::path& path);

/// One report per grid point; base supplies everything except sigma/epsilon.
/// All points are validated before the first one runs.
std::vector<ExperimentReport> phase_sweep(const std::vector<GridPoint>& grid, const ExperimentConfig& base);

/// CSV columns: sigma,epsilon,regime,modal_bond,median_break_time.
void write_phase_csv(const std::vector<ExperimentReport>& reports, std::ostream& out);

/// Theory constants for (d, sigma, epsilon) as printed by `chainbreak theory`.
nlohmann::json theory_json(int d, double sigma, double epsilon);

}  // namespace chainbreak
