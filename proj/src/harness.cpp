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

#include "chainbreak/harness.hpp"

#include "chainbreak/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace chainbreak {

using nlohmann::json;

namespace {

constexpr double kCensorFlagFraction = 1e-3;
constexpr double kAbortFailureFraction = 1e-2;

std::string_view to_string(InitialMode mode) { return mode == InitialMode::kZero ? "zero" : "stationary"; }

InitialMode initial_mode_from(const std::string& s) {
  if (s == "zero") return InitialMode::kZero;
  if (s == "stationary") return InitialMode::kStationary;
  fail(Errc::kInvalidArgument, "sim.initial_mode must be 'zero' or 'stationary', got '" + s + "'");
}

ExperimentMode mode_from(const std::string& s) {
  if (s == "full_chain") return ExperimentMode::kFullChain;
  if (s == "stationary_fixed_level") return ExperimentMode::kStationaryFixedLevel;
  if (s == "stationary_moving_level") return ExperimentMode::kStationaryMovingLevel;
  fail(Errc::kInvalidArgument, "mode must be full_chain, stationary_fixed_level or stationary_moving_level, got '" +
                                   s + "'");
}

const json& field(const json& j, const char* name) {
  const auto it = j.find(name);
  require(it != j.end(), Errc::kMissingField, std::string("missing required field '") + name + "'");
  return *it;
}

template <typename T>
T get_as(const json& value, const std::string& name) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    fail(Errc::kInvalidArgument, "field '" + name + "' has the wrong type");
  }
}

template <typename T>
T required(const json& j, const char* name) {
  return get_as<T>(field(j, name), name);
}

template <typename T>
T optional_field(const json& j, const char* name, T fallback) {
  const auto it = j.find(name);
  return it == j.end() ? fallback : get_as<T>(*it, name);
}

json to_json(const SimConfig& s) {
  return json{{"dt", s.dt},
              {"t_max", s.t_max},
              {"initial_mode", to_string(s.initial_mode)},
              {"record_trace", s.record_trace},
              {"trace_every", s.trace_every},
              {"refine_crossing", s.refine_crossing},
              {"bridge_correction", s.bridge_correction}};
}

SimConfig sim_from_json(const json& j, InitialMode default_initial) {
  require(j.is_object(), Errc::kInvalidArgument, "field 'sim' must be an object");
  SimConfig s;
  s.dt = optional_field(j, "dt", s.dt);
  s.t_max = optional_field(j, "t_max", s.t_max);
  s.initial_mode = initial_mode_from(optional_field<std::string>(j, "initial_mode", std::string(to_string(default_initial))));
  s.record_trace = optional_field(j, "record_trace", s.record_trace);
  s.trace_every = optional_field(j, "trace_every", s.trace_every);
  s.refine_crossing = optional_field(j, "refine_crossing", s.refine_crossing);
  s.bridge_correction = optional_field(j, "bridge_correction", s.bridge_correction);
  return s;
}

json optional_number(const std::optional<double>& x) {
  if (!x || !std::isfinite(*x)) return nullptr;
  return *x;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), Errc::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::kMalformedJson, std::string("malformed JSON: ") + e.what());
  }
}

void check_schema_version(const json& j) {
  const int version = required<int>(j, "schema_version");
  require(version == kSchemaVersion, Errc::kSchemaVersion,
          "schema_version " + std::to_string(version) + " is not supported (expected " +
              std::to_string(kSchemaVersion) + ")");
}

// Chooses the limit law the samples are compared against and fills the
// matching normalisation constants.
void select_law(ExperimentReport& r) {
  const ExperimentConfig& c = r.config;
  auto exponential = [&] {
    try {
      r.theta = very_slow_normalizer(c.d, c.sigma);
      r.law = LimitLaw::kExponential;
    } catch (const Error& e) {
      r.notes.push_back(std::string("no exponential normalisation: ") + e.what());
    }
  };
  auto gumbel = [&] {
    if (c.sigma > c.epsilon && c.epsilon > 0.0) {
      r.moderate = moderate_normalization(c.d, c.sigma, c.epsilon);
      r.law = LimitLaw::kGumbel;
    } else {
      r.notes.push_back("no Gumbel normalisation: needs sigma > epsilon > 0");
    }
  };
  switch (c.mode) {
    case ExperimentMode::kStationaryFixedLevel:
      exponential();
      return;
    case ExperimentMode::kStationaryMovingLevel:
      gumbel();
      return;
    case ExperimentMode::kFullChain:
      break;
  }
  switch (r.regime.tag) {
    case RegimeTag::kFast:
      r.deterministic = deterministic_break(c.d, c.epsilon);
      r.law = LimitLaw::kDeterministic;
      break;
    case RegimeTag::kModerate:
      gumbel();
      break;
    case RegimeTag::kVerySlow:
      exponential();
      break;
    case RegimeTag::kTransitional:
      r.notes.push_back("transitional regime: no limit law is known, samples are not normalised");
      break;
  }
}

std::optional<double> normalize(const ExperimentReport& r, double tau) {
  switch (r.law) {
    case LimitLaw::kExponential:
      return tau / *r.theta;
    case LimitLaw::kGumbel:
      return r.moderate->statistic(tau);
    case LimitLaw::kDeterministic:
      return tau - r.deterministic->tau;
    case LimitLaw::kNone:
      break;
  }
  return std::nullopt;
}

void summarize(ExperimentReport& r) {
  const int d = r.config.d;
  r.positions.counts.assign(d, 0);
  std::vector<double> times;
  for (auto& rec : r.records) {
    if (rec.failed) {
      ++r.failed;
      continue;
    }
    if (rec.censored) {
      ++r.censored;
      continue;
    }
    ++r.positions.counts[rec.break_bond - 1];
    times.push_back(rec.break_time);
    rec.normalized_time = normalize(r, rec.break_time);
    if (rec.normalized_time) r.normalized.push_back(*rec.normalized_time);
  }
  const long long n = static_cast<long long>(r.records.size());
  r.censoring_flag = static_cast<double>(r.censored) > kCensorFlagFraction * static_cast<double>(n);
  if (r.censoring_flag) r.notes.push_back("censored fraction exceeds 0.1%");

  const long long broken = n - r.censored - r.failed;
  r.positions.frequencies.assign(d, 0.0);
  r.positions.intervals.assign(d, stats::Interval{});
  if (broken > 0) {
    for (int i = 0; i < d; ++i) {
      r.positions.frequencies[i] = static_cast<double>(r.positions.counts[i]) / static_cast<double>(broken);
      r.positions.intervals[i] = stats::proportion_ci(r.positions.counts[i], broken, r.positions.level);
    }
    const auto modal = std::max_element(r.positions.counts.begin(), r.positions.counts.end());
    r.positions.modal_bond = static_cast<int>(modal - r.positions.counts.begin()) + 1;
    r.median_break_time = stats::median(times);
  }
  if (!r.normalized.empty()) {
    r.normalized_mean = stats::mean(r.normalized);
    r.normalized_median = stats::median(r.normalized);
  }

  if (r.law == LimitLaw::kExponential || r.law == LimitLaw::kGumbel) {
    GofEntry ks;
    if (r.law == LimitLaw::kExponential) {
      ks.name = "ks_exponential";
    } else {
      ks.name = "ks_gumbel";
    }
    if (r.normalized.empty()) {
      ks.skipped = "no uncensored samples";
    } else if (r.law == LimitLaw::kExponential) {
      ks.result = stats::ks_test(r.normalized, exponential_cdf);
    } else {
      const double a0 = r.moderate->a0;
      const double b = r.moderate->b;
      ks.result = stats::ks_test(r.normalized, [a0, b](double x) { return gumbel_cdf(a0, b, x); });
    }
    r.gof.push_back(std::move(ks));

    GofEntry chi{"chisq_position", std::nullopt, {}};
    try {
      chi.result = stats::chisq_position_test(r.positions.counts, r.position_law);
    } catch (const Error& e) {
      chi.skipped = e.what();
    }
    r.gof.push_back(std::move(chi));
  }
}

}  // namespace

std::string_view to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kFullChain:
      return "full_chain";
    case ExperimentMode::kStationaryFixedLevel:
      return "stationary_fixed_level";
    case ExperimentMode::kStationaryMovingLevel:
      return "stationary_moving_level";
  }
  return "full_chain";
}

std::string_view to_string(LimitLaw law) {
  switch (law) {
    case LimitLaw::kNone:
      return "none";
    case LimitLaw::kDeterministic:
      return "deterministic";
    case LimitLaw::kExponential:
      return "exponential";
    case LimitLaw::kGumbel:
      return "gumbel";
  }
  return "none";
}

json to_json(const ExperimentConfig& cfg) {
  return json{{"schema_version", kSchemaVersion},
              {"d", cfg.d},
              {"sigma", cfg.sigma},
              {"epsilon", cfg.epsilon},
              {"threshold", cfg.threshold},
              {"n_trajectories", cfg.n_trajectories},
              {"master_seed", cfg.master_seed},
              {"mode", to_string(cfg.mode)},
              {"workers", cfg.workers},
              {"output_path", cfg.output_path},
              {"sim", to_json(cfg.sim)}};
}

ExperimentConfig config_from_json(const json& j) {
  require(j.is_object(), Errc::kInvalidArgument, "config must be a JSON object");
  check_schema_version(j);
  ExperimentConfig c;
  c.d = required<int>(j, "d");
  c.sigma = required<double>(j, "sigma");
  c.epsilon = required<double>(j, "epsilon");
  c.n_trajectories = required<long long>(j, "n_trajectories");
  c.master_seed = required<std::uint64_t>(j, "master_seed");
  c.threshold = optional_field(j, "threshold", c.threshold);
  c.mode = mode_from(optional_field<std::string>(j, "mode", "full_chain"));
  c.workers = optional_field(j, "workers", c.workers);
  c.output_path = optional_field<std::string>(j, "output_path", "");
  const InitialMode default_initial =
      c.mode == ExperimentMode::kFullChain ? InitialMode::kZero : InitialMode::kStationary;
  const auto sim = j.find("sim");
  if (sim != j.end()) {
    c.sim = sim_from_json(*sim, default_initial);
  } else {
    c.sim.initial_mode = default_initial;
  }
  return c;
}

ExperimentConfig parse_config(std::string_view text) { return config_from_json(parse_json_text(text)); }

ExperimentConfig read_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

void write_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), Errc::kIo, "cannot write '" + path.string() + "'");
  out << to_json(cfg).dump(2) << '\n';
}

ChainModel model_of(const ExperimentConfig& cfg) {
  return build_chain(cfg.d, cfg.sigma, cfg.epsilon, cfg.threshold);
}

void validate(const ExperimentConfig& cfg) {
  const ChainModel model = model_of(cfg);
  validate(cfg.sim);
  require(cfg.n_trajectories >= 1, Errc::kInvalidArgument, "n_trajectories must be >= 1");
  require(cfg.workers >= 1, Errc::kInvalidArgument, "workers must be >= 1");
  if (cfg.mode != ExperimentMode::kFullChain) {
    require(cfg.sigma > 0.0, Errc::kInvalidArgument, "stationary modes need sigma > 0");
    require(cfg.sim.initial_mode == InitialMode::kStationary, Errc::kInvalidArgument,
            "stationary modes need sim.initial_mode = stationary");
  } else if (cfg.sim.initial_mode == InitialMode::kStationary) {
    require(cfg.sigma > 0.0, Errc::kInvalidArgument, "stationary start needs sigma > 0");
  }
  if (cfg.mode == ExperimentMode::kStationaryMovingLevel) {
    require(cfg.epsilon > 0.0, Errc::kInvalidArgument, "moving level needs epsilon > 0");
  }
}

BreakResult simulate_one(const ExperimentConfig& cfg, std::uint64_t seed) {
  const ChainModel model = model_of(cfg);
  switch (cfg.mode) {
    case ExperimentMode::kFullChain:
      return simulate_break(model, cfg.sim, seed);
    case ExperimentMode::kStationaryFixedLevel:
      return simulate_stationary_level(model, cfg.sim, seed, false);
    case ExperimentMode::kStationaryMovingLevel:
      return simulate_stationary_level(model, cfg.sim, seed, true);
  }
  fail(Errc::kInternal, "unknown experiment mode");
}

int effective_workers(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    require(end != env && *end == '\0' && v >= 1 && v <= 4096, Errc::kInvalidArgument,
            std::string(kWorkersEnv) + " must be a positive integer");
    return static_cast<int>(v);
  }
  return cfg.workers;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();

  ExperimentReport r;
  r.config = cfg;
  r.regime = classify_regime(cfg.sigma, cfg.epsilon);
  r.constants = chain_constants(cfg.d, cfg.sigma, cfg.epsilon);
  r.position_law = position_law(cfg.d);
  select_law(r);

  const ChainModel model = model_of(cfg);
  const auto n = static_cast<std::size_t>(cfg.n_trajectories);
  r.records.resize(n);

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      TrajectoryRecord& rec = r.records[k];
      rec.index = k;
      rec.seed = derive_seed(cfg.master_seed, k);
      try {
        BreakResult res;
        switch (cfg.mode) {
          case ExperimentMode::kFullChain:
            res = simulate_break(model, cfg.sim, rec.seed);
            break;
          case ExperimentMode::kStationaryFixedLevel:
            res = simulate_stationary_level(model, cfg.sim, rec.seed, false);
            break;
          case ExperimentMode::kStationaryMovingLevel:
            res = simulate_stationary_level(model, cfg.sim, rec.seed, true);
            break;
        }
        rec.break_time = res.break_time;
        rec.break_bond = res.break_bond;
        rec.censored = res.censored;
        rec.steps = res.steps;
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
    }
  };

  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(effective_workers(cfg)), n));
  if (workers <= 1) {
    run_range(0, n);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      pool.emplace_back(run_range, begin, end);
    }
  }

  summarize(r);
  require(static_cast<double>(r.failed) <= kAbortFailureFraction * static_cast<double>(n), Errc::kExperimentAborted,
          std::to_string(r.failed) + " of " + std::to_string(n) + " trajectories failed (limit 1%)");

  r.timing.workers = std::max(workers, 1);
  for (const auto& rec : r.records) r.timing.total_steps += rec.steps;
  r.timing.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.timing.steps_per_second =
      r.timing.wall_seconds > 0.0 ? static_cast<double>(r.timing.total_steps) / r.timing.wall_seconds : 0.0;
  return r;
}

json theory_json(int d, double sigma, double epsilon) {
  const RegimeConstants c = chain_constants(d, sigma, epsilon);
  json j{{"d", d},
         {"sigma", sigma},
         {"epsilon", epsilon},
         {"v2", c.v2},
         {"v", c.v},
         {"gamma", c.gamma},
         {"A", c.A},
         {"a", c.a},
         {"a0", c.a0},
         {"b", c.b},
         {"mu", c.mu},
         {"t_star", optional_number(c.t_star)},
         {"position_law", position_law(d)}};
  if (sigma > 0.0 || epsilon > 0.0) {
    const Regime reg = classify_regime(sigma, epsilon);
    j["regime"] = {{"tag", to_string(reg.tag)},
                   {"ratio", optional_number(reg.ratio)},
                   {"q", optional_number(reg.q)}};
  }
  if (epsilon > 0.0) {
    const DeterministicBreak det = deterministic_break(d, epsilon);
    j["deterministic_break"] = {{"tau", det.tau}, {"per_bond", det.per_bond}};
  }
  if (sigma > 0.0) {
    try {
      j["very_slow_theta"] = very_slow_normalizer(d, sigma);
    } catch (const Error&) {
      j["very_slow_theta"] = nullptr;
    }
  }
  if (epsilon > 0.0 && sigma > epsilon) {
    const ModerateNormalization m = moderate_normalization(d, sigma, epsilon);
    j["moderate"] = {{"h", m.h},
                     {"psi", m.psi},
                     {"offset", m.offset},
                     {"center", m.center},
                     {"scale", m.scale},
                     {"gumbel_a0", m.a0},
                     {"gumbel_b", m.b},
                     {"gumbel_median", gumbel_median(m.a0, m.b)}};
  }
  return j;
}

json to_json(const ExperimentReport& r, bool include_timing) {
  json records = json::array();
  for (const auto& rec : r.records) {
    json jr{{"index", rec.index},
            {"seed", rec.seed},
            {"break_time", rec.break_time},
            {"break_bond", rec.break_bond},
            {"censored", rec.censored},
            {"failed", rec.failed},
            {"normalized_time", optional_number(rec.normalized_time)},
            {"steps", rec.steps}};
    if (rec.failed) jr["error"] = rec.error;
    records.push_back(std::move(jr));
  }
  json intervals = json::array();
  for (const auto& ci : r.positions.intervals) intervals.push_back({ci.lo, ci.hi});
  json gof = json::array();
  for (const auto& g : r.gof) {
    json jg{{"name", g.name}};
    if (g.result) {
      jg["test"] = stats::to_string(g.result->test);
      jg["statistic"] = g.result->statistic;
      jg["p_value"] = g.result->p_value;
      jg["n"] = g.result->n;
    } else {
      jg["skipped"] = g.skipped;
    }
    gof.push_back(std::move(jg));
  }

  // The worker count only affects speed; it is reported under timing.
  json config = to_json(r.config);
  config.erase("workers");
  json j{{"schema_version", kSchemaVersion},
         {"config", config},
         {"regime",
          {{"tag", to_string(r.regime.tag)},
           {"ratio", optional_number(r.regime.ratio)},
           {"q", optional_number(r.regime.q)}}},
         {"limit_law", to_string(r.law)},
         {"theory", theory_json(r.config.d, r.config.sigma, r.config.epsilon)},
         {"counts",
          {{"n_trajectories", r.records.size()},
           {"censored", r.censored},
           {"failed", r.failed},
           {"uncensored", static_cast<long long>(r.records.size()) - r.censored - r.failed},
           {"censoring_flag", r.censoring_flag}}},
         {"positions",
          {{"counts", r.positions.counts},
           {"frequencies", r.positions.frequencies},
           {"wilson_level", r.positions.level},
           {"wilson_intervals", intervals},
           {"modal_bond", r.positions.modal_bond},
           {"position_law", r.position_law}}},
         {"normalized",
          {{"samples", r.normalized},
           {"mean", optional_number(r.normalized_mean)},
           {"median", optional_number(r.normalized_median)}}},
         {"median_break_time", optional_number(r.median_break_time)},
         {"gof", gof},
         {"notes", r.notes},
         {"records", records}};
  if (include_timing) {
    j["timing"] = {{"wall_seconds", r.timing.wall_seconds},
                   {"total_steps", r.timing.total_steps},
                   {"steps_per_second", r.timing.steps_per_second},
                   {"workers", r.timing.workers}};
  }
  return j;
}

void write_samples_csv(const ExperimentReport& report, std::ostream& out) {
  out << "seed,break_time,break_bond,censored,normalized_time\n";
  out.precision(17);
  for (const auto& rec : report.records) {
    out << rec.seed << ',';
    if (rec.failed) {
      out << ",,,";
    } else {
      out << rec.break_time << ',' << rec.break_bond << ',' << (rec.censored ? 1 : 0) << ',';
      if (rec.normalized_time) out << *rec.normalized_time;
    }
    out << '\n';
  }
}

ReportPaths write_report(const ExperimentReport& report, const std::filesystem::path& path) {
  ReportPaths paths{path, path};
  paths.csv.replace_extension(".csv");
  require(paths.csv != paths.json, Errc::kInvalidArgument, "report path must not end in .csv");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream out(paths.json);
    require(static_cast<bool>(out), Errc::kIo, "cannot write '" + paths.json.string() + "'");
    out << to_json(report).dump(2) << '\n';
  }
  std::ofstream csv(paths.csv);
  require(static_cast<bool>(csv), Errc::kIo, "cannot write '" + paths.csv.string() + "'");
  write_samples_csv(report, csv);
  return paths;
}

std::vector<GridPoint> parse_grid(std::string_view text) {
  const json j = parse_json_text(text);
  const json* points = &j;
  if (j.is_object()) {
    check_schema_version(j);
    points = &field(j, "points");
  }
  require(points->is_array(), Errc::kInvalidArgument, "grid must be an array of points");
  std::vector<GridPoint> grid;
  for (const auto& p : *points) {
    if (p.is_array()) {
      require(p.size() == 2, Errc::kInvalidArgument, "grid point must be [sigma, epsilon]");
      grid.emplace_back(get_as<double>(p[0], "sigma"), get_as<double>(p[1], "epsilon"));
    } else {
      grid.emplace_back(required<double>(p, "sigma"), required<double>(p, "epsilon"));
    }
  }
  return grid;
}

std::vector<GridPoint> read_grid(const std::filesystem::path& path) { return parse_grid(read_file(path)); }

std::vector<ExperimentReport> phase_sweep(const std::vector<GridPoint>& grid, const ExperimentConfig& base) {
  std::vector<ExperimentConfig> configs;
  configs.reserve(grid.size());
  for (const auto& [sigma, epsilon] : grid) {
    ExperimentConfig c = base;
    c.sigma = sigma;
    c.epsilon = epsilon;
    validate(c);
    configs.push_back(std::move(c));
  }
  std::vector<ExperimentReport> reports;
  reports.reserve(configs.size());
  for (const auto& c : configs) reports.push_back(run_experiment(c));
  return reports;
}

void write_phase_csv(const std::vector<ExperimentReport>& reports, std::ostream& out) {
  out << "sigma,epsilon,regime,modal_bond,median_break_time\n";
  out.precision(17);
  for (const auto& r : reports) {
    out << r.config.sigma << ',' << r.config.epsilon << ',' << to_string(r.regime.tag) << ','
        << r.positions.modal_bond << ',';
    if (r.median_break_time) out << *r.median_break_time;
    out << '\n';
  }
}

}  // namespace chainbreak
