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

#include "chainbreak/chainbreak.h"

#include "chainbreak/errors.hpp"
#include "chainbreak/harness.hpp"
#include "chainbreak/verify.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

struct cb_model {
  chainbreak::ChainModel model;
};

struct cb_config {
  chainbreak::ExperimentConfig config;
};

struct cb_report {
  chainbreak::ExperimentReport report;
};

namespace {

using chainbreak::Errc;

thread_local std::string g_last_error;

template <typename F>
cb_status guarded(F&& body) noexcept {
  try {
    body();
    return CB_OK;
  } catch (const chainbreak::Error& e) {
    g_last_error = e.what();
    return static_cast<cb_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CB_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  chainbreak::require(p != nullptr, Errc::kInvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

chainbreak::SimConfig to_cpp(const cb_sim_config& c) {
  chainbreak::SimConfig s;
  s.dt = c.dt;
  s.t_max = c.t_max;
  s.initial_mode = c.stationary_start ? chainbreak::InitialMode::kStationary : chainbreak::InitialMode::kZero;
  s.trace_every = c.trace_every;
  s.refine_crossing = c.refine_crossing != 0;
  s.bridge_correction = c.bridge_correction != 0;
  return s;
}

void fill(const chainbreak::BreakResult& r, cb_break_result* out) {
  out->break_time = r.break_time;
  out->break_bond = r.break_bond;
  out->censored = r.censored ? 1 : 0;
  out->steps = r.steps;
}

void write_trace(const chainbreak::BreakResult& r, int d, const char* path) {
  std::ofstream out(path);
  chainbreak::require(static_cast<bool>(out), Errc::kIo, std::string("cannot write '") + path + "'");
  chainbreak::write_trace_csv(r, d, out);
}

void check_len(size_t got, size_t want) {
  chainbreak::require(got >= want, Errc::kInvalidArgument,
                      "output buffer holds " + std::to_string(got) + " values, need " + std::to_string(want));
}

}  // namespace

extern "C" {

const char* cb_version(void) { return "1.0.0"; }

const char* cb_status_name(cb_status status) {
  switch (status) {
    case CB_OK:
      return "ok";
    case CB_ERR_INVALID_DIMENSION:
      return "invalid_dimension";
    case CB_ERR_INVALID_THRESHOLD:
      return "invalid_threshold";
    case CB_ERR_NO_DRIVING:
      return "no_driving";
    case CB_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case CB_ERR_OUT_OF_RANGE:
      return "out_of_range";
    case CB_ERR_STABILITY:
      return "stability";
    case CB_ERR_EXPECTED_COUNT:
      return "expected_count";
    case CB_ERR_SCHEMA_VERSION:
      return "schema_version";
    case CB_ERR_MALFORMED_JSON:
      return "malformed_json";
    case CB_ERR_MISSING_FIELD:
      return "missing_field";
    case CB_ERR_IO:
      return "io";
    case CB_ERR_EXPERIMENT_ABORTED:
      return "experiment_aborted";
    case CB_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

const char* cb_last_error(void) { return g_last_error.c_str(); }

void cb_string_free(char* s) { std::free(s); }

uint64_t cb_derive_seed(uint64_t master, uint64_t index) { return chainbreak::derive_seed(master, index); }

cb_status cb_model_create(int d, double sigma, double epsilon, double threshold, cb_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = new cb_model{chainbreak::build_chain(d, sigma, epsilon, threshold)};
  });
}

void cb_model_destroy(cb_model* model) { delete model; }

int cb_model_bonds(const cb_model* model) { return model == nullptr ? 0 : model->model.d; }

cb_status cb_model_eigenvalues(const cb_model* model, double* out, size_t len) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const auto& l = model->model.spectral.lambdas;
    check_len(len, l.size());
    std::copy(l.begin(), l.end(), out);
  });
}

cb_status cb_model_deterministic_delta(const cb_model* model, double t, double* out, size_t len) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const chainbreak::Vector delta = chainbreak::deterministic_delta(model->model, t);
    check_len(len, delta.size());
    std::copy(delta.begin(), delta.end(), out);
  });
}

cb_status cb_model_gaps(const cb_model* model, const double* w, size_t w_len, double t, double* out,
                        size_t out_len) {
  return guarded([&] {
    need(model, "model");
    need(w, "w");
    need(out, "out");
    const chainbreak::EigenState state{chainbreak::Vector(w, w + w_len), t};
    const chainbreak::Vector g = chainbreak::gaps(model->model, state);
    check_len(out_len, g.size());
    std::copy(g.begin(), g.end(), out);
  });
}

cb_status cb_model_gap_covariance(const cb_model* model, double t, double* out, size_t len) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const Eigen::MatrixXd c = chainbreak::stationary_gap_covariance(model->model, t);
    check_len(len, static_cast<size_t>(c.size()));
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      for (Eigen::Index j = 0; j < c.cols(); ++j) out[i * c.cols() + j] = c(i, j);
  });
}

void cb_sim_config_default(cb_sim_config* cfg) {
  if (cfg == nullptr) return;
  const chainbreak::SimConfig s;
  cfg->dt = s.dt;
  cfg->t_max = s.t_max;
  cfg->stationary_start = 0;
  cfg->trace_every = s.trace_every;
  cfg->refine_crossing = s.refine_crossing ? 1 : 0;
  cfg->bridge_correction = s.bridge_correction ? 1 : 0;
}

cb_status cb_simulate(const cb_model* model, const cb_sim_config* cfg, cb_surface surface, uint64_t seed,
                      const char* trace_csv_path, cb_break_result* out) {
  return guarded([&] {
    need(model, "model");
    need(cfg, "cfg");
    need(out, "out");
    chainbreak::SimConfig sim = to_cpp(*cfg);
    sim.record_trace = trace_csv_path != nullptr;
    chainbreak::BreakResult r;
    switch (surface) {
      case CB_SURFACE_FULL_CHAIN:
        r = chainbreak::simulate_break(model->model, sim, seed);
        break;
      case CB_SURFACE_STATIONARY_FIXED:
        r = chainbreak::simulate_stationary_level(model->model, sim, seed, false);
        break;
      case CB_SURFACE_STATIONARY_MOVING:
        r = chainbreak::simulate_stationary_level(model->model, sim, seed, true);
        break;
      default:
        chainbreak::fail(Errc::kInvalidArgument, "unknown surface");
    }
    if (trace_csv_path != nullptr) write_trace(r, model->model.d, trace_csv_path);
    fill(r, out);
  });
}

cb_status cb_theory_json(int d, double sigma, double epsilon, char** out_json) {
  return guarded([&] {
    need(out_json, "out_json");
    *out_json = dup_string(chainbreak::theory_json(d, sigma, epsilon).dump(2));
  });
}

cb_status cb_config_parse(const char* json_text, cb_config** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = new cb_config{chainbreak::parse_config(json_text)};
  });
}

cb_status cb_config_read(const char* path, cb_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new cb_config{chainbreak::read_config(path)};
  });
}

cb_status cb_config_to_json(const cb_config* cfg, char** out_json) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out_json, "out_json");
    *out_json = dup_string(chainbreak::to_json(cfg->config).dump(2));
  });
}

void cb_config_destroy(cb_config* cfg) { delete cfg; }

cb_status cb_config_set_workers(cb_config* cfg, int workers) {
  return guarded([&] {
    need(cfg, "cfg");
    chainbreak::require(workers >= 1, Errc::kInvalidArgument, "workers must be >= 1");
    cfg->config.workers = workers;
  });
}

const char* cb_config_output_path(const cb_config* cfg) {
  return cfg == nullptr ? "" : cfg->config.output_path.c_str();
}

cb_status cb_config_simulate(const cb_config* cfg, uint64_t seed, const char* trace_csv_path,
                             cb_break_result* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    chainbreak::ExperimentConfig c = cfg->config;
    c.sim.record_trace = trace_csv_path != nullptr;
    chainbreak::validate(c);
    const chainbreak::BreakResult r = chainbreak::simulate_one(c, seed);
    if (trace_csv_path != nullptr) write_trace(r, c.d, trace_csv_path);
    fill(r, out);
  });
}

cb_status cb_experiment_run(const cb_config* cfg, cb_report** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = new cb_report{chainbreak::run_experiment(cfg->config)};
  });
}

void cb_report_destroy(cb_report* report) { delete report; }

size_t cb_report_record_count(const cb_report* report) {
  return report == nullptr ? 0 : report->report.records.size();
}

cb_status cb_report_json(const cb_report* report, int include_timing, char** out_json) {
  return guarded([&] {
    need(report, "report");
    need(out_json, "out_json");
    *out_json = dup_string(chainbreak::to_json(report->report, include_timing != 0).dump(2));
  });
}

cb_status cb_report_write(const cb_report* report, const char* json_path) {
  return guarded([&] {
    need(report, "report");
    need(json_path, "json_path");
    chainbreak::write_report(report->report, json_path);
  });
}

cb_status cb_phase_sweep(const cb_config* base, const char* grid_path, const char* summary_csv_path,
                         char** summary_json) {
  return guarded([&] {
    need(base, "base");
    need(grid_path, "grid_path");
    need(summary_csv_path, "summary_csv_path");
    const auto grid = chainbreak::read_grid(grid_path);
    const auto reports = chainbreak::phase_sweep(grid, base->config);
    const std::filesystem::path out_base = base->config.output_path;
    nlohmann::json summary = nlohmann::json::array();
    for (std::size_t k = 0; k < reports.size(); ++k) {
      const auto& r = reports[k];
      nlohmann::json item{{"sigma", r.config.sigma},
                          {"epsilon", r.config.epsilon},
                          {"regime", chainbreak::to_string(r.regime.tag)},
                          {"modal_bond", r.positions.modal_bond},
                          {"median_break_time", r.median_break_time ? nlohmann::json(*r.median_break_time)
                                                                    : nlohmann::json(nullptr)}};
      if (!out_base.empty()) {
        std::filesystem::path p = out_base;
        p.replace_filename(out_base.stem().string() + "_" + std::to_string(k) + ".json");
        item["report"] = chainbreak::write_report(r, p).json.string();
      }
      summary.push_back(std::move(item));
    }
    {
      const std::filesystem::path csv_path = summary_csv_path;
      if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
      std::ofstream csv(csv_path);
      chainbreak::require(static_cast<bool>(csv), Errc::kIo,
                          std::string("cannot write '") + summary_csv_path + "'");
      chainbreak::write_phase_csv(reports, csv);
    }
    if (summary_json != nullptr) *summary_json = dup_string(summary.dump(2));
  });
}

cb_status cb_verify(int* failures, char** log_text) {
  return guarded([&] {
    need(failures, "failures");
    const auto results = chainbreak::run_invariant_suite();
    std::ostringstream log;
    int failed = 0;
    for (const auto& r : results) {
      log << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
      if (!r.passed) ++failed;
    }
    *failures = failed;
    if (log_text != nullptr) *log_text = dup_string(log.str());
  });
}

}  // extern "C"
