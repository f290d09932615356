/*
 * Copyright 2026 The chainbreak Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libchainbreak.
 *
 * Every fallible call returns a cb_status. On failure, cb_last_error()
 * returns a message for the calling thread that stays valid until that
 * thread's next failing call. Strings handed out through char** must be
 * released with cb_string_free; opaque handles with their *_destroy.
 * Destroy functions accept NULL.
 */

#ifndef CHAINBREAK_CHAINBREAK_H_
#define CHAINBREAK_CHAINBREAK_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CHAINBREAK_BUILDING)
#define CB_API __declspec(dllexport)
#else
#define CB_API __declspec(dllimport)
#endif
#else
#define CB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cb_status {
  CB_OK = 0,
  CB_ERR_INVALID_DIMENSION = 1, /* d < 2 */
  CB_ERR_INVALID_THRESHOLD = 2, /* threshold <= 1 */
  CB_ERR_NO_DRIVING = 3,        /* sigma == epsilon == 0 */
  CB_ERR_INVALID_ARGUMENT = 4,
  CB_ERR_OUT_OF_RANGE = 5,
  CB_ERR_STABILITY = 6,
  CB_ERR_EXPECTED_COUNT = 7,
  CB_ERR_SCHEMA_VERSION = 8,
  CB_ERR_MALFORMED_JSON = 9,
  CB_ERR_MISSING_FIELD = 10,
  CB_ERR_IO = 11,
  CB_ERR_EXPERIMENT_ABORTED = 12,
  CB_ERR_INTERNAL = 13
} cb_status;

typedef enum cb_surface {
  CB_SURFACE_FULL_CHAIN = 0,
  CB_SURFACE_STATIONARY_FIXED = 1,
  CB_SURFACE_STATIONARY_MOVING = 2
} cb_surface;

typedef struct cb_model cb_model;
typedef struct cb_config cb_config;
typedef struct cb_report cb_report;

typedef struct cb_sim_config {
  double dt;
  double t_max;
  int stationary_start; /* 0: chain at rest, 1: stationary fluctuations */
  int trace_every;
  int refine_crossing;
  int bridge_correction;
} cb_sim_config;

typedef struct cb_break_result {
  double break_time;
  int break_bond; /* 1..d, 0 when censored */
  int censored;
  uint64_t steps;
} cb_break_result;

CB_API const char* cb_version(void);
CB_API const char* cb_status_name(cb_status status);
CB_API const char* cb_last_error(void);
CB_API void cb_string_free(char* s);

/* splitmix64_finalize(master + (index + 1) * 0x9E3779B97F4A7C15). */
CB_API uint64_t cb_derive_seed(uint64_t master, uint64_t index);

/* ---- chain model ---------------------------------------------------- */

CB_API cb_status cb_model_create(int d, double sigma, double epsilon, double threshold, cb_model** out);
CB_API void cb_model_destroy(cb_model* model);
CB_API int cb_model_bonds(const cb_model* model);

/* Eigenvalues of the interaction matrix, length d-1. */
CB_API cb_status cb_model_eigenvalues(const cb_model* model, double* out, size_t len);
/* Delta_t, length d-1. */
CB_API cb_status cb_model_deterministic_delta(const cb_model* model, double t, double* out, size_t len);
/* Bond lengths (length d) for eigen-coordinates w (length d-1) at time t. */
CB_API cb_status cb_model_gaps(const cb_model* model, const double* w, size_t w_len, double t, double* out,
                               size_t out_len);
/* Row-major d x d stationary bond covariance at lag t. */
CB_API cb_status cb_model_gap_covariance(const cb_model* model, double t, double* out, size_t len);

/* ---- single trajectories --------------------------------------------- */

CB_API void cb_sim_config_default(cb_sim_config* cfg);
/* trace_csv_path may be NULL; otherwise a trace (t,gap_1..gap_d) is written there. */
CB_API cb_status cb_simulate(const cb_model* model, const cb_sim_config* cfg, cb_surface surface, uint64_t seed,
                             const char* trace_csv_path, cb_break_result* out);

/* ---- theory ----------------------------------------------------------- */

/* All limit-law constants for (d, sigma, epsilon) as a JSON object. */
CB_API cb_status cb_theory_json(int d, double sigma, double epsilon, char** out_json);

/* ---- experiments ------------------------------------------------------ */

CB_API cb_status cb_config_parse(const char* json_text, cb_config** out);
CB_API cb_status cb_config_read(const char* path, cb_config** out);
CB_API cb_status cb_config_to_json(const cb_config* cfg, char** out_json);
CB_API void cb_config_destroy(cb_config* cfg);
CB_API cb_status cb_config_set_workers(cb_config* cfg, int workers);
/* Borrowed pointer, valid while cfg lives; "" when unset. */
CB_API const char* cb_config_output_path(const cb_config* cfg);

/* One trajectory of the configured experiment with an explicit seed. */
CB_API cb_status cb_config_simulate(const cb_config* cfg, uint64_t seed, const char* trace_csv_path,
                                    cb_break_result* out);

CB_API cb_status cb_experiment_run(const cb_config* cfg, cb_report** out);
CB_API void cb_report_destroy(cb_report* report);
CB_API size_t cb_report_record_count(const cb_report* report);
CB_API cb_status cb_report_json(const cb_report* report, int include_timing, char** out_json);
/* Writes the JSON report to json_path and the samples CSV next to it. */
CB_API cb_status cb_report_write(const cb_report* report, const char* json_path);

/* Runs one experiment per grid point. Reports go to <stem>_<k>.json next to
 * the base config's output_path when it is set; the combined summary CSV is
 * written to summary_csv_path. summary_json (optional) receives an array of
 * per-point summaries. */
CB_API cb_status cb_phase_sweep(const cb_config* base, const char* grid_path, const char* summary_csv_path,
                                char** summary_json);

/* ---- self check ------------------------------------------------------- */

/* Runs the invariant suite. *failures receives the number of failed checks,
 * *log_text (optional) one PASS/FAIL line per check. */
CB_API cb_status cb_verify(int* failures, char** log_text);

#ifdef __cplusplus
}
#endif

#endif /* CHAINBREAK_CHAINBREAK_H_ */
