/*
 * Copyright (c) rnnforecast contributors.
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
#ifndef RNNFORECAST_RNNFORECAST_H_
#define RNNFORECAST_RNNFORECAST_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RF_API __declspec(dllexport)
#else
#define RF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rf_status {
  RF_OK = 0,
  RF_ERR_ARGUMENT = 1,
  RF_ERR_PARSE = 2,
  RF_ERR_IO = 3,
  RF_ERR_NUMERIC = 4,
  RF_ERR_DEGENERATE = 5,
  RF_ERR_CONVERGENCE = 6,
  RF_ERR_CONFIG = 7,
  RF_ERR_PARTIAL = 8, /* some sweep cells failed; see the returned report */
  RF_ERR_INTERNAL = 99
} rf_status;

typedef enum rf_label { RF_LABEL_REGULAR = 0, RF_LABEL_IRREGULAR = 1, RF_LABEL_SLOW = 2 } rf_label;

typedef struct rf_sequence rf_sequence;
typedef struct rf_trainer rf_trainer;

/* Message of the last failing call on this thread; empty after success. */
RF_API const char* rf_last_error(void);
RF_API const char* rf_version(void);
/* Frees strings returned through char** out-parameters. */
RF_API void rf_string_free(char* s);

/* ---- sequences ---- */

RF_API rf_status rf_sequence_load(const char* path, size_t n_markers, rf_label label,
                                  rf_sequence** out);
/* positions: row-major, n rows of 3 * n_markers coordinates. */
RF_API rf_status rf_sequence_create(const double* times, const double* positions, size_t n,
                                    size_t n_markers, double rate_hz, rf_sequence** out);
RF_API rf_status rf_sequence_save(const rf_sequence* seq, const char* path);
RF_API rf_status rf_sequence_resample(const rf_sequence* seq, double target_hz, double gamma,
                                      uint64_t seed, rf_sequence** out);
RF_API size_t rf_sequence_length(const rf_sequence* seq);
RF_API size_t rf_sequence_coords(const rf_sequence* seq);
RF_API double rf_sequence_rate(const rf_sequence* seq);
/* Copies length * coords values, row-major. */
RF_API rf_status rf_sequence_positions(const rf_sequence* seq, double* out, size_t capacity);
RF_API void rf_sequence_free(rf_sequence* seq);

/* Resamples one file to each rate in `rates_hz`. Writes
   <out_dir>/<stem>_<rate>Hz.csv plus a .json sidecar per rate. A negative
   gamma selects the default noise level. */
RF_API rf_status rf_resample_file(const char* in_path, const char* out_dir,
                                  const double* rates_hz, size_t n_rates, double gamma,
                                  uint64_t seed, size_t n_markers);

/* ---- single online learners ---- */

typedef struct rf_online_params {
  double eta;
  int64_t hidden;
  double clip_threshold;
  double sigma_init;
  double eta_a;
} rf_online_params;

/* Defaults: eta 0.01, hidden 30, clip 100, sigma_init 0.02, eta_a 0.002. */
RF_API rf_online_params rf_online_params_default(void);

/* `algorithm` is one of rtrl, uoro, snap1, dni, dni-simplified, frozen, lms.
   `inputs` counts the leading bias entry (m + 1). */
RF_API rf_status rf_trainer_create(const char* algorithm, size_t inputs, size_t outputs,
                                   const rf_online_params* params, uint64_t seed,
                                   rf_trainer** out);
/* Predicts from `input`, then learns from `target`; writes `outputs`
   values to `prediction`. */
RF_API rf_status rf_trainer_step(rf_trainer* trainer, const double* input, const double* target,
                                 double* prediction);
RF_API void rf_trainer_free(rf_trainer* trainer);

/* ---- experiments ----
   Options and configs are JSON text. Results come back as JSON strings to be
   released with rf_string_free. */

/* options: {"algorithm", "frequency", "horizon", "seed", "workers", "preset",
   "overrides", "gamma", "params": {eta, shl_seconds, hidden, svr_sqrt2_sigma,
   svr_epsilon, svr_c}, "predictions_path"}. Without "params" the preset grid
   is cross-validated first. */
RF_API rf_status rf_run_one(const rf_sequence* seq, const char* options_json, char** result_json);

/* Runs a sweep described by an experiment config and writes results.csv,
   summary.csv, marginals.csv and long.csv into the output directory. Returns
   RF_ERR_PARTIAL when any cell failed; the report lists them. */
typedef void (*rf_progress_fn)(const char* line, void* user);
RF_API rf_status rf_sweep(const char* config_json, const char* base_dir, rf_progress_fn progress,
                          void* user, char** report_json);

/* Writes profile.csv and profile_table.csv for the configured algorithms and
   frequencies. */
RF_API rf_status rf_profile(const char* config_json, char** report_json);

/* Rebuilds long.csv, summary.csv and marginals.csv from an existing
   results.csv without recomputing anything. */
RF_API rf_status rf_export(const char* results_csv, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* RNNFORECAST_RNNFORECAST_H_ */
