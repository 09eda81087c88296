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
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "rnnforecast/data_io.hpp"
#include "rnnforecast/metrics.hpp"
#include "rnnforecast/online_trainers.hpp"

namespace rnnforecast {

/// One grid point. Fields that an algorithm does not use stay at zero.
struct HyperParams {
  double eta = 0.0;
  double shl_seconds = 0.0;
  Eigen::Index hidden = 0;
  double svr_sqrt2_sigma = 0.0;  // the grid is expressed in sqrt(2) sigma
  double svr_epsilon = 0.0;
  double svr_c = 0.0;

  auto key() const {
    return std::tie(eta, shl_seconds, hidden, svr_sqrt2_sigma, svr_epsilon, svr_c);
  }
  bool operator<(const HyperParams& o) const { return key() < o.key(); }
  bool operator==(const HyperParams& o) const { return key() == o.key(); }
};

/// Settings shared by every grid point.
struct FixedSettings {
  double clip_threshold = kDefaultClipThreshold;
  double sigma_init = kDefaultSigmaInit;
  double eta_a = kDefaultCreditLearningRate;
  std::size_t n_cv = 50;
  std::size_t n_test = 300;
};

struct GridSpec {
  std::vector<double> eta;
  std::vector<double> shl_seconds;
  std::vector<Eigen::Index> hidden;
  std::vector<Eigen::Index> hidden_rtrl;
  /// LMS learning rates keyed by sampling rate; the nearest rate applies.
  std::vector<std::pair<double, std::vector<double>>> lms_eta;
  std::vector<double> svr_sqrt2_sigma;
  std::vector<double> svr_epsilon;
  std::vector<double> svr_c;
  FixedSettings fixed;

  /// Full grids with 50 cross-validation and 300 test runs.
  static GridSpec paper();
  /// Reduced grids with n_cv = 5 and n_test = 10 for quick runs.
  static GridSpec desk();

  /// Grid points for `algo`, sorted lexicographically (eta, L, q, SVR).
  std::vector<HyperParams> points(Algorithm algo, double rate_hz) const;
};

/// Signal history length in samples, round(f L_s), at least 1.
std::size_t shl_steps(double shl_seconds, double rate_hz);
/// Horizon in samples. Throws ArgumentError unless h f is an integer.
std::size_t horizon_steps(double horizon_seconds, double rate_hz);
bool horizon_fits(double horizon_seconds, double rate_hz);
/// {0.3, 0.6, ..., 2.1} s at 3.33 Hz; {0.1, 0.2, ..., 2.1} s otherwise.
std::vector<double> default_horizons(double rate_hz);

enum class Phase { kCrossValidation, kTest };

/// Denormalized predictions and ground truth of one run over the scored
/// interval (cross-validation or test), one row per target index.
struct ScoredRun {
  Eigen::MatrixXd prediction;
  Eigen::MatrixXd truth;
  std::vector<std::size_t> target_indices;
};

/// Runs one seeded pass of `algo`.
///
/// Online learners process every window in time order and never stop
/// learning; offline models are fit once on [0, 54 s). During
/// cross-validation nothing at or beyond 60 s is read. Returns nullopt when
/// the (L, h) pair leaves no scored example.
std::optional<ScoredRun> run_once(const MarkerSequence& seq, Algorithm algo,
                                  const HyperParams& params, std::size_t horizon_steps,
                                  Phase phase, const FixedSettings& fixed, std::uint64_t seed);

struct CvOutcome {
  HyperParams best;
  double cv_rmse = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::vector<std::pair<HyperParams, double>> scores;
};

/// Grid search: mean cross-validation RMSE over n_cv seeded runs per point
/// (one run for deterministic algorithms); ties go to the smallest point.
CvOutcome cross_validate(const MarkerSequence& seq, Algorithm algo,
                         const std::vector<HyperParams>& points, double horizon_seconds,
                         const FixedSettings& fixed, std::uint64_t seed, std::size_t workers = 1);
CvOutcome cross_validate(const MarkerSequence& seq, Algorithm algo, const GridSpec& grid,
                         double horizon_seconds, std::uint64_t seed, std::size_t workers = 1);

struct Evaluation {
  MetricsReport report;
  std::vector<RunMetrics> runs;
  ScoredRun first_run;  // kept for plotting exports
};

/// Test-set metrics over n_test seeded runs (one for deterministic
/// algorithms).
Evaluation evaluate(const MarkerSequence& seq, Algorithm algo, const HyperParams& params,
                    double horizon_seconds, const FixedSettings& fixed, std::uint64_t seed,
                    std::size_t workers = 1);

struct NamedSequence {
  std::string name;
  MarkerSequence sequence;  // at its native rate
};

struct SweepSpec {
  std::vector<double> rates_hz;
  /// Empty means default_horizons(rate). Pairs whose h f is not integral are
  /// skipped.
  std::vector<double> horizons;
  std::vector<Algorithm> algorithms;
  double gamma = kDefaultNoiseGamma;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct ResultRow {
  std::string sequence;
  Regularity label = Regularity::kRegular;
  Algorithm algorithm = Algorithm::kNoPrediction;
  double rate_hz = 0.0;
  double horizon_s = 0.0;
  std::size_t horizon_steps = 0;
  HyperParams params;
  double cv_rmse = 0.0;
  MetricsReport report;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

using ProgressFn = std::function<void(const ResultRow&)>;

/// Seed used for the resampled copy of a sequence at a given rate.
std::uint64_t resample_seed(std::uint64_t master, const std::string& sequence, double rate_hz);

/// Cross-validates and evaluates every (sequence, rate, algorithm, horizon)
/// cell. Failures are recorded per row and the sweep continues.
std::vector<ResultRow> sweep(const std::vector<NamedSequence>& sequences, const SweepSpec& spec,
                             const GridSpec& grid, const ProgressFn& progress = {});

/// Marginal means of the per-cell metric means (and of their CI half-widths).
struct SummaryRow {
  Algorithm algorithm = Algorithm::kNoPrediction;
  double rate_hz = 0.0;
  std::string group;  // "all", "regular" or "irregular" (slow excluded)
  std::optional<double> horizon_s;  // set for per-horizon marginals
  MetricsReport metrics;
  std::size_t cells = 0;
};

std::vector<SummaryRow> summarize_results(const std::vector<ResultRow>& rows);

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);
/// Summary grid: one line per (metric, algorithm), two columns (mean,
/// ci95) per rate, averaged over sequences and horizons.
void write_summary_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
void write_marginals_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
/// Tidy long table: one line per (cell, metric). Header only for no rows.
void write_long_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
void write_predictions_csv(const ScoredRun& run, const MarkerSequence& seq,
                           const std::filesystem::path& path);

struct ProfileCell {
  Algorithm algorithm = Algorithm::kSnap1;
  double rate_hz = 0.0;
  Eigen::Index hidden = 0;
  double shl_seconds = 0.0;
  std::size_t inputs = 0;  // m
  std::size_t steps = 0;
  double median_seconds = 0.0;
};

/// Median wall time per step after a warm-up, for each (q, L_s) pair on a
/// synthetic three-marker signal. `steps == 0` yields an empty profile.
std::vector<ProfileCell> time_profile(Algorithm algo, const std::vector<Eigen::Index>& hidden,
                                      const std::vector<double>& shl_seconds, double rate_hz,
                                      std::size_t steps = 1000, std::uint64_t seed = 0);

void write_profile_csv(const std::vector<ProfileCell>& cells, const std::filesystem::path& path);
/// Algorithms x rates grid of the mean (over cells) median step time, in ms.
void write_profile_table_csv(const std::vector<ProfileCell>& cells,
                             const std::filesystem::path& path);

/// Noise-free sum-of-sinusoids marker trajectories used by tests, profiling
/// and examples. Periods around 4 s with per-marker phase and amplitude.
MarkerSequence synthetic_breathing(double duration_s, double rate_hz, std::size_t n_markers,
                                   std::uint64_t seed);

}  // namespace rnnforecast
