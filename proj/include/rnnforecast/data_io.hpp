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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rnnforecast {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Regularity { kRegular, kIrregular, kSlow };

std::string_view to_string(Regularity r);
Regularity parse_regularity(std::string_view s);

/// Uniformly sampled 3D trajectories of `n_markers` markers.
///
/// Row k of `positions` holds [m1x, m1y, m1z, m2x, ..., ] in millimeters at
/// `times[k]` seconds.
struct MarkerSequence {
  double sample_rate_hz = 10.0;
  std::vector<double> times;
  RowMatrix positions;
  Regularity label = Regularity::kRegular;

  std::size_t length() const { return times.size(); }
  std::size_t coordinates() const { return static_cast<std::size_t>(positions.cols()); }
  std::size_t markers() const { return coordinates() / 3; }
  double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }

  /// Throws ArgumentError if any invariant is violated.
  void validate() const;
};

/// Half-open index range [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
};

/// Train / cross-validation / test split of one sequence, by sample index.
struct SequencePartition {
  IndexRange train;
  IndexRange cross_validation;
  IndexRange test;
};

enum class PartitionKind {
  kOnline,   // train [0, 30 s), cv [30 s, 60 s), test [60 s, end)
  kOffline,  // train [0, 54 s), cv [54 s, 60 s), test [60 s, end)
};

inline constexpr double kTestStartSeconds = 60.0;

SequencePartition make_partition(const MarkerSequence& seq, PartitionKind kind);

/// First sample index whose time offset from the start is >= `seconds`.
std::size_t index_at_seconds(const MarkerSequence& seq, double seconds);

struct NormStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
};

struct LoadOptions {
  std::size_t n_markers = 3;
  /// Rate assumed for files with fewer than two rows.
  double nominal_rate_hz = 10.0;
  Regularity label = Regularity::kRegular;
};

/// Loads a delimiter-separated file (comma, semicolon, tab or spaces) with
/// columns t, m1x, m1y, m1z, ... An optional non-numeric header row is
/// skipped. The sample rate is inferred from the timestamps.
MarkerSequence load_sequence(const std::filesystem::path& path, const LoadOptions& options = {});
MarkerSequence parse_sequence(std::string_view text, const LoadOptions& options = {});

/// Writes the same comma-separated layout `load_sequence` reads.
void save_sequence(const MarkerSequence& seq, const std::filesystem::path& path);

/// Keeps samples 0, factor, 2 factor, ...
MarkerSequence downsample(const MarkerSequence& seq, int factor);

/// Natural cubic spline interpolation to `target_hz` followed by Gaussian
/// noise on the interpolated (off-grid) points and truncation to one decimal.
/// The noise standard deviation of a coordinate is `gamma` times its range.
MarkerSequence upsample_with_noise(const MarkerSequence& seq, double target_hz, double gamma,
                                   std::uint64_t rng_seed);

inline constexpr double kDefaultNoiseGamma = 1.0 / 150.0;

struct ResampleMetadata {
  double source_rate_hz = 0.0;
  double target_rate_hz = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
};

/// Resamples to a rate of the form source * k or source / k (k integer).
/// Returns the input unchanged when the rates coincide.
MarkerSequence resample(const MarkerSequence& seq, double target_hz, double gamma,
                        std::uint64_t rng_seed);

void save_resample_metadata(const ResampleMetadata& meta, const std::filesystem::path& path);
ResampleMetadata load_resample_metadata(const std::filesystem::path& path);

/// Truncates toward zero to one decimal place. Values already printed with one
/// decimal survive unchanged despite binary representation error.
double truncate_one_decimal(double v);

/// Snaps nominal labels such as 3.33 to the exact rate 10/3 Hz.
double canonical_rate(double hz);

/// Per-coordinate mean and population standard deviation over `part.train`.
/// A constant coordinate raises DegenerateDataError unless
/// `unit_scale_constant`, which keeps its mean and uses a unit scale.
NormStats fit_norm_stats(const MarkerSequence& seq, const SequencePartition& part,
                         bool unit_scale_constant = false);

Eigen::VectorXd normalize(const Eigen::VectorXd& v, const NormStats& stats);
Eigen::VectorXd denormalize(const Eigen::VectorXd& pred, const NormStats& stats);

struct WindowedExample {
  std::size_t step = 0;          // n
  std::size_t target_index = 0;  // n + L + h - 1
  Eigen::VectorXd input;         // [1, normalized rows n .. n+L-1]
  Eigen::VectorXd target;        // normalized row n+L+h-1
};

/// Lazily materialized supervised windows over a normalized copy of a
/// sequence. Cheap to copy the view; the normalized data is shared.
class WindowStream {
 public:
  WindowStream(const MarkerSequence& seq, const NormStats& stats, std::size_t shl_steps,
               std::size_t horizon_steps);

  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  /// True when the sequence was shorter than L + h and no windows exist.
  bool too_short() const { return too_short_; }

  std::size_t shl() const { return shl_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t input_size() const { return 1 + shl_ * coords_; }  // m + 1
  std::size_t output_size() const { return coords_; }            // p

  WindowedExample at(std::size_t n) const;
  /// Normalized coordinates of sample `index` (used for no-prediction style
  /// look-ups).
  Eigen::VectorXd row(std::size_t index) const;

 private:
  std::shared_ptr<const RowMatrix> normalized_;
  std::size_t coords_ = 0;
  std::size_t shl_ = 0;
  std::size_t horizon_ = 0;
  std::size_t count_ = 0;
  bool too_short_ = false;
};

/// Eager convenience wrapper around WindowStream.
std::vector<WindowedExample> make_windows(const MarkerSequence& seq, const NormStats& stats,
                                          std::size_t shl_steps, std::size_t horizon_steps);

}  // namespace rnnforecast
