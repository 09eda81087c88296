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
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "rnnforecast/error.hpp"
#include "rnnforecast/harness.hpp"
#include "rnnforecast/offline_baselines.hpp"
#include "rnnforecast/seeding.hpp"

namespace rnnforecast {

MarkerSequence synthetic_breathing(double duration_s, double rate_hz, std::size_t n_markers,
                                   std::uint64_t seed) {
  if (duration_s <= 0.0 || rate_hz <= 0.0 || n_markers == 0)
    throw ArgumentError("synthetic_breathing needs positive duration, rate and marker count");
  Rng rng(derive_seed(seed, {hash_name("synthetic")}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double period = 3.6 + 0.8 * unit(rng);
  const double omega = 2.0 * std::numbers::pi / period;
  const auto n = static_cast<std::size_t>(std::floor(duration_s * rate_hz)) + 1;
  const auto p = static_cast<Eigen::Index>(3 * n_markers);

  Eigen::VectorXd amp(p), offset(p), phase(p), harmonic(p);
  const double axis_amp[3] = {1.5, 4.0, 8.0};
  for (Eigen::Index c = 0; c < p; ++c) {
    amp(c) = axis_amp[c % 3] * (0.7 + 0.6 * unit(rng));
    offset(c) = 100.0 * unit(rng) - 50.0;
    phase(c) = 0.5 * unit(rng) + 0.3 * static_cast<double>(c / 3);
    harmonic(c) = 2.0 * std::numbers::pi * unit(rng);
  }

  MarkerSequence seq;
  seq.sample_rate_hz = rate_hz;
  seq.times.resize(n);
  seq.positions.resize(static_cast<Eigen::Index>(n), p);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    seq.times[i] = t;
    for (Eigen::Index c = 0; c < p; ++c) {
      seq.positions(static_cast<Eigen::Index>(i), c) =
          offset(c) + amp(c) * std::sin(omega * t + phase(c)) +
          0.25 * amp(c) * std::sin(2.0 * omega * t + harmonic(c));
    }
  }
  return seq;
}

std::vector<ProfileCell> time_profile(Algorithm algo, const std::vector<Eigen::Index>& hidden,
                                      const std::vector<double>& shl_seconds, double rate_hz,
                                      std::size_t steps, std::uint64_t seed) {
  std::vector<ProfileCell> cells;
  if (steps == 0) return cells;
  rate_hz = canonical_rate(rate_hz);
  const std::vector<Eigen::Index> qs =
      has_hidden_layer(algo) ? hidden : std::vector<Eigen::Index>{0};
  const MarkerSequence seq = synthetic_breathing(90.0, rate_hz, 3, seed);
  constexpr std::size_t kWarmup = 100;
  constexpr std::size_t kCachedWindows = 256;

  for (Eigen::Index q : qs) {
    for (double ls : shl_seconds) {
      const bool offline = algo == Algorithm::kLinearRegression || algo == Algorithm::kSvr;
      const SequencePartition part =
          make_partition(seq, offline ? PartitionKind::kOffline : PartitionKind::kOnline);
      const NormStats stats = fit_norm_stats(seq, part, true);
      const std::size_t shl = shl_steps(ls, rate_hz);
      const WindowStream stream(seq, stats, shl, 1);
      if (stream.empty()) throw ArgumentError("profiling sequence too short for L");
      const auto in = static_cast<Eigen::Index>(stream.input_size());
      const auto out = static_cast<Eigen::Index>(stream.output_size());

      std::unique_ptr<Forecaster> f;
      if (algo == Algorithm::kLinearRegression) {
        f = make_fixed_forecaster(linreg_fit(collect_dataset(stream, part.train)));
      } else if (algo == Algorithm::kSvr) {
        f = make_fixed_forecaster(svr_fit(collect_dataset(stream, part.train),
                                          {100.0 / std::sqrt(2.0), 0.01, 100.0}));
      } else if (algo == Algorithm::kNoPrediction) {
        f = make_no_prediction_forecaster(out);
      } else {
        OnlineParams op;
        op.eta = algo == Algorithm::kLms ? 0.0002 : 0.01;
        op.hidden = q;
        f = make_online_forecaster(algo, in, out, op, seed);
      }

      std::vector<WindowedExample> windows;
      for (std::size_t n = 0; n < std::min(stream.size(), kCachedWindows); ++n)
        windows.push_back(stream.at(n));

      for (std::size_t i = 0; i < kWarmup; ++i) f->step(windows[i % windows.size()]);
      std::vector<double> times(steps);
      for (std::size_t i = 0; i < steps; ++i) {
        const auto& ex = windows[(i + kWarmup) % windows.size()];
        const auto t0 = std::chrono::steady_clock::now();
        f->step(ex);
        const auto t1 = std::chrono::steady_clock::now();
        times[i] = std::chrono::duration<double>(t1 - t0).count();
      }
      std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(steps / 2),
                       times.end());
      ProfileCell cell;
      cell.algorithm = algo;
      cell.rate_hz = rate_hz;
      cell.hidden = q;
      cell.shl_seconds = ls;
      cell.inputs = static_cast<std::size_t>(in - 1);
      cell.steps = steps;
      cell.median_seconds = times[steps / 2];
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace rnnforecast
