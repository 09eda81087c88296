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
#include "rnnforecast/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "rnnforecast/error.hpp"
#include "rnnforecast/offline_baselines.hpp"
#include "rnnforecast/seeding.hpp"
#include "rnnforecast/worker_pool.hpp"

namespace rnnforecast {

namespace {

constexpr double kThirdRate = 10.0 / 3.0;

bool same_rate(double a, double b) { return std::abs(a - b) < 1e-6 * std::max(1.0, b); }

std::uint64_t rate_code(double rate_hz) {
  return static_cast<std::uint64_t>(std::llround(rate_hz * 1000.0));
}

}  // namespace

GridSpec GridSpec::paper() {
  GridSpec g;
  g.eta = {0.005, 0.01, 0.02};
  g.shl_seconds = {1.2, 2.4, 3.6, 4.8, 6.0};
  g.hidden = {30, 60, 90, 120, 150, 180};
  g.hidden_rtrl = {10, 25, 40};
  g.lms_eta = {{kThirdRate, {0.0002, 0.0005, 0.001}},
               {10.0, {0.0001, 0.0002, 0.0005}},
               {30.0, {0.00005, 0.0001, 0.0002}}};
  g.svr_sqrt2_sigma = {100, 200, 500, 1000};
  g.svr_epsilon = {0.005, 0.01, 0.02, 0.05};
  g.svr_c = {100, 200, 500, 1000};
  g.fixed.n_cv = 50;
  g.fixed.n_test = 300;
  return g;
}

GridSpec GridSpec::desk() {
  GridSpec g = paper();
  g.eta = {0.01, 0.02};
  g.shl_seconds = {1.2, 2.4};
  g.hidden = {30, 60};
  g.hidden_rtrl = {10, 25};
  g.svr_sqrt2_sigma = {100, 1000};
  g.svr_epsilon = {0.01, 0.05};
  g.svr_c = {100, 1000};
  g.fixed.n_cv = 5;
  g.fixed.n_test = 10;
  return g;
}

std::vector<HyperParams> GridSpec::points(Algorithm algo, double rate_hz) const {
  std::vector<HyperParams> out;
  switch (algo) {
    case Algorithm::kRtrl:
    case Algorithm::kUoro:
    case Algorithm::kSnap1:
    case Algorithm::kDni:
    case Algorithm::kDniSimplified:
    case Algorithm::kFrozen: {
      const auto& qs = algo == Algorithm::kRtrl ? hidden_rtrl : hidden;
      for (double e : eta)
        for (double l : shl_seconds)
          for (Eigen::Index q : qs) out.push_back({e, l, q, 0, 0, 0});
      break;
    }
    case Algorithm::kLms: {
      if (lms_eta.empty()) throw ArgumentError("no LMS learning-rate grid configured");
      const auto nearest = std::min_element(lms_eta.begin(), lms_eta.end(), [&](auto& a, auto& b) {
        return std::abs(std::log(a.first / rate_hz)) < std::abs(std::log(b.first / rate_hz));
      });
      for (double e : nearest->second)
        for (double l : shl_seconds) out.push_back({e, l, 0, 0, 0, 0});
      break;
    }
    case Algorithm::kLinearRegression:
      for (double l : shl_seconds) out.push_back({0, l, 0, 0, 0, 0});
      break;
    case Algorithm::kSvr:
      for (double l : shl_seconds)
        for (double s : svr_sqrt2_sigma)
          for (double e : svr_epsilon)
            for (double c : svr_c) out.push_back({0, l, 0, s, e, c});
      break;
    case Algorithm::kNoPrediction: out.push_back({}); break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t shl_steps(double shl_seconds, double rate_hz) {
  const long long l = std::llround(shl_seconds * rate_hz);
  return l < 1 ? 1 : static_cast<std::size_t>(l);
}

bool horizon_fits(double horizon_seconds, double rate_hz) {
  const double x = horizon_seconds * rate_hz;
  return x >= 0.5 && std::abs(x - std::round(x)) <= 1e-6;
}

std::size_t horizon_steps(double horizon_seconds, double rate_hz) {
  if (!horizon_fits(horizon_seconds, rate_hz))
    throw ArgumentError("horizon " + std::to_string(horizon_seconds) + " s is not a whole number of samples at " +
                        std::to_string(rate_hz) + " Hz");
  return static_cast<std::size_t>(std::llround(horizon_seconds * rate_hz));
}

std::vector<double> default_horizons(double rate_hz) {
  std::vector<double> out;
  if (same_rate(rate_hz, kThirdRate)) {
    for (int k = 1; k <= 7; ++k) out.push_back(3.0 * k / 10.0);
  } else {
    for (int k = 1; k <= 21; ++k) out.push_back(k / 10.0);
  }
  return out;
}

std::optional<ScoredRun> run_once(const MarkerSequence& seq, Algorithm algo,
                                  const HyperParams& params, std::size_t horizon,
                                  Phase phase, const FixedSettings& fixed, std::uint64_t seed) {
  const bool offline = algo == Algorithm::kLinearRegression || algo == Algorithm::kSvr;
  const SequencePartition part =
      make_partition(seq, offline ? PartitionKind::kOffline : PartitionKind::kOnline);
  const NormStats stats = fit_norm_stats(seq, part, true);
  const std::size_t shl = shl_steps(params.shl_seconds, seq.sample_rate_hz);
  const WindowStream stream(seq, stats, shl, horizon);
  if (stream.empty()) return std::nullopt;

  const IndexRange scored = phase == Phase::kCrossValidation ? part.cross_validation : part.test;
  const std::size_t limit = phase == Phase::kCrossValidation ? scored.end : seq.length();
  const auto outputs = static_cast<Eigen::Index>(stream.output_size());

  std::unique_ptr<Forecaster> forecaster;
  switch (algo) {
    case Algorithm::kLinearRegression:
    case Algorithm::kSvr: {
      const Dataset train = collect_dataset(stream, part.train);
      if (train.size() == 0) return std::nullopt;
      if (algo == Algorithm::kLinearRegression) {
        forecaster = make_fixed_forecaster(linreg_fit(train));
      } else {
        const SvrParams svr{params.svr_sqrt2_sigma / std::sqrt(2.0), params.svr_epsilon,
                            params.svr_c};
        forecaster = make_fixed_forecaster(svr_fit(train, svr));
      }
      break;
    }
    case Algorithm::kNoPrediction: forecaster = make_no_prediction_forecaster(outputs); break;
    default: {
      OnlineParams op;
      op.eta = params.eta;
      op.hidden = params.hidden;
      op.clip_threshold = fixed.clip_threshold;
      op.sigma_init = fixed.sigma_init;
      op.eta_a = fixed.eta_a;
      forecaster = make_online_forecaster(algo, static_cast<Eigen::Index>(stream.input_size()),
                                          outputs, op, seed);
    }
  }

  std::vector<Eigen::VectorXd> preds;
  std::vector<std::size_t> targets;
  for (std::size_t n = 0; n < stream.size(); ++n) {
    const std::size_t t = n + shl + horizon - 1;
    if (t >= limit) break;
    const bool in_scope = scored.contains(t);
    if (!in_scope && !is_online(algo)) continue;
    const WindowedExample ex = stream.at(n);
    Eigen::VectorXd pred = forecaster->step(ex);
    if (in_scope) {
      preds.push_back(denormalize(pred, stats));
      targets.push_back(t);
    }
  }
  if (targets.size() < 2) return std::nullopt;

  ScoredRun run;
  run.prediction.resize(static_cast<Eigen::Index>(targets.size()), outputs);
  run.truth.resize(static_cast<Eigen::Index>(targets.size()), outputs);
  for (std::size_t r = 0; r < targets.size(); ++r) {
    run.prediction.row(static_cast<Eigen::Index>(r)) = preds[r].transpose();
    run.truth.row(static_cast<Eigen::Index>(r)) =
        seq.positions.row(static_cast<Eigen::Index>(targets[r]));
  }
  run.target_indices = std::move(targets);
  return run;
}

CvOutcome cross_validate(const MarkerSequence& seq, Algorithm algo,
                         const std::vector<HyperParams>& points, double horizon_seconds,
                         const FixedSettings& fixed, std::uint64_t seed, std::size_t workers) {
  if (points.empty()) throw ArgumentError("empty hyperparameter grid");
  const std::size_t h = horizon_steps(horizon_seconds, seq.sample_rate_hz);
  const std::size_t runs = is_stochastic(algo) ? std::max<std::size_t>(fixed.n_cv, 1) : 1;
  constexpr double kSkipped = -1.0;
  std::vector<double> rmse(points.size() * runs, 0.0);

  parallel_for(rmse.size(), workers, [&](std::size_t k) {
    const std::size_t point = k / runs;
    const std::size_t run = k % runs;
    try {
      auto r = run_once(seq, algo, points[point], h, Phase::kCrossValidation, fixed,
                        derive_seed(seed, {0, point, run}));
      rmse[k] = r ? compute_metrics(r->prediction, r->truth).rmse : kSkipped;
    } catch (const NumericError&) {
      // A diverging configuration is never selected.
      rmse[k] = std::numeric_limits<double>::infinity();
    }
  });

  CvOutcome out;
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (rmse[i * runs] == kSkipped) {
      ++out.skipped;
      continue;
    }
    ++out.evaluated;
    double mean = 0.0;
    for (std::size_t r = 0; r < runs; ++r) mean += rmse[i * runs + r];
    mean /= static_cast<double>(runs);
    out.scores.emplace_back(points[i], mean);
    // Points arrive sorted, so strict improvement keeps the smallest on ties.
    if (!found || mean < best) {
      best = mean;
      out.best = points[i];
      found = true;
    }
  }
  if (!found) throw ArgumentError("no feasible grid point for this sequence and horizon");
  if (!std::isfinite(best)) throw NumericError("every grid point diverged");
  out.cv_rmse = best;
  return out;
}

CvOutcome cross_validate(const MarkerSequence& seq, Algorithm algo, const GridSpec& grid,
                         double horizon_seconds, std::uint64_t seed, std::size_t workers) {
  return cross_validate(seq, algo, grid.points(algo, seq.sample_rate_hz), horizon_seconds,
                        grid.fixed, seed, workers);
}

Evaluation evaluate(const MarkerSequence& seq, Algorithm algo, const HyperParams& params,
                    double horizon_seconds, const FixedSettings& fixed, std::uint64_t seed,
                    std::size_t workers) {
  const std::size_t h = horizon_steps(horizon_seconds, seq.sample_rate_hz);
  const std::size_t runs = is_stochastic(algo) ? std::max<std::size_t>(fixed.n_test, 1) : 1;
  std::vector<std::optional<ScoredRun>> results(runs);
  parallel_for(runs, workers, [&](std::size_t r) {
    try {
      results[r] = run_once(seq, algo, params, h, Phase::kTest, fixed, derive_seed(seed, {1, r}));
    } catch (const NumericError& e) {
      throw NumericError("run " + std::to_string(r) + ": " + e.what());
    }
  });
  Evaluation ev;
  for (auto& r : results) {
    if (!r) throw ArgumentError("the test interval holds fewer than two scored examples");
    ev.runs.push_back(compute_metrics(r->prediction, r->truth));
  }
  ev.report = aggregate_runs(ev.runs);
  ev.first_run = std::move(*results.front());
  return ev;
}

std::uint64_t resample_seed(std::uint64_t master, const std::string& sequence, double rate_hz) {
  return derive_seed(master, {hash_name("resample"), hash_name(sequence), rate_code(rate_hz)});
}

std::vector<ResultRow> sweep(const std::vector<NamedSequence>& sequences, const SweepSpec& spec,
                             const GridSpec& grid, const ProgressFn& progress) {
  std::vector<ResultRow> rows;
  for (const auto& named : sequences) {
    for (double rate_in : spec.rates_hz) {
      const double rate = canonical_rate(rate_in);
      const std::vector<double> horizons =
          spec.horizons.empty() ? default_horizons(rate) : spec.horizons;
      std::optional<MarkerSequence> resampled;
      std::string resample_error;
      try {
        resampled = resample(named.sequence, rate, spec.gamma,
                             resample_seed(spec.seed, named.name, rate));
      } catch (const std::exception& e) {
        resample_error = e.what();
      }
      for (Algorithm algo : spec.algorithms) {
        for (double h : horizons) {
          if (!horizon_fits(h, rate)) continue;
          ResultRow row;
          row.sequence = named.name;
          row.label = named.sequence.label;
          row.algorithm = algo;
          row.rate_hz = rate;
          row.horizon_s = h;
          row.horizon_steps = static_cast<std::size_t>(std::llround(h * rate));
          if (!resampled) {
            row.error = "resampling failed: " + resample_error;
          } else {
            const std::uint64_t cell = derive_seed(
                spec.seed, {hash_name(named.name), hash_name(to_string(algo)), rate_code(rate),
                            row.horizon_steps});
            try {
              const CvOutcome cv = cross_validate(*resampled, algo, grid, h, cell, spec.workers);
              row.params = cv.best;
              row.cv_rmse = cv.cv_rmse;
              row.report = evaluate(*resampled, algo, cv.best, h, grid.fixed,
                                    derive_seed(cell, {1}), spec.workers)
                               .report;
            } catch (const std::exception& e) {
              row.error = e.what();
            }
          }
          if (progress) progress(row);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

namespace {

struct Accumulator {
  double sums[10] = {};
  std::size_t cells = 0;

  void add(const MetricsReport& r) {
    const MetricSummary* ms[5] = {&r.mae, &r.rmse, &r.nrmse, &r.max_error, &r.jitter};
    for (int i = 0; i < 5; ++i) {
      sums[2 * i] += ms[i]->mean;
      sums[2 * i + 1] += ms[i]->ci95;
    }
    ++cells;
  }
  MetricsReport mean() const {
    MetricsReport r;
    MetricSummary* ms[5] = {&r.mae, &r.rmse, &r.nrmse, &r.max_error, &r.jitter};
    const double n = static_cast<double>(cells);
    for (int i = 0; i < 5; ++i) *ms[i] = {sums[2 * i] / n, sums[2 * i + 1] / n};
    return r;
  }
};

}  // namespace

std::vector<SummaryRow> summarize_results(const std::vector<ResultRow>& rows) {
  // (algorithm, rate, group, horizon or -1)
  std::map<std::tuple<int, std::uint64_t, std::string, double>, Accumulator> acc;
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    const auto a = static_cast<int>(r.algorithm);
    const std::uint64_t f = rate_code(r.rate_hz);
    acc[{a, f, "all", -1.0}].add(r.report);
    acc[{a, f, "all", r.horizon_s}].add(r.report);
    if (r.label == Regularity::kRegular) acc[{a, f, "regular", -1.0}].add(r.report);
    if (r.label == Regularity::kIrregular) acc[{a, f, "irregular", -1.0}].add(r.report);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, a] : acc) {
    SummaryRow s;
    s.algorithm = static_cast<Algorithm>(std::get<0>(key));
    s.rate_hz = canonical_rate(static_cast<double>(std::get<1>(key)) / 1000.0);
    s.group = std::get<2>(key);
    if (std::get<3>(key) >= 0.0) s.horizon_s = std::get<3>(key);
    s.metrics = a.mean();
    s.metrics.n_runs = 0;
    s.cells = a.cells;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace rnnforecast
