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
#include "rnnforecast/metrics.hpp"

#include <cmath>
#include <limits>

#include "rnnforecast/error.hpp"

namespace rnnforecast {

RunMetrics compute_metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
    throw ArgumentError("prediction and ground truth are not aligned");
  if (pred.rows() < 2) throw ArgumentError("metrics need at least two time steps");
  if (pred.cols() == 0 || pred.cols() % 3 != 0)
    throw ArgumentError("rows must hold 3 coordinates per marker");
  const Eigen::Index steps = pred.rows();
  const Eigen::Index markers = pred.cols() / 3;

  double sum = 0.0, sum_sq = 0.0, max_d = 0.0, jump = 0.0, spread = 0.0;
  for (Eigen::Index j = 0; j < markers; ++j) {
    const auto p = pred.middleCols(3 * j, 3);
    const auto t = truth.middleCols(3 * j, 3);
    const Eigen::VectorXd d = (p - t).rowwise().norm();
    sum += d.sum();
    sum_sq += d.squaredNorm();
    max_d = std::max(max_d, d.maxCoeff());
    jump += (p.bottomRows(steps - 1) - p.topRows(steps - 1)).rowwise().norm().sum();
    const Eigen::RowVector3d centre = t.colwise().mean();
    spread += (t.rowwise() - centre).rowwise().squaredNorm().sum();
  }
  const double count = static_cast<double>(steps * markers);
  RunMetrics m;
  m.mae = sum / count;
  m.rmse = std::sqrt(sum_sq / count);
  m.max_error = max_d;
  m.jitter = jump / static_cast<double>((steps - 1) * markers);
  const double normalizer = std::sqrt(spread / count);
  m.nrmse = normalizer > 0.0 ? m.rmse / normalizer
                             : (m.rmse == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  return m;
}

MetricSummary summarize(const std::vector<double>& values) {
  if (values.empty()) throw ArgumentError("cannot summarize an empty list");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sample_std = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sample_std / std::sqrt(n)};
}

MetricsReport aggregate_runs(const std::vector<RunMetrics>& runs) {
  if (runs.empty()) throw ArgumentError("no runs to aggregate");
  auto column = [&](double RunMetrics::*field) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) v.push_back(r.*field);
    return summarize(v);
  };
  MetricsReport rep;
  rep.mae = column(&RunMetrics::mae);
  rep.rmse = column(&RunMetrics::rmse);
  rep.nrmse = column(&RunMetrics::nrmse);
  rep.max_error = column(&RunMetrics::max_error);
  rep.jitter = column(&RunMetrics::jitter);
  rep.n_runs = runs.size();
  return rep;
}

}  // namespace rnnforecast
