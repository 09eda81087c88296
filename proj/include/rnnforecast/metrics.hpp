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

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace rnnforecast {

/// Per-run accuracy and smoothness measures, millimeters except nRMSE.
struct RunMetrics {
  double mae = 0.0;
  double rmse = 0.0;
  double nrmse = 0.0;
  double max_error = 0.0;
  double jitter = 0.0;
};

/// Mean over runs with the half-width of the Gaussian 95% interval,
/// 1.96 * sample_std / sqrt(n).
struct MetricSummary {
  double mean = 0.0;
  double ci95 = 0.0;
};

struct MetricsReport {
  MetricSummary mae;
  MetricSummary rmse;
  MetricSummary nrmse;
  MetricSummary max_error;
  MetricSummary jitter;
  std::size_t n_runs = 0;
};

/// Computes the five measures over aligned predictions and ground truth.
///
/// Each row holds 3 n_M coordinates. Distances are 3D Euclidean per marker,
/// pooled over time steps and markers. The nRMSE normalizer is the pooled
/// per-marker standard deviation of the truth,
/// sqrt(mean_{t,j} |truth_{t,j} - mean_t truth_{.,j}|^2).
RunMetrics compute_metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth);

MetricSummary summarize(const std::vector<double>& values);
MetricsReport aggregate_runs(const std::vector<RunMetrics>& runs);

}  // namespace rnnforecast
