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
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rnnforecast/error.hpp"
#include "rnnforecast/metrics.hpp"
#include "test_util.hpp"

using namespace rnnforecast;

namespace {

// Plain-loop reference of the five measures.
RunMetrics reference(const Eigen::MatrixXd& p, const Eigen::MatrixXd& t) {
  const int steps = static_cast<int>(p.rows()), markers = static_cast<int>(p.cols() / 3);
  double s = 0, s2 = 0, mx = 0, jit = 0, spread = 0;
  for (int j = 0; j < markers; ++j) {
    double c[3] = {0, 0, 0};
    for (int k = 0; k < steps; ++k)
      for (int a = 0; a < 3; ++a) c[a] += t(k, 3 * j + a) / steps;
    for (int k = 0; k < steps; ++k) {
      double d = 0, v = 0, w = 0;
      for (int a = 0; a < 3; ++a) {
        d += std::pow(p(k, 3 * j + a) - t(k, 3 * j + a), 2);
        v += std::pow(t(k, 3 * j + a) - c[a], 2);
        if (k > 0) w += std::pow(p(k, 3 * j + a) - p(k - 1, 3 * j + a), 2);
      }
      s += std::sqrt(d);
      s2 += d;
      mx = std::max(mx, std::sqrt(d));
      spread += v;
      jit += std::sqrt(w);
    }
  }
  const double n = static_cast<double>(steps) * markers;
  RunMetrics r;
  r.mae = s / n;
  r.rmse = std::sqrt(s2 / n);
  r.max_error = mx;
  r.jitter = jit / ((steps - 1.0) * markers);
  r.nrmse = r.rmse / std::sqrt(spread / n);
  return r;
}

}  // namespace

TEST(Metrics, AlternatingPredictionAroundOrigin) {
  Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(6, 3);
  Eigen::MatrixXd pred = Eigen::MatrixXd::Zero(6, 3);
  for (int k = 0; k < 6; ++k) pred(k, 0) = k % 2 ? -1.0 : 1.0;
  const RunMetrics m = compute_metrics(pred, truth);
  EXPECT_DOUBLE_EQ(m.mae, 1.0);
  EXPECT_DOUBLE_EQ(m.rmse, 1.0);
  EXPECT_DOUBLE_EQ(m.max_error, 1.0);
  EXPECT_DOUBLE_EQ(m.jitter, 2.0);
}

TEST(Metrics, PerfectPredictionScoresZeroError) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd t = testutil::random_matrix(20, 6, rng);
  const RunMetrics m = compute_metrics(t, t);
  EXPECT_EQ(m.mae, 0.0);
  EXPECT_EQ(m.rmse, 0.0);
  EXPECT_EQ(m.nrmse, 0.0);
  EXPECT_EQ(m.max_error, 0.0);
  EXPECT_GT(m.jitter, 0.0);
}

TEST(Metrics, PredictingTheMeanGivesUnitNrmse) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd t = testutil::random_matrix(50, 9, rng);
  Eigen::MatrixXd p(50, 9);
  p.rowwise() = t.colwise().mean();
  const RunMetrics m = compute_metrics(p, t);
  EXPECT_NEAR(m.nrmse, 1.0, 1e-12);
  EXPECT_NEAR(m.jitter, 0.0, 1e-12);
}

TEST(Metrics, MatchesPlainLoopReference) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index steps = 2 + trial, cols = 3 * (1 + trial % 3);
    const Eigen::MatrixXd t = testutil::random_matrix(steps, cols, rng, 5.0);
    const Eigen::MatrixXd p = t + testutil::random_matrix(steps, cols, rng);
    const RunMetrics a = compute_metrics(p, t), b = reference(p, t);
    EXPECT_NEAR(a.mae, b.mae, 1e-12);
    EXPECT_NEAR(a.rmse, b.rmse, 1e-12);
    EXPECT_NEAR(a.nrmse, b.nrmse, 1e-12);
    EXPECT_NEAR(a.max_error, b.max_error, 1e-12);
    EXPECT_NEAR(a.jitter, b.jitter, 1e-12);
  }
}

TEST(Metrics, OrderingAndTranslationInvariance) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd t = testutil::random_matrix(30, 6, rng, 3.0);
    const Eigen::MatrixXd p = t + testutil::random_matrix(30, 6, rng);
    const RunMetrics m = compute_metrics(p, t);
    EXPECT_LE(m.mae, m.rmse + 1e-12);
    EXPECT_LE(m.rmse, m.max_error + 1e-12);
    Eigen::RowVectorXd shift = testutil::random_vector(6, rng, 100.0).transpose();
    const RunMetrics s =
        compute_metrics(p.rowwise() + shift, t.rowwise() + shift);
    EXPECT_NEAR(s.mae, m.mae, 1e-9);
    EXPECT_NEAR(s.nrmse, m.nrmse, 1e-9);
    EXPECT_NEAR(s.jitter, m.jitter, 1e-9);
  }
}

TEST(Metrics, RejectsMalformedInput) {
  EXPECT_THROW(compute_metrics(Eigen::MatrixXd::Zero(1, 3), Eigen::MatrixXd::Zero(1, 3)),
               ArgumentError);
  EXPECT_THROW(compute_metrics(Eigen::MatrixXd::Zero(4, 3), Eigen::MatrixXd::Zero(5, 3)),
               ArgumentError);
  EXPECT_THROW(compute_metrics(Eigen::MatrixXd::Zero(4, 4), Eigen::MatrixXd::Zero(4, 4)),
               ArgumentError);
}

TEST(Summary, GaussianHalfWidth) {
  const MetricSummary s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.ci95, 1.96 * std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(summarize({7.0}).ci95, 0.0);
  EXPECT_THROW(summarize({}), ArgumentError);
}

TEST(Summary, AggregatesEveryMeasure) {
  std::vector<RunMetrics> runs(3);
  for (int i = 0; i < 3; ++i) runs[i] = {1.0 * i, 2.0 * i, 3.0 * i, 4.0 * i, 5.0 * i};
  const MetricsReport r = aggregate_runs(runs);
  EXPECT_EQ(r.n_runs, 3u);
  EXPECT_DOUBLE_EQ(r.mae.mean, 1.0);
  EXPECT_DOUBLE_EQ(r.jitter.mean, 5.0);
  EXPECT_NEAR(r.rmse.ci95, 1.96 * 2.0 / std::sqrt(3.0), 1e-12);
}
