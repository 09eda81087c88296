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
#include <vector>

#include <Eigen/Dense>

#include "rnnforecast/data_io.hpp"
#include "rnnforecast/online_trainers.hpp"

namespace rnnforecast {

/// Design matrix (one example per row, leading bias column) and targets.
struct Dataset {
  Eigen::MatrixXd inputs;   // N x (m+1)
  Eigen::MatrixXd targets;  // N x p

  Eigen::Index size() const { return inputs.rows(); }
};

/// Stacks the examples of `stream` whose target index lies in `targets`.
Dataset collect_dataset(const WindowStream& stream, const IndexRange& targets);

struct LinRegModel {
  Eigen::MatrixXd w;  // p x (m+1)

  Eigen::VectorXd predict(const Eigen::VectorXd& u) const { return w * u; }
};

/// Minimum-norm least squares: argmin sum |y* - W u|^2.
LinRegModel linreg_fit(const Dataset& data);

struct SvrParams {
  double sigma = 1.0;    // RBF width, K = exp(-|a-b|^2 / (2 sigma^2))
  double epsilon = 0.01; // tube half-width
  double c = 100.0;      // box constraint
};

struct SvrSolverOptions {
  double tolerance = 1e-3;
  /// 0 means 1e5 * N.
  std::uint64_t max_iterations = 0;
  /// Keep the dual objective after every iteration (tests only; costly).
  bool record_objective = false;
};

struct SvrDiagnostics {
  std::uint64_t iterations = 0;
  double violation = 0.0;  // maximal KKT violation at exit
  std::vector<double> dual_objective;  // maximization form, when recorded
};

/// p independent scalar epsilon-SVR models sharing (sigma, epsilon, C) and the
/// same support inputs.
struct SvrModel {
  SvrParams params;
  Eigen::MatrixXd support;       // S x (m+1) inputs with a nonzero coefficient
  Eigen::MatrixXd coefficients;  // S x p, alpha - alpha*, |.| <= C
  Eigen::VectorXd bias;          // p
  std::vector<SvrDiagnostics> diagnostics;

  Eigen::VectorXd predict(const Eigen::VectorXd& u) const;
};

double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma);

/// Solves each output's dual with a sequential minimal optimization scheme.
/// Throws ConvergenceError when the iteration cap is reached.
SvrModel svr_fit(const Dataset& data, const SvrParams& params,
                 const SvrSolverOptions& options = {});

Eigen::VectorXd svr_predict(const SvrModel& model, const Eigen::VectorXd& u);

/// The most recent observed coordinates in the input window (last p entries).
Eigen::VectorXd no_prediction(const WindowedExample& example, Eigen::Index outputs);

/// Adapters exposing fitted models through the Forecaster interface; they
/// never learn from the revealed target.
std::unique_ptr<Forecaster> make_fixed_forecaster(LinRegModel model);
std::unique_ptr<Forecaster> make_fixed_forecaster(SvrModel model);
std::unique_ptr<Forecaster> make_no_prediction_forecaster(Eigen::Index outputs);

}  // namespace rnnforecast
