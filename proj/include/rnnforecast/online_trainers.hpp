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
#include <memory>
#include <string_view>

#include <Eigen/Dense>

#include "rnnforecast/data_io.hpp"
#include "rnnforecast/rnn_core.hpp"
#include "rnnforecast/seeding.hpp"

namespace rnnforecast {

struct UpdateSettings {
  double eta = 0.01;
  double clip_threshold = kDefaultClipThreshold;
};

/// Outcome of one predict-then-learn step. `prediction` is computed before
/// any weight changes.
struct StepReport {
  Eigen::VectorXd prediction;
  double loss = 0.0;
  double raw_gradient_norm = 0.0;
  bool clipped = false;
};

// ---------------------------------------------------------------------------
// RTRL: exact influence matrix dx/dtheta for the (W_a, W_b) block. The W_c
// block of the influence matrix is identically zero and is not stored.

struct RtrlState {
  Eigen::MatrixXd influence;  // q x q(q+m+1)
  Eigen::MatrixXd scratch;
};

RtrlState make_rtrl_state(const RnnDims& dims);

/// `gradient_out`, when given, receives the committed (clipped) flat gradient.
StepReport rtrl_step(RnnModel& model, RtrlState& state, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& target, const UpdateSettings& settings,
                     Eigen::VectorXd* gradient_out = nullptr);

// ---------------------------------------------------------------------------
// UORO: rank-one unbiased estimate x_tilde theta_tilde^T of the influence
// matrix.

inline constexpr double kUoroEpsilon = 1e-7;

struct UoroState {
  Eigen::VectorXd x_tilde;      // q
  Eigen::VectorXd theta_tilde;  // q(q+m+1)
  double epsilon = kUoroEpsilon;
};

UoroState make_uoro_state(const RnnDims& dims, double epsilon = kUoroEpsilon);

StepReport uoro_step(RnnModel& model, UoroState& state, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& target, const UpdateSettings& settings, Rng& rng,
                     Eigen::VectorXd* gradient_out = nullptr);

/// One UORO recursion of (x_tilde, theta_tilde) with fixed weights and a given
/// sign vector; exposed for the unbiasedness tests.
void uoro_propagate(const RnnModel& model, const Eigen::VectorXd& u, UoroState& state,
                    const Eigen::VectorXd& signs);

// ---------------------------------------------------------------------------
// SnAp-1 with the compressed q x (q+m+1) influence matrix J:
//   J' = Diag(tanh'(z) * diag(W_a)) J + tanh'(z) [x^T, u^T]

struct Snap1State {
  Eigen::MatrixXd j;  // q x (q+m+1)
};

Snap1State make_snap1_state(const RnnDims& dims);

StepReport snap1_step(RnnModel& model, Snap1State& state, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& target, const UpdateSettings& settings,
                      Eigen::VectorXd* gradient_out = nullptr);

/// Expands a compressed influence matrix into the dense q x q(q+m+1) layout,
/// column c * q + i holding J(i, c) at row i.
Eigen::MatrixXd expand_compressed_influence(const Eigen::MatrixXd& j);

// ---------------------------------------------------------------------------
// DNI: synthetic credit assignment c = x_tilde A with
// x_tilde = [x^T, y*^T, 1], A fitted by one gradient step per sample on
// |f(A)|^2, f(A) = x_tilde_n A - grad_x L^T - (x_tilde_{n+1} A) D_n.

inline constexpr double kDefaultCreditLearningRate = 0.002;

struct DniState {
  Eigen::MatrixXd a;             // (q+p+1) x q
  Eigen::VectorXd x_tilde_prev;  // [x_n; y*_n; 1]
  double eta_a = kDefaultCreditLearningRate;
  bool full_update = true;
};

/// A ~ N(0, 1/q), x_tilde = [0, ..., 0, 1].
DniState make_dni_state(const RnnDims& dims, Rng& rng,
                        double eta_a = kDefaultCreditLearningRate, bool full_update = true);

struct CreditFit {
  Eigen::VectorXd residual;  // f(A) as a column vector of length q
  Eigen::MatrixXd gradient;  // Delta A, (q+p+1) x q
};

/// f(A) and Delta A. With `full_update` the gradient is
/// x_n^T f - x_{n+1}^T (f D^T); otherwise only x_n^T f.
CreditFit dni_credit_gradient(const Eigen::MatrixXd& a, const Eigen::VectorXd& x_tilde_n,
                              const Eigen::VectorXd& x_tilde_next,
                              const Eigen::VectorXd& state_gradient,
                              const Eigen::MatrixXd& dynamics, bool full_update);

StepReport dni_step(RnnModel& model, DniState& state, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& target, const UpdateSettings& settings,
                    Eigen::VectorXd* gradient_out = nullptr);

// ---------------------------------------------------------------------------
// Baselines sharing the online protocol.

/// RNN whose W_a, W_b stay at their initial values; W_c learns by clipped SGD.
StepReport frozen_step(RnnModel& model, const Eigen::VectorXd& u, const Eigen::VectorXd& target,
                       const UpdateSettings& settings, Eigen::VectorXd* gradient_out = nullptr);

struct LmsState {
  Eigen::MatrixXd w;  // p x (m+1)
};

LmsState make_lms_state(Eigen::Index inputs_with_bias, Eigen::Index outputs);

StepReport lms_step(LmsState& state, const Eigen::VectorXd& u, const Eigen::VectorXd& target,
                    const UpdateSettings& settings, Eigen::VectorXd* gradient_out = nullptr);

// ---------------------------------------------------------------------------
// Uniform interface used by the experiment harness.

enum class Algorithm {
  kRtrl,
  kUoro,
  kSnap1,
  kDni,
  kDniSimplified,
  kFrozen,
  kLms,
  kLinearRegression,
  kSvr,
  kNoPrediction,
};

std::string_view to_string(Algorithm algo);
Algorithm parse_algorithm(std::string_view name);
bool is_online(Algorithm algo);
/// Whether results depend on the run seed (random init or stochastic updates).
bool is_stochastic(Algorithm algo);
bool has_hidden_layer(Algorithm algo);

/// Produces the prediction for an example; online implementations learn from
/// the revealed target after predicting.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual Eigen::VectorXd step(const WindowedExample& example) = 0;
};

struct OnlineParams {
  double eta = 0.01;
  Eigen::Index hidden = 30;
  double clip_threshold = kDefaultClipThreshold;
  double sigma_init = kDefaultSigmaInit;
  double eta_a = kDefaultCreditLearningRate;
  double uoro_epsilon = kUoroEpsilon;
};

/// Builds an online learner for `algo` with inputs of length m + 1 and p
/// outputs. `seed` drives weight initialization and any stochastic updates.
std::unique_ptr<Forecaster> make_online_forecaster(Algorithm algo, Eigen::Index inputs,
                                                   Eigen::Index outputs,
                                                   const OnlineParams& params,
                                                   std::uint64_t seed);

}  // namespace rnnforecast
