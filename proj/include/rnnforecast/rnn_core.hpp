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
#include <iosfwd>

#include <Eigen/Dense>

#include "rnnforecast/seeding.hpp"

namespace rnnforecast {

/// Network sizes: q hidden units, input of length m + 1 (leading bias), p
/// outputs.
struct RnnDims {
  Eigen::Index hidden = 0;  // q
  Eigen::Index inputs = 0;  // m (bias excluded)
  Eigen::Index outputs = 0; // p

  Eigen::Index wa_size() const { return hidden * hidden; }
  Eigen::Index wb_size() const { return hidden * (inputs + 1); }
  Eigen::Index wc_size() const { return outputs * hidden; }
  /// Columns of the compressed influence matrix, q + m + 1.
  Eigen::Index state_input_size() const { return hidden + inputs + 1; }
  /// |W_a| + |W_b|.
  Eigen::Index recurrent_params() const { return wa_size() + wb_size(); }
  /// |W| = q (m + p + q + 1).
  Eigen::Index total_params() const { return recurrent_params() + wc_size(); }

  bool operator==(const RnnDims&) const = default;
};

/// Single-hidden-layer tanh RNN.
///
///   z = W_a x + W_b u,  x' = tanh(z),  y = W_c x'
///
/// Parameters flatten to theta = [vec(W_a), vec(W_b), vec(W_c)] with vec()
/// stacking columns, which is exactly Eigen's column-major storage.
struct RnnModel {
  Eigen::MatrixXd wa;  // q x q
  Eigen::MatrixXd wb;  // q x (m+1)
  Eigen::MatrixXd wc;  // p x q
  Eigen::VectorXd x;   // q

  RnnDims dims() const { return {wa.rows(), wb.cols() - 1, wc.rows()}; }
  bool operator==(const RnnModel&) const;
};

/// RnnModel with zero weights and zero state.
RnnModel make_zero_model(const RnnDims& dims);

/// Weights i.i.d. N(0, sigma_init^2), state zeroed.
RnnModel init_weights(const RnnDims& dims, double sigma_init, Rng& rng);
RnnModel init_weights(const RnnDims& dims, double sigma_init, std::uint64_t seed);

inline constexpr double kDefaultSigmaInit = 0.02;
inline constexpr double kDefaultClipThreshold = 100.0;

struct StepOutput {
  Eigen::VectorXd z;       // pre-activation
  Eigen::VectorXd x_next;  // tanh(z)
  Eigen::VectorXd y;       // prediction
  Eigen::VectorXd e;       // y* - y, empty until a target is attached
  double loss = 0.0;       // 0.5 |e|^2

  /// tanh'(z) = 1 - tanh(z)^2.
  Eigen::VectorXd activation_derivative() const {
    return (1.0 - x_next.array().square()).matrix();
  }
};

/// Forward pass. Does not touch model.x; trainers commit x_next themselves.
StepOutput forward_step(const RnnModel& model, const Eigen::VectorXd& u);

/// Fills `e` and `loss` for the revealed target.
void attach_target(StepOutput& step, const Eigen::VectorXd& target);

/// dL/dW_c = -e x_next^T.
Eigen::MatrixXd output_layer_gradient(const StepOutput& step);

/// grad_x L = -W_c^T e.
Eigen::VectorXd state_loss_gradient(const RnnModel& model, const Eigen::VectorXd& e);

/// Rescales `g` to norm `tau` when its norm exceeds `tau`. Returns true when
/// it clipped.
bool clip_in_place(Eigen::Ref<Eigen::VectorXd> g, double tau);
Eigen::VectorXd clip_gradient(const Eigen::VectorXd& g, double tau);

/// theta <- theta - eta g over the flat layout. Throws NumericError on a
/// non-finite gradient or a non-finite resulting weight.
void apply_update(RnnModel& model, const Eigen::VectorXd& g, double eta);

Eigen::VectorXd unroll(const RnnModel& model);
/// Inverse of unroll; the state is zeroed.
RnnModel reroll(const Eigen::VectorXd& theta, const RnnDims& dims);

/// Writes the dimensions, theta and hidden state as text that round-trips
/// exactly.
void save_snapshot(const RnnModel& model, std::ostream& out);
RnnModel load_snapshot(std::istream& in);

}  // namespace rnnforecast
