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

#include <cmath>

#include <Eigen/Dense>

#include "rnnforecast/error.hpp"
#include "rnnforecast/online_trainers.hpp"

namespace rnnforecast::detail {

/// Forward pass plus loss for a revealed target.
inline StepOutput predict_and_score(const RnnModel& model, const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& target) {
  StepOutput out = forward_step(model, u);
  attach_target(out, target);
  if (!std::isfinite(out.loss)) throw NumericError("non-finite loss");
  return out;
}

/// Writes vec(-e x_next^T) into the W_c slice of the flat gradient.
inline void write_output_gradient(const StepOutput& out, const RnnDims& d,
                                  Eigen::VectorXd& grad) {
  Eigen::Map<Eigen::MatrixXd>(grad.data() + d.recurrent_params(), d.outputs, d.hidden)
      .noalias() = -out.e * out.x_next.transpose();
}

/// Clips, applies theta <- theta - eta grad and commits the new state.
inline StepReport commit(RnnModel& model, StepOutput& out, Eigen::VectorXd& grad,
                         const UpdateSettings& settings, Eigen::VectorXd* gradient_out) {
  StepReport report;
  report.prediction = out.y;
  report.loss = out.loss;
  report.raw_gradient_norm = grad.norm();
  if (!std::isfinite(report.raw_gradient_norm)) throw NumericError("non-finite gradient");
  report.clipped = clip_in_place(grad, settings.clip_threshold);
  apply_update(model, grad, settings.eta);
  model.x = std::move(out.x_next);
  if (gradient_out) *gradient_out = grad;
  return report;
}

/// [x; u] for the immediate Jacobian of the state map.
inline Eigen::VectorXd state_input(const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  Eigen::VectorXd v(x.size() + u.size());
  v << x, u;
  return v;
}

}  // namespace rnnforecast::detail
