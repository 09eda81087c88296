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
#include "rnnforecast/online_trainers.hpp"

#include "trainer_common.hpp"

namespace rnnforecast {

StepReport frozen_step(RnnModel& model, const Eigen::VectorXd& u, const Eigen::VectorXd& target,
                       const UpdateSettings& settings, Eigen::VectorXd* gradient_out) {
  const RnnDims d = model.dims();
  StepOutput out = detail::predict_and_score(model, u, target);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(d.total_params());
  detail::write_output_gradient(out, d, grad);
  return detail::commit(model, out, grad, settings, gradient_out);
}

LmsState make_lms_state(Eigen::Index inputs_with_bias, Eigen::Index outputs) {
  if (inputs_with_bias < 1 || outputs < 1) throw ArgumentError("LMS dimensions must be positive");
  return {Eigen::MatrixXd::Zero(outputs, inputs_with_bias)};
}

StepReport lms_step(LmsState& state, const Eigen::VectorXd& u, const Eigen::VectorXd& target,
                    const UpdateSettings& settings, Eigen::VectorXd* gradient_out) {
  if (u.size() != state.w.cols() || target.size() != state.w.rows())
    throw ArgumentError("LMS dimension mismatch");
  StepReport report;
  report.prediction = state.w * u;
  const Eigen::VectorXd e = target - report.prediction;
  report.loss = 0.5 * e.squaredNorm();
  Eigen::VectorXd grad(state.w.size());
  Eigen::Map<Eigen::MatrixXd>(grad.data(), state.w.rows(), state.w.cols()).noalias() =
      -e * u.transpose();
  report.raw_gradient_norm = grad.norm();
  if (!std::isfinite(report.raw_gradient_norm)) throw NumericError("non-finite LMS gradient");
  report.clipped = clip_in_place(grad, settings.clip_threshold);
  Eigen::Map<Eigen::VectorXd>(state.w.data(), state.w.size()) -= settings.eta * grad;
  if (gradient_out) *gradient_out = grad;
  return report;
}

}  // namespace rnnforecast
