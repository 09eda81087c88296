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

RtrlState make_rtrl_state(const RnnDims& dims) {
  RtrlState s;
  s.influence = Eigen::MatrixXd::Zero(dims.hidden, dims.recurrent_params());
  s.scratch.resize(dims.hidden, dims.recurrent_params());
  return s;
}

StepReport rtrl_step(RnnModel& model, RtrlState& state, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& target, const UpdateSettings& settings,
                     Eigen::VectorXd* gradient_out) {
  const RnnDims d = model.dims();
  if (state.influence.rows() != d.hidden || state.influence.cols() != d.recurrent_params())
    throw ArgumentError("RTRL state does not match the model");
  StepOutput out = detail::predict_and_score(model, u, target);
  const Eigen::VectorXd dphi = out.activation_derivative();

  // influence' = D_n influence + dF/dtheta, D_n = Diag(tanh'(z)) W_a.
  const Eigen::MatrixXd dynamics = dphi.asDiagonal() * model.wa;
  state.scratch.resize(d.hidden, d.recurrent_params());
  state.scratch.noalias() = dynamics * state.influence;
  const Eigen::VectorXd v = detail::state_input(model.x, u);
  for (Eigen::Index c = 0; c < v.size(); ++c)
    for (Eigen::Index i = 0; i < d.hidden; ++i)
      state.scratch(i, c * d.hidden + i) += dphi(i) * v(c);
  state.influence.swap(state.scratch);

  const Eigen::VectorXd grad_x = state_loss_gradient(model, out.e);
  Eigen::VectorXd grad(d.total_params());
  grad.head(d.recurrent_params()).noalias() = state.influence.transpose() * grad_x;
  detail::write_output_gradient(out, d, grad);
  return detail::commit(model, out, grad, settings, gradient_out);
}

}  // namespace rnnforecast
