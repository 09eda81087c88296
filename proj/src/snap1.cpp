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

Snap1State make_snap1_state(const RnnDims& dims) {
  return {Eigen::MatrixXd::Zero(dims.hidden, dims.state_input_size())};
}

StepReport snap1_step(RnnModel& model, Snap1State& state, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& target, const UpdateSettings& settings,
                      Eigen::VectorXd* gradient_out) {
  const RnnDims d = model.dims();
  if (state.j.rows() != d.hidden || state.j.cols() != d.state_input_size())
    throw ArgumentError("SnAp-1 state does not match the model");
  StepOutput out = detail::predict_and_score(model, u, target);
  const Eigen::VectorXd dphi = out.activation_derivative();
  const Eigen::VectorXd diag_dynamics = (dphi.array() * model.wa.diagonal().array()).matrix();

  // J' = Dbar J + I_n, I_n = tanh'(z) [x^T, u^T]
  state.j.array().colwise() *= diag_dynamics.array();
  state.j.noalias() += dphi * detail::state_input(model.x, u).transpose();

  const Eigen::VectorXd grad_x = state_loss_gradient(model, out.e);
  Eigen::VectorXd grad(d.total_params());
  Eigen::Map<Eigen::MatrixXd>(grad.data(), d.hidden, d.state_input_size()) =
      (state.j.array().colwise() * grad_x.array()).matrix();
  detail::write_output_gradient(out, d, grad);
  return detail::commit(model, out, grad, settings, gradient_out);
}

Eigen::MatrixXd expand_compressed_influence(const Eigen::MatrixXd& j) {
  const Eigen::Index q = j.rows();
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(q, q * j.cols());
  for (Eigen::Index c = 0; c < j.cols(); ++c)
    for (Eigen::Index i = 0; i < q; ++i) full(i, c * q + i) = j(i, c);
  return full;
}

}  // namespace rnnforecast
