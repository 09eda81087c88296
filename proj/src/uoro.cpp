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

#include <cmath>

#include "trainer_common.hpp"

namespace rnnforecast {

UoroState make_uoro_state(const RnnDims& dims, double epsilon) {
  if (!(epsilon > 0.0)) throw ArgumentError("UORO epsilon must be positive");
  return {Eigen::VectorXd::Zero(dims.hidden), Eigen::VectorXd::Zero(dims.recurrent_params()),
          epsilon};
}

namespace {

// x~' = rho0 D x~ + rho1 nu,  theta~' = theta~ / rho0 + (nu^T dF/dtheta) / rho1
// with rho0, rho1 balancing the norms of the two factors.
void propagate(const RnnModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
               const Eigen::VectorXd& dphi, UoroState& state, const Eigen::VectorXd& signs) {
  const Eigen::Index q = model.wa.rows();
  const Eigen::VectorXd dyn_x = (dphi.array() * (model.wa * state.x_tilde).array()).matrix();
  const Eigen::VectorXd v = detail::state_input(x, u);
  const Eigen::VectorXd weighted = (signs.array() * dphi.array()).matrix();
  // nu^T dF/dtheta = vec(weighted v^T) in the column-major parameter layout.
  Eigen::VectorXd signed_jacobian(q * v.size());
  Eigen::Map<Eigen::MatrixXd>(signed_jacobian.data(), q, v.size()).noalias() =
      weighted * v.transpose();

  const double eps = state.epsilon;
  const double rho0 = std::sqrt((state.theta_tilde.norm() + eps) / (dyn_x.norm() + eps));
  const double rho1 = std::sqrt((signed_jacobian.norm() + eps) / (signs.norm() + eps));
  state.x_tilde = rho0 * dyn_x + rho1 * signs;
  state.theta_tilde = state.theta_tilde / rho0 + signed_jacobian / rho1;
}

}  // namespace

void uoro_propagate(const RnnModel& model, const Eigen::VectorXd& u, UoroState& state,
                    const Eigen::VectorXd& signs) {
  StepOutput out = forward_step(model, u);
  propagate(model, model.x, u, out.activation_derivative(), state, signs);
}

StepReport uoro_step(RnnModel& model, UoroState& state, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& target, const UpdateSettings& settings, Rng& rng,
                     Eigen::VectorXd* gradient_out) {
  const RnnDims d = model.dims();
  if (state.x_tilde.size() != d.hidden || state.theta_tilde.size() != d.recurrent_params())
    throw ArgumentError("UORO state does not match the model");
  StepOutput out = detail::predict_and_score(model, u, target);

  Eigen::VectorXd signs(d.hidden);
  std::bernoulli_distribution coin(0.5);
  for (Eigen::Index i = 0; i < d.hidden; ++i) signs(i) = coin(rng) ? 1.0 : -1.0;
  propagate(model, model.x, u, out.activation_derivative(), state, signs);
  if (!state.x_tilde.allFinite() || !state.theta_tilde.allFinite())
    throw NumericError("non-finite UORO state");

  const Eigen::VectorXd grad_x = state_loss_gradient(model, out.e);
  Eigen::VectorXd grad(d.total_params());
  grad.head(d.recurrent_params()) = grad_x.dot(state.x_tilde) * state.theta_tilde;
  detail::write_output_gradient(out, d, grad);
  return detail::commit(model, out, grad, settings, gradient_out);
}

}  // namespace rnnforecast
