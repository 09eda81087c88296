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

DniState make_dni_state(const RnnDims& dims, Rng& rng, double eta_a, bool full_update) {
  if (!(eta_a > 0.0)) throw ArgumentError("credit learning rate must be positive");
  DniState s;
  const Eigen::Index features = dims.hidden + dims.outputs + 1;
  s.a.resize(features, dims.hidden);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(dims.hidden)));
  for (Eigen::Index i = 0; i < s.a.size(); ++i) s.a.data()[i] = normal(rng);
  s.x_tilde_prev = Eigen::VectorXd::Zero(features);
  s.x_tilde_prev(features - 1) = 1.0;
  s.eta_a = eta_a;
  s.full_update = full_update;
  return s;
}

CreditFit dni_credit_gradient(const Eigen::MatrixXd& a, const Eigen::VectorXd& x_tilde_n,
                              const Eigen::VectorXd& x_tilde_next,
                              const Eigen::VectorXd& state_gradient,
                              const Eigen::MatrixXd& dynamics, bool full_update) {
  // Products are grouped so that no q x q x q multiplication ever happens:
  // (x_{n+1} A) D and x_{n+1}^T (f D^T).
  CreditFit fit;
  const Eigen::VectorXd next_credit = a.transpose() * x_tilde_next;
  fit.residual = a.transpose() * x_tilde_n - state_gradient - dynamics.transpose() * next_credit;
  fit.gradient.noalias() = x_tilde_n * fit.residual.transpose();
  if (full_update) {
    const Eigen::VectorXd propagated = dynamics * fit.residual;
    fit.gradient.noalias() -= x_tilde_next * propagated.transpose();
  }
  return fit;
}

StepReport dni_step(RnnModel& model, DniState& state, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& target, const UpdateSettings& settings,
                    Eigen::VectorXd* gradient_out) {
  const RnnDims d = model.dims();
  const Eigen::Index features = d.hidden + d.outputs + 1;
  if (state.a.rows() != features || state.a.cols() != d.hidden ||
      state.x_tilde_prev.size() != features)
    throw ArgumentError("DNI state does not match the model");
  StepOutput out = detail::predict_and_score(model, u, target);
  const Eigen::VectorXd dphi = out.activation_derivative();
  const Eigen::VectorXd grad_x = state_loss_gradient(model, out.e);
  const Eigen::MatrixXd dynamics = dphi.asDiagonal() * model.wa;

  Eigen::VectorXd x_tilde_next(features);
  x_tilde_next << out.x_next, target, 1.0;

  // A is fitted without clipping.
  const CreditFit fit = dni_credit_gradient(state.a, state.x_tilde_prev, x_tilde_next, grad_x,
                                            dynamics, state.full_update);
  state.a -= state.eta_a * fit.gradient;
  if (!state.a.allFinite()) throw NumericError("non-finite credit coefficients");

  const Eigen::VectorXd credit = state.a.transpose() * state.x_tilde_prev;
  const Eigen::VectorXd phi = (credit.array() * dphi.array()).matrix();

  Eigen::VectorXd grad(d.total_params());
  Eigen::Map<Eigen::MatrixXd>(grad.data(), d.hidden, d.state_input_size()).noalias() =
      phi * detail::state_input(model.x, u).transpose();
  detail::write_output_gradient(out, d, grad);
  state.x_tilde_prev = std::move(x_tilde_next);
  return detail::commit(model, out, grad, settings, gradient_out);
}

}  // namespace rnnforecast
