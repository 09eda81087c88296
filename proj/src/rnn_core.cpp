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
#include "rnnforecast/rnn_core.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "rnnforecast/error.hpp"

namespace rnnforecast {

namespace {

void check_dims(const RnnDims& dims) {
  if (dims.hidden < 1 || dims.inputs < 1 || dims.outputs < 1)
    throw ArgumentError("network dimensions must be positive");
}

}  // namespace

bool RnnModel::operator==(const RnnModel& other) const {
  return dims() == other.dims() && wa == other.wa && wb == other.wb && wc == other.wc &&
         x == other.x;
}

RnnModel make_zero_model(const RnnDims& dims) {
  check_dims(dims);
  RnnModel m;
  m.wa = Eigen::MatrixXd::Zero(dims.hidden, dims.hidden);
  m.wb = Eigen::MatrixXd::Zero(dims.hidden, dims.inputs + 1);
  m.wc = Eigen::MatrixXd::Zero(dims.outputs, dims.hidden);
  m.x = Eigen::VectorXd::Zero(dims.hidden);
  return m;
}

RnnModel init_weights(const RnnDims& dims, double sigma_init, Rng& rng) {
  if (!(sigma_init > 0.0)) throw ArgumentError("sigma_init must be positive");
  RnnModel m = make_zero_model(dims);
  std::normal_distribution<double> normal(0.0, sigma_init);
  // Draw in flat-theta order so a seed fixes theta independently of storage.
  for (Eigen::MatrixXd* w : {&m.wa, &m.wb, &m.wc})
    for (Eigen::Index i = 0; i < w->size(); ++i) w->data()[i] = normal(rng);
  return m;
}

RnnModel init_weights(const RnnDims& dims, double sigma_init, std::uint64_t seed) {
  Rng rng(seed);
  return init_weights(dims, sigma_init, rng);
}

StepOutput forward_step(const RnnModel& model, const Eigen::VectorXd& u) {
  if (u.size() != model.wb.cols())
    throw ArgumentError("input has length " + std::to_string(u.size()) + ", expected " +
                        std::to_string(model.wb.cols()));
  if (model.x.size() != model.wa.cols()) throw ArgumentError("state length mismatch");
  StepOutput out;
  out.z.noalias() = model.wa * model.x;
  out.z.noalias() += model.wb * u;
  out.x_next = out.z.array().tanh().matrix();
  out.y.noalias() = model.wc * out.x_next;
  return out;
}

void attach_target(StepOutput& step, const Eigen::VectorXd& target) {
  if (target.size() != step.y.size())
    throw ArgumentError("target has length " + std::to_string(target.size()) + ", expected " +
                        std::to_string(step.y.size()));
  step.e = target - step.y;
  step.loss = 0.5 * step.e.squaredNorm();
}

Eigen::MatrixXd output_layer_gradient(const StepOutput& step) {
  if (step.e.size() != step.y.size()) throw ArgumentError("step has no attached target");
  return -step.e * step.x_next.transpose();
}

Eigen::VectorXd state_loss_gradient(const RnnModel& model, const Eigen::VectorXd& e) {
  if (e.size() != model.wc.rows()) throw ArgumentError("error vector length mismatch");
  return -(model.wc.transpose() * e);
}

bool clip_in_place(Eigen::Ref<Eigen::VectorXd> g, double tau) {
  const double norm = g.norm();
  if (norm > tau) {
    g *= tau / norm;
    return true;
  }
  return false;
}

Eigen::VectorXd clip_gradient(const Eigen::VectorXd& g, double tau) {
  if (!(tau > 0.0)) throw ArgumentError("clipping threshold must be positive");
  Eigen::VectorXd out = g;
  clip_in_place(out, tau);
  return out;
}

void apply_update(RnnModel& model, const Eigen::VectorXd& g, double eta) {
  const RnnDims d = model.dims();
  if (g.size() != d.total_params())
    throw ArgumentError("gradient has length " + std::to_string(g.size()) + ", expected " +
                        std::to_string(d.total_params()));
  if (!g.allFinite()) throw NumericError("non-finite gradient");
  Eigen::Map<Eigen::VectorXd>(model.wa.data(), d.wa_size()) -= eta * g.head(d.wa_size());
  Eigen::Map<Eigen::VectorXd>(model.wb.data(), d.wb_size()) -=
      eta * g.segment(d.wa_size(), d.wb_size());
  Eigen::Map<Eigen::VectorXd>(model.wc.data(), d.wc_size()) -= eta * g.tail(d.wc_size());
  if (!model.wa.allFinite() || !model.wb.allFinite() || !model.wc.allFinite())
    throw NumericError("non-finite weight after update");
}

Eigen::VectorXd unroll(const RnnModel& model) {
  const RnnDims d = model.dims();
  Eigen::VectorXd theta(d.total_params());
  theta << Eigen::Map<const Eigen::VectorXd>(model.wa.data(), d.wa_size()),
      Eigen::Map<const Eigen::VectorXd>(model.wb.data(), d.wb_size()),
      Eigen::Map<const Eigen::VectorXd>(model.wc.data(), d.wc_size());
  return theta;
}

RnnModel reroll(const Eigen::VectorXd& theta, const RnnDims& dims) {
  RnnModel m = make_zero_model(dims);
  if (theta.size() != dims.total_params()) throw ArgumentError("theta length mismatch");
  Eigen::Map<Eigen::VectorXd>(m.wa.data(), dims.wa_size()) = theta.head(dims.wa_size());
  Eigen::Map<Eigen::VectorXd>(m.wb.data(), dims.wb_size()) =
      theta.segment(dims.wa_size(), dims.wb_size());
  Eigen::Map<Eigen::VectorXd>(m.wc.data(), dims.wc_size()) = theta.tail(dims.wc_size());
  return m;
}

void save_snapshot(const RnnModel& model, std::ostream& out) {
  const RnnDims d = model.dims();
  const Eigen::VectorXd theta = unroll(model);
  out << "rnnforecast-model 1\n" << d.hidden << ' ' << d.inputs << ' ' << d.outputs << '\n';
  out.precision(17);
  for (Eigen::Index i = 0; i < theta.size(); ++i) out << theta(i) << '\n';
  for (Eigen::Index i = 0; i < model.x.size(); ++i) out << model.x(i) << '\n';
}

RnnModel load_snapshot(std::istream& in) {
  std::string magic;
  int version = 0;
  RnnDims d;
  if (!(in >> magic >> version) || magic != "rnnforecast-model" || version != 1)
    throw ArgumentError("not a model snapshot");
  if (!(in >> d.hidden >> d.inputs >> d.outputs)) throw ArgumentError("truncated snapshot header");
  check_dims(d);
  Eigen::VectorXd theta(d.total_params());
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    if (!(in >> theta(i))) throw ArgumentError("truncated snapshot weights");
  RnnModel m = reroll(theta, d);
  for (Eigen::Index i = 0; i < d.hidden; ++i)
    if (!(in >> m.x(i))) throw ArgumentError("truncated snapshot state");
  return m;
}

}  // namespace rnnforecast
