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
#include "rnnforecast/offline_baselines.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rnnforecast/error.hpp"

namespace rnnforecast {

Dataset collect_dataset(const WindowStream& stream, const IndexRange& targets) {
  std::vector<std::size_t> picked;
  for (std::size_t n = 0; n < stream.size(); ++n) {
    const std::size_t t = n + stream.shl() + stream.horizon() - 1;
    if (targets.contains(t)) picked.push_back(n);
  }
  Dataset data;
  data.inputs.resize(static_cast<Eigen::Index>(picked.size()),
                     static_cast<Eigen::Index>(stream.input_size()));
  data.targets.resize(static_cast<Eigen::Index>(picked.size()),
                      static_cast<Eigen::Index>(stream.output_size()));
  for (std::size_t r = 0; r < picked.size(); ++r) {
    const WindowedExample ex = stream.at(picked[r]);
    data.inputs.row(static_cast<Eigen::Index>(r)) = ex.input.transpose();
    data.targets.row(static_cast<Eigen::Index>(r)) = ex.target.transpose();
  }
  return data;
}

LinRegModel linreg_fit(const Dataset& data) {
  if (data.size() == 0) throw ArgumentError("linear regression needs at least one example");
  if (data.targets.rows() != data.inputs.rows())
    throw ArgumentError("inputs and targets have different lengths");
  // U W^T = Y; the complete orthogonal decomposition yields the minimum-norm
  // solution when U is rank deficient.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(data.inputs);
  LinRegModel model;
  model.w = cod.solve(data.targets).transpose();
  if (!model.w.allFinite()) throw NumericError("non-finite regression weights");
  return model;
}

double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma) {
  return std::exp(-(a - b).squaredNorm() / (2.0 * sigma * sigma));
}

namespace {

constexpr double kTau = 1e-12;

// Solves one output of the epsilon-SVR dual
//   min 1/2 a^T Q a + p^T a,  y^T a = 0,  0 <= a <= C
// over 2N variables: a_t = alpha_t (y_t = +1) and a_{t+N} = alpha*_t
// (y = -1), Q_st = y_s y_t K(s mod N, t mod N).
struct DualResult {
  Eigen::VectorXd beta;  // alpha - alpha*
  double bias = 0.0;
  SvrDiagnostics diag;
};

DualResult solve_dual(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& z,
                      const SvrParams& params, const SvrSolverOptions& options) {
  const Eigen::Index n = kernel.rows();
  const Eigen::Index l = 2 * n;
  const double c = params.c;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(l);
  Eigen::VectorXd grad(l);
  Eigen::VectorXd lin(l);
  std::vector<signed char> y(static_cast<std::size_t>(l));
  for (Eigen::Index t = 0; t < n; ++t) {
    lin(t) = params.epsilon - z(t);
    lin(t + n) = params.epsilon + z(t);
    y[static_cast<std::size_t>(t)] = 1;
    y[static_cast<std::size_t>(t + n)] = -1;
  }
  grad = lin;
  auto yv = [&](Eigen::Index t) { return static_cast<double>(y[static_cast<std::size_t>(t)]); };
  auto k = [&](Eigen::Index s, Eigen::Index t) { return kernel(s % n, t % n); };
  auto at_upper = [&](Eigen::Index t) { return alpha(t) >= c; };
  auto at_lower = [&](Eigen::Index t) { return alpha(t) <= 0.0; };
  auto objective = [&] { return -0.5 * alpha.dot(grad + lin); };

  const std::uint64_t cap =
      options.max_iterations ? options.max_iterations : static_cast<std::uint64_t>(1e5) * n;
  DualResult res;
  if (options.record_objective) res.diag.dual_objective.push_back(objective());

  std::uint64_t iter = 0;
  double violation = std::numeric_limits<double>::infinity();
  while (true) {
    // Maximal violating pair with second-order selection of the second index.
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < l; ++t) {
      if (yv(t) > 0) {
        if (!at_upper(t) && -grad(t) >= gmax) { gmax = -grad(t); i = t; }
      } else {
        if (!at_lower(t) && grad(t) >= gmax) { gmax = grad(t); i = t; }
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    double best = std::numeric_limits<double>::infinity();
    if (i >= 0) {
      const double kii = k(i, i);
      for (Eigen::Index t = 0; t < l; ++t) {
        if (yv(t) > 0) {
          if (at_lower(t)) continue;
          const double diff = gmax + grad(t);
          gmax2 = std::max(gmax2, grad(t));
          if (diff > 0) {
            double quad = kii + k(t, t) - 2.0 * yv(i) * k(i, t);
            double obj = -diff * diff / (quad > 0 ? quad : kTau);
            if (obj <= best) { best = obj; j = t; }
          }
        } else {
          if (at_upper(t)) continue;
          const double diff = gmax - grad(t);
          gmax2 = std::max(gmax2, -grad(t));
          if (diff > 0) {
            double quad = kii + k(t, t) + 2.0 * yv(i) * k(i, t);
            double obj = -diff * diff / (quad > 0 ? quad : kTau);
            if (obj <= best) { best = obj; j = t; }
          }
        }
      }
    }
    violation = (i < 0) ? 0.0 : gmax + gmax2;
    if (i < 0 || j < 0 || violation < options.tolerance) break;
    if (iter >= cap)
      throw ConvergenceError("SVR solver hit its iteration cap (" + std::to_string(cap) +
                                 ") with KKT violation " + std::to_string(violation),
                             violation);
    ++iter;

    const double old_i = alpha(i);
    const double old_j = alpha(j);
    const double kij = k(i, j);
    if (y[static_cast<std::size_t>(i)] != y[static_cast<std::size_t>(j)]) {
      double quad = k(i, i) + k(j, j) + 2.0 * (-kij);
      if (quad <= 0) quad = kTau;
      // Q_ij = -K_ij when the labels differ.
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = diff; }
      } else {
        if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = -diff; }
      }
      if (diff > 0) {
        if (alpha(i) > c) { alpha(i) = c; alpha(j) = c - diff; }
      } else {
        if (alpha(j) > c) { alpha(j) = c; alpha(i) = c + diff; }
      }
    } else {
      double quad = k(i, i) + k(j, j) - 2.0 * kij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) { alpha(i) = c; alpha(j) = sum - c; }
      } else {
        if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = sum; }
      }
      if (sum > c) {
        if (alpha(j) > c) { alpha(j) = c; alpha(i) = sum - c; }
      } else {
        if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = sum; }
      }
    }
    const double di = alpha(i) - old_i;
    const double dj = alpha(j) - old_j;
    for (Eigen::Index t = 0; t < l; ++t)
      grad(t) += yv(t) * (yv(i) * k(i, t) * di + yv(j) * k(j, t) * dj);
    if (options.record_objective) res.diag.dual_objective.push_back(objective());
  }

  // Bias from the free variables, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < l; ++t) {
    const double yg = yv(t) * grad(t);
    if (at_upper(t)) {
      if (yv(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (yv(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  res.bias = -rho;
  res.beta = alpha.head(n) - alpha.tail(n);
  res.diag.iterations = iter;
  res.diag.violation = violation;
  return res;
}

}  // namespace

SvrModel svr_fit(const Dataset& data, const SvrParams& params, const SvrSolverOptions& options) {
  if (!(params.sigma > 0.0) || !(params.epsilon > 0.0) || !(params.c > 0.0))
    throw ArgumentError("SVR sigma, epsilon and C must be positive");
  const Eigen::Index n = data.size();
  if (n == 0) throw ArgumentError("SVR needs at least one training example");

  const Eigen::VectorXd sq = data.inputs.rowwise().squaredNorm();
  Eigen::MatrixXd kernel = -2.0 * data.inputs * data.inputs.transpose();
  kernel.colwise() += sq;
  kernel.rowwise() += sq.transpose();
  kernel = (-kernel.array().max(0.0) / (2.0 * params.sigma * params.sigma)).exp().matrix();
  kernel.diagonal().setOnes();

  const Eigen::Index p = data.targets.cols();
  Eigen::MatrixXd beta(n, p);
  SvrModel model;
  model.params = params;
  model.bias.resize(p);
  for (Eigen::Index o = 0; o < p; ++o) {
    DualResult r = solve_dual(kernel, data.targets.col(o), params, options);
    beta.col(o) = r.beta;
    model.bias(o) = r.bias;
    model.diagnostics.push_back(std::move(r.diag));
  }

  std::vector<Eigen::Index> keep;
  for (Eigen::Index t = 0; t < n; ++t)
    if ((beta.row(t).array() != 0.0).any()) keep.push_back(t);
  model.support.resize(static_cast<Eigen::Index>(keep.size()), data.inputs.cols());
  model.coefficients.resize(static_cast<Eigen::Index>(keep.size()), p);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    model.support.row(static_cast<Eigen::Index>(r)) = data.inputs.row(keep[r]);
    model.coefficients.row(static_cast<Eigen::Index>(r)) = beta.row(keep[r]);
  }
  return model;
}

Eigen::VectorXd SvrModel::predict(const Eigen::VectorXd& u) const {
  if (support.rows() > 0 && u.size() != support.cols())
    throw ArgumentError("SVR query has the wrong length");
  Eigen::VectorXd k(support.rows());
  for (Eigen::Index s = 0; s < support.rows(); ++s)
    k(s) = std::exp(-(support.row(s).transpose() - u).squaredNorm() /
                    (2.0 * params.sigma * params.sigma));
  return coefficients.transpose() * k + bias;
}

Eigen::VectorXd svr_predict(const SvrModel& model, const Eigen::VectorXd& u) {
  return model.predict(u);
}

Eigen::VectorXd no_prediction(const WindowedExample& example, Eigen::Index outputs) {
  if (outputs < 1 || example.input.size() < outputs + 1)
    throw ArgumentError("input window shorter than one sample");
  return example.input.tail(outputs);
}

namespace {

template <typename Model>
class FixedForecaster : public Forecaster {
 public:
  explicit FixedForecaster(Model model) : model_(std::move(model)) {}
  Eigen::VectorXd step(const WindowedExample& ex) override { return model_.predict(ex.input); }

 private:
  Model model_;
};

class NoPredictionForecaster : public Forecaster {
 public:
  explicit NoPredictionForecaster(Eigen::Index outputs) : outputs_(outputs) {}
  Eigen::VectorXd step(const WindowedExample& ex) override { return no_prediction(ex, outputs_); }

 private:
  Eigen::Index outputs_;
};

}  // namespace

std::unique_ptr<Forecaster> make_fixed_forecaster(LinRegModel model) {
  return std::make_unique<FixedForecaster<LinRegModel>>(std::move(model));
}

std::unique_ptr<Forecaster> make_fixed_forecaster(SvrModel model) {
  return std::make_unique<FixedForecaster<SvrModel>>(std::move(model));
}

std::unique_ptr<Forecaster> make_no_prediction_forecaster(Eigen::Index outputs) {
  return std::make_unique<NoPredictionForecaster>(outputs);
}

}  // namespace rnnforecast
