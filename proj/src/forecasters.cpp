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
#include <array>
#include <utility>

#include "rnnforecast/error.hpp"
#include "rnnforecast/online_trainers.hpp"

namespace rnnforecast {

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 10> kNames{{
    {Algorithm::kRtrl, "rtrl"},
    {Algorithm::kUoro, "uoro"},
    {Algorithm::kSnap1, "snap1"},
    {Algorithm::kDni, "dni"},
    {Algorithm::kDniSimplified, "dni-simplified"},
    {Algorithm::kFrozen, "frozen"},
    {Algorithm::kLms, "lms"},
    {Algorithm::kLinearRegression, "linreg"},
    {Algorithm::kSvr, "svr"},
    {Algorithm::kNoPrediction, "no-prediction"},
}};

class RnnForecaster : public Forecaster {
 public:
  RnnForecaster(Algorithm algo, Eigen::Index inputs, Eigen::Index outputs,
                const OnlineParams& params, std::uint64_t seed)
      : algo_(algo), settings_{params.eta, params.clip_threshold}, rng_(seed) {
    const RnnDims dims{params.hidden, inputs - 1, outputs};
    model_ = init_weights(dims, params.sigma_init, rng_);
    switch (algo) {
      case Algorithm::kRtrl: rtrl_ = make_rtrl_state(dims); break;
      case Algorithm::kUoro: uoro_ = make_uoro_state(dims, params.uoro_epsilon); break;
      case Algorithm::kSnap1: snap1_ = make_snap1_state(dims); break;
      case Algorithm::kDni:
      case Algorithm::kDniSimplified:
        dni_ = make_dni_state(dims, rng_, params.eta_a, algo == Algorithm::kDni);
        break;
      default: break;
    }
  }

  Eigen::VectorXd step(const WindowedExample& ex) override {
    switch (algo_) {
      case Algorithm::kRtrl: return rtrl_step(model_, rtrl_, ex.input, ex.target, settings_).prediction;
      case Algorithm::kUoro:
        return uoro_step(model_, uoro_, ex.input, ex.target, settings_, rng_).prediction;
      case Algorithm::kSnap1:
        return snap1_step(model_, snap1_, ex.input, ex.target, settings_).prediction;
      case Algorithm::kDni:
      case Algorithm::kDniSimplified:
        return dni_step(model_, dni_, ex.input, ex.target, settings_).prediction;
      case Algorithm::kFrozen: return frozen_step(model_, ex.input, ex.target, settings_).prediction;
      default: throw ArgumentError("not an RNN algorithm");
    }
  }

 private:
  Algorithm algo_;
  UpdateSettings settings_;
  Rng rng_;
  RnnModel model_;
  RtrlState rtrl_;
  UoroState uoro_;
  Snap1State snap1_;
  DniState dni_;
};

class LmsForecaster : public Forecaster {
 public:
  LmsForecaster(Eigen::Index inputs, Eigen::Index outputs, const OnlineParams& params)
      : state_(make_lms_state(inputs, outputs)), settings_{params.eta, params.clip_threshold} {}

  Eigen::VectorXd step(const WindowedExample& ex) override {
    return lms_step(state_, ex.input, ex.target, settings_).prediction;
  }

 private:
  LmsState state_;
  UpdateSettings settings_;
};

}  // namespace

std::string_view to_string(Algorithm algo) {
  for (const auto& [a, name] : kNames)
    if (a == algo) return name;
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (const auto& [a, n] : kNames)
    if (n == name) return a;
  if (name == "snap-1") return Algorithm::kSnap1;
  if (name == "linear-regression") return Algorithm::kLinearRegression;
  throw ArgumentError("unknown algorithm '" + std::string(name) + "'");
}

bool is_online(Algorithm algo) {
  return algo != Algorithm::kLinearRegression && algo != Algorithm::kSvr &&
         algo != Algorithm::kNoPrediction;
}

bool is_stochastic(Algorithm algo) { return has_hidden_layer(algo); }

bool has_hidden_layer(Algorithm algo) {
  switch (algo) {
    case Algorithm::kRtrl:
    case Algorithm::kUoro:
    case Algorithm::kSnap1:
    case Algorithm::kDni:
    case Algorithm::kDniSimplified:
    case Algorithm::kFrozen: return true;
    default: return false;
  }
}

std::unique_ptr<Forecaster> make_online_forecaster(Algorithm algo, Eigen::Index inputs,
                                                   Eigen::Index outputs,
                                                   const OnlineParams& params,
                                                   std::uint64_t seed) {
  if (algo == Algorithm::kLms) return std::make_unique<LmsForecaster>(inputs, outputs, params);
  if (!has_hidden_layer(algo))
    throw ArgumentError(std::string(to_string(algo)) + " is not an online learner");
  return std::make_unique<RnnForecaster>(algo, inputs, outputs, params, seed);
}

}  // namespace rnnforecast
