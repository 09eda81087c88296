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
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "oracles.hpp"
#include "rnnforecast/error.hpp"
#include "rnnforecast/rnn_core.hpp"
#include "test_util.hpp"

using namespace rnnforecast;

namespace {

oracle::Net to_net(const RnnModel& m) {
  const RnnDims d = m.dims();
  oracle::Net n{static_cast<int>(d.hidden), static_cast<int>(d.inputs), static_cast<int>(d.outputs), {}};
  const Eigen::VectorXd t = unroll(m);
  n.theta.assign(t.data(), t.data() + t.size());
  return n;
}

oracle::Vec to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST(Dims, ParameterCounts) {
  const RnnDims d{5, 7, 3};
  EXPECT_EQ(d.total_params(), 5 * (7 + 3 + 5 + 1));
  EXPECT_EQ(d.state_input_size(), 13);
  const RnnModel m = make_zero_model(d);
  EXPECT_EQ(m.dims(), d);
  EXPECT_EQ(unroll(m).size(), d.total_params());
}

TEST(Layout, UnrollRerollIsIdentity) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> size(1, 9);
  for (int trial = 0; trial < 100; ++trial) {
    const RnnDims d{size(rng), size(rng), size(rng)};
    const RnnModel m = init_weights(d, 1.0, rng);
    const RnnModel back = reroll(unroll(m), d);
    EXPECT_EQ(back.wa, m.wa);
    EXPECT_EQ(back.wb, m.wb);
    EXPECT_EQ(back.wc, m.wc);
    const Eigen::VectorXd theta = testutil::random_vector(d.total_params(), rng);
    EXPECT_EQ(unroll(reroll(theta, d)), theta);
  }
}

TEST(Layout, BlocksAreColumnMajor) {
  const RnnDims d{2, 1, 1};
  Eigen::VectorXd theta(d.total_params());
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = static_cast<double>(i);
  const RnnModel m = reroll(theta, d);
  EXPECT_EQ(m.wa(1, 0), 1.0);
  EXPECT_EQ(m.wa(0, 1), 2.0);
  EXPECT_EQ(m.wb(0, 0), 4.0);
  EXPECT_EQ(m.wb(1, 1), 7.0);
  EXPECT_EQ(m.wc(0, 1), 9.0);
}

TEST(Init, SeededAndScaled) {
  const RnnDims d{40, 30, 9};
  const RnnModel a = init_weights(d, 0.02, 77);
  const RnnModel b = init_weights(d, 0.02, 77);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.x.isZero());
  const Eigen::VectorXd t = unroll(a);
  const double sd = std::sqrt(t.squaredNorm() / t.size());
  EXPECT_NEAR(sd, 0.02, 0.002);
  EXPECT_FALSE(a == init_weights(d, 0.02, 78));
}

TEST(Forward, MatchesPlainLoops) {
  std::mt19937_64 rng(2);
  const RnnDims d{4, 5, 3};
  RnnModel m = init_weights(d, 0.5, rng);
  m.x = testutil::random_vector(4, rng, 0.5);
  const Eigen::VectorXd u = testutil::random_input(5, rng);
  const StepOutput out = forward_step(m, u);
  const oracle::Net n = to_net(m);
  const oracle::Vec x = oracle::next_state(n, to_vec(m.x), to_vec(u));
  const oracle::Vec y = oracle::output(n, x);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(out.x_next(i), x[i], 1e-14);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(out.y(k), y[k], 1e-14);
  const RnnModel before = m;
  forward_step(m, u);
  EXPECT_EQ(m, before);
}

TEST(Gradients, OutputAndStateMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const RnnDims d{3, 2, 2};
    RnnModel m = init_weights(d, 0.7, rng);
    m.x = testutil::random_vector(3, rng, 0.5);
    const Eigen::VectorXd u = testutil::random_input(2, rng);
    const Eigen::VectorXd target = testutil::random_vector(2, rng);
    StepOutput out = forward_step(m, u);
    attach_target(out, target);
    EXPECT_NEAR(out.loss, 0.5 * (target - out.y).squaredNorm(), 1e-15);

    // Loss as a function of W_c with x' held fixed.
    const Eigen::MatrixXd gc = output_layer_gradient(out);
    const oracle::Vec wc = to_vec(Eigen::Map<const Eigen::VectorXd>(m.wc.data(), m.wc.size()));
    const oracle::Vec xn = to_vec(out.x_next);
    auto loss_wc = [&](const oracle::Vec& w) {
      double l = 0.0;
      for (int k = 0; k < 2; ++k) {
        double y = 0.0;
        for (int i = 0; i < 3; ++i) y += w[i * 2 + k] * xn[i];
        l += 0.5 * (target(k) - y) * (target(k) - y);
      }
      return l;
    };
    const oracle::Vec fd = oracle::central_difference(loss_wc, wc, 1e-6);
    const oracle::Vec an = to_vec(Eigen::Map<const Eigen::VectorXd>(gc.data(), gc.size()));
    EXPECT_LT(oracle::relative_error(an, fd), 1e-8);

    // Loss as a function of x'.
    const Eigen::VectorXd gx = state_loss_gradient(m, out.e);
    auto loss_x = [&](const oracle::Vec& x) {
      double l = 0.0;
      for (int k = 0; k < 2; ++k) {
        double y = 0.0;
        for (int i = 0; i < 3; ++i) y += m.wc(k, i) * x[i];
        l += 0.5 * (target(k) - y) * (target(k) - y);
      }
      return l;
    };
    EXPECT_LT(oracle::relative_error(to_vec(gx), oracle::central_difference(loss_x, xn, 1e-6)), 1e-8);
  }
}

TEST(Clip, BoundedAndIdempotent) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> tau_dist(1e-3, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd g = testutil::random_vector(17, rng, 5.0);
    const double tau = tau_dist(rng);
    const Eigen::VectorXd c = clip_gradient(g, tau);
    EXPECT_LE(c.norm(), tau + 1e-12);
    EXPECT_TRUE(clip_gradient(c, tau).isApprox(c, 1e-15));
    if (g.norm() <= tau) EXPECT_EQ(c, g);
    else EXPECT_NEAR(c.norm(), tau, 1e-12);
  }
}

TEST(Update, AppliesScaledStepAndRejectsNonFinite) {
  const RnnDims d{2, 2, 1};
  RnnModel m = init_weights(d, 0.1, 5);
  const Eigen::VectorXd before = unroll(m);
  const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(d.total_params(), -1.0, 1.0);
  apply_update(m, g, 0.5);
  EXPECT_TRUE(unroll(m).isApprox(before - 0.5 * g));
  Eigen::VectorXd bad = g;
  bad(3) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(apply_update(m, bad, 0.1), NumericError);
  EXPECT_THROW(apply_update(m, Eigen::VectorXd::Ones(3), 0.1), ArgumentError);
}

TEST(Snapshot, RoundTripsExactly) {
  std::mt19937_64 rng(6);
  RnnModel m = init_weights(RnnDims{3, 4, 6}, 0.3, rng);
  m.x = testutil::random_vector(3, rng);
  std::stringstream ss;
  save_snapshot(m, ss);
  const RnnModel back = load_snapshot(ss);
  EXPECT_EQ(back, m);
  std::stringstream bad("not a model");
  EXPECT_THROW(load_snapshot(bad), ArgumentError);
}
