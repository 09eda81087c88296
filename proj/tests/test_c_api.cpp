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
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rnnforecast/rnnforecast.h"
#include "temp_dir.hpp"

using json = nlohmann::json;

namespace {

rf_sequence* sine_sequence(double duration, double rate) {
  const std::size_t n = static_cast<std::size_t>(duration * rate) + 1;
  std::vector<double> t(n), pos(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i) / rate;
    for (int c = 0; c < 3; ++c) pos[i * 3 + c] = (c + 1) * std::sin(2 * M_PI * t[i] / 4.0 + c);
  }
  rf_sequence* seq = nullptr;
  EXPECT_EQ(rf_sequence_create(t.data(), pos.data(), n, 1, rate, &seq), RF_OK) << rf_last_error();
  return seq;
}

json take(char* s) {
  json j = json::parse(s);
  rf_string_free(s);
  return j;
}

}  // namespace

TEST(CApi, VersionIsSet) { EXPECT_STREQ(rf_version(), "1.0.0"); }

TEST(CApi, TrainerPredictsThenLearns) {
  rf_online_params p = rf_online_params_default();
  EXPECT_EQ(p.hidden, 30);
  p.hidden = 4;
  p.eta = 0.1;
  rf_trainer* tr = nullptr;
  ASSERT_EQ(rf_trainer_create("snap1", 4, 2, &p, 3, &tr), RF_OK);
  const double u[4] = {1, 0.5, -0.5, 0.2}, y[2] = {1, -1};
  double first[2], second[2];
  ASSERT_EQ(rf_trainer_step(tr, u, y, first), RF_OK);
  ASSERT_EQ(rf_trainer_step(tr, u, y, second), RF_OK);
  EXPECT_NE(first[0], second[0]);
  rf_trainer_free(tr);
}

TEST(CApi, ErrorsCarryCodesAndMessages) {
  rf_trainer* tr = nullptr;
  EXPECT_EQ(rf_trainer_create("lstm", 4, 2, nullptr, 0, &tr), RF_ERR_ARGUMENT);
  EXPECT_EQ(tr, nullptr);
  EXPECT_NE(std::strlen(rf_last_error()), 0u);
  rf_sequence* seq = nullptr;
  EXPECT_EQ(rf_sequence_load("/nonexistent/file.csv", 3, RF_LABEL_REGULAR, &seq), RF_ERR_IO);
  EXPECT_EQ(rf_sequence_create(nullptr, nullptr, 0, 1, 10, &seq), RF_ERR_ARGUMENT);

  testutil::TempDir dir("capi_err");
  {
    std::ofstream(dir.path() / "bad.csv") << "0,1,2,3\n0.1,1,2\n";
  }
  EXPECT_EQ(rf_sequence_load((dir.path() / "bad.csv").c_str(), 1, RF_LABEL_REGULAR, &seq),
            RF_ERR_PARSE);
  EXPECT_NE(std::string(rf_last_error()).find("row 2"), std::string::npos) << rf_last_error();

  rf_sequence* s = sine_sequence(70, 10);
  char* out = nullptr;
  EXPECT_EQ(rf_run_one(s, R"({"algorithm": "snap1"})", &out), RF_ERR_CONFIG);
  EXPECT_EQ(rf_run_one(s, "{oops", &out), RF_ERR_CONFIG);
  EXPECT_EQ(out, nullptr);
  rf_sequence_free(s);
}

TEST(CApi, SequenceRoundTripAndResample) {
  rf_sequence* s = sine_sequence(20, 10);
  EXPECT_EQ(rf_sequence_length(s), 201u);
  EXPECT_EQ(rf_sequence_coords(s), 3u);
  rf_sequence* up = nullptr;
  ASSERT_EQ(rf_sequence_resample(s, 30, 0.0, 1, &up), RF_OK);
  EXPECT_EQ(rf_sequence_rate(up), 30.0);
  EXPECT_EQ(rf_sequence_length(up), 601u);
  std::vector<double> pos(3);
  EXPECT_EQ(rf_sequence_positions(up, pos.data(), 3), RF_ERR_ARGUMENT);
  testutil::TempDir dir("capi_seq");
  const std::string file = (dir.path() / "s.csv").string();
  ASSERT_EQ(rf_sequence_save(s, file.c_str()), RF_OK);
  rf_sequence* back = nullptr;
  ASSERT_EQ(rf_sequence_load(file.c_str(), 1, RF_LABEL_REGULAR, &back), RF_OK);
  std::vector<double> a(603), b(603);
  ASSERT_EQ(rf_sequence_positions(s, a.data(), a.size()), RF_OK);
  ASSERT_EQ(rf_sequence_positions(back, b.data(), b.size()), RF_OK);
  EXPECT_EQ(a, b);
  rf_sequence_free(s);
  rf_sequence_free(up);
  rf_sequence_free(back);
}

TEST(CApi, RunOneWithFixedParameters) {
  rf_sequence* s = sine_sequence(75, 10);
  char* out = nullptr;
  const char* opts =
      R"({"algorithm": "lms", "horizon": 0.5, "preset": "desk",
          "params": {"eta": 0.01, "shl_seconds": 1.2}})";
  ASSERT_EQ(rf_run_one(s, opts, &out), RF_OK) << rf_last_error();
  const json r = take(out);
  EXPECT_EQ(r["algorithm"], "lms");
  EXPECT_TRUE(r["cv_rmse"].is_null());
  EXPECT_EQ(r["metrics"]["n_runs"], 1);
  EXPECT_LT(r["metrics"]["nrmse"]["mean"].get<double>(), 1.0);
  rf_sequence_free(s);
}

TEST(CApi, SweepReportsMissingDatasets) {
  testutil::TempDir dir("capi_sweep");
  const json cfg = {{"preset", "desk"},
                    {"algorithms", {"lms"}},
                    {"datasets", json::array({{{"name", "a"}, {"path", "missing_a.csv"}},
                                              {{"name", "b"}, {"path", "missing_b.csv"}}})},
                    {"output_dir", (dir.path() / "out").string()}};
  char* report = nullptr;
  EXPECT_EQ(rf_sweep(cfg.dump().c_str(), dir.path().c_str(), nullptr, nullptr, &report),
            RF_ERR_CONFIG);
  const std::string msg = rf_last_error();
  EXPECT_NE(msg.find("missing_a.csv"), std::string::npos) << msg;
  EXPECT_NE(msg.find("missing_b.csv"), std::string::npos) << msg;
}

TEST(CApi, ExportOfEmptyResultsWritesHeaders) {
  testutil::TempDir dir("capi_export");
  const std::string header =
      "sequence,label,algorithm,frequency_hz,horizon_s,horizon_steps,eta,shl_s,hidden,"
      "svr_sqrt2_sigma,svr_epsilon,svr_c,cv_rmse,n_runs,mae,mae_ci95,rmse,rmse_ci95,nrmse,"
      "nrmse_ci95,max_error,max_error_ci95,jitter,jitter_ci95,status\n";
  std::ofstream(dir.path() / "results.csv") << header;
  ASSERT_EQ(rf_export((dir.path() / "results.csv").c_str(), (dir.path() / "x").c_str()), RF_OK)
      << rf_last_error();
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "x" / "long.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "x" / "summary.csv"));
}
