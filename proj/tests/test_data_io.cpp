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
#include <fstream>

#include "oracles.hpp"
#include "rnnforecast/data_io.hpp"
#include "rnnforecast/error.hpp"
#include "test_util.hpp"

using namespace rnnforecast;

namespace {

std::string sample_text(char delim, bool header) {
  std::string s;
  if (header) s += "time,a,b,c\n";
  for (int i = 0; i < 4; ++i) {
    s += std::to_string(i * 0.1);
    for (int c = 0; c < 3; ++c) {
      s += delim;
      s += std::to_string(i + c * 0.5);
    }
    s += '\n';
  }
  return s;
}

}  // namespace

TEST(Parse, AcceptsCommonDelimitersAndHeader) {
  LoadOptions opt;
  opt.n_markers = 1;
  for (char d : {',', ';', '\t', ' '}) {
    const MarkerSequence seq = parse_sequence(sample_text(d, d == ','), opt);
    ASSERT_EQ(seq.length(), 4u) << "delimiter " << int(d);
    EXPECT_DOUBLE_EQ(seq.sample_rate_hz, 10.0);
    EXPECT_DOUBLE_EQ(seq.positions(2, 1), 2.5);
  }
}

TEST(Parse, SkipsCommentsAndBlankLines) {
  LoadOptions opt;
  opt.n_markers = 1;
  const auto seq = parse_sequence("# recorded\n\n0,1,2,3\n0.1,1,2,3\n# end\n", opt);
  EXPECT_EQ(seq.length(), 2u);
}

TEST(Parse, WrongColumnCountNamesTheRow) {
  const std::string text =
      "t,m1x,m1y,m1z,m2x,m2y,m2z,m3x,m3y,m3z\n"
      "0,1,2,3,4,5,6,7,8,9\n"
      "0.1,1,2,3,4,5,6,7,8\n";
  try {
    parse_sequence(text);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_NE(std::string(e.what()).find("expected 9 coordinates, got 8"), std::string::npos)
        << e.what();
  }
}

TEST(Parse, RejectsIrregularTimestamps) {
  LoadOptions opt;
  opt.n_markers = 1;
  EXPECT_THROW(parse_sequence("0,1,1,1\n0.1,1,1,1\n0.35,1,1,1\n", opt), ParseError);
  EXPECT_THROW(parse_sequence("0,1,1,1\n0.1,1,1,1\n0.1,1,1,1\n", opt), ParseError);
  EXPECT_THROW(parse_sequence("0,1,x,1\n", opt), ParseError);
}

TEST(Parse, InfersThirdOfTenHertz) {
  LoadOptions opt;
  opt.n_markers = 1;
  const auto seq = parse_sequence("0,1,1,1\n0.3,1,1,1\n0.6,1,1,1\n0.9,1,1,1\n", opt);
  EXPECT_DOUBLE_EQ(seq.sample_rate_hz, 10.0 / 3.0);
  EXPECT_NO_THROW(seq.validate());
}

TEST(Io, SaveLoadRoundTrip) {
  testutil::TempDir dir("io");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 10.0);
  auto seq = testutil::make_sequence(12.0, 30.0, 2, [&](double, int) { return n(rng); });
  save_sequence(seq, dir.path() / "s.csv");
  LoadOptions opt;
  opt.n_markers = 2;
  const auto back = load_sequence(dir.path() / "s.csv", opt);
  EXPECT_DOUBLE_EQ(back.sample_rate_hz, 30.0);
  ASSERT_EQ(back.length(), seq.length());
  EXPECT_EQ(back.positions, seq.positions);
  EXPECT_THROW(load_sequence(dir.path() / "missing.csv"), IoError);
}

TEST(Resample, TruncationTowardZero) {
  EXPECT_DOUBLE_EQ(truncate_one_decimal(1.26), 1.2);
  EXPECT_DOUBLE_EQ(truncate_one_decimal(-1.26), -1.2);
  EXPECT_DOUBLE_EQ(truncate_one_decimal(0.3), 0.3);
  EXPECT_DOUBLE_EQ(truncate_one_decimal(-0.7), -0.7);
  EXPECT_DOUBLE_EQ(truncate_one_decimal(2.0), 2.0);
  for (int i = -500; i <= 500; ++i) EXPECT_DOUBLE_EQ(truncate_one_decimal(i / 10.0), i / 10.0);
}

TEST(Resample, CanonicalRates) {
  EXPECT_DOUBLE_EQ(canonical_rate(3.33), 10.0 / 3.0);
  EXPECT_DOUBLE_EQ(canonical_rate(10.0), 10.0);
  EXPECT_DOUBLE_EQ(canonical_rate(30.0), 30.0);
  EXPECT_DOUBLE_EQ(canonical_rate(12.5), 12.5);
}

TEST(Resample, DownsampleKeepsEveryThirdSample) {
  auto seq = testutil::make_sequence(3.0, 10.0, 1, [](double t, int c) { return 10 * t + c; });
  const auto d = resample(seq, 3.33, kDefaultNoiseGamma, 1);
  EXPECT_DOUBLE_EQ(d.sample_rate_hz, 10.0 / 3.0);
  ASSERT_EQ(d.length(), 11u);
  for (Eigen::Index i = 0; i < 11; ++i) EXPECT_EQ(d.positions.row(i), seq.positions.row(3 * i));
  EXPECT_NO_THROW(d.validate());
}

TEST(Resample, GridPointsAreTruncatedOriginals) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  auto seq = testutil::make_sequence(5.0, 10.0, 3, [&](double, int) { return u(rng); });
  const auto up = upsample_with_noise(seq, 30.0, kDefaultNoiseGamma, 9);
  EXPECT_DOUBLE_EQ(up.sample_rate_hz, 30.0);
  ASSERT_EQ(up.length(), 3 * (seq.length() - 1) + 1);
  for (Eigen::Index i = 0; i < seq.positions.rows(); ++i)
    for (Eigen::Index c = 0; c < seq.positions.cols(); ++c)
      EXPECT_DOUBLE_EQ(up.positions(3 * i, c), truncate_one_decimal(seq.positions(i, c)));
  EXPECT_NO_THROW(up.validate());
}

TEST(Resample, NoiseFreeSplineMatchesNaturalSplineOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-500.0, 500.0);
  auto seq = testutil::make_sequence(0.9, 10.0, 1, [&](double, int) { return u(rng); });
  const auto up = upsample_with_noise(seq, 30.0, 0.0, 1);

  // Natural spline second derivatives from the dense tridiagonal system.
  const std::size_t n = seq.length();
  const double h = 0.1;
  for (Eigen::Index c = 0; c < 3; ++c) {
    std::vector<oracle::Vec> a(n, oracle::Vec(n, 0.0));
    oracle::Vec rhs(n, 0.0), mom;
    a[0][0] = a[n - 1][n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      a[i][i - 1] = h / 6.0;
      a[i][i] = 2.0 * h / 3.0;
      a[i][i + 1] = h / 6.0;
      rhs[i] = (seq.positions(i + 1, c) - 2 * seq.positions(i, c) + seq.positions(i - 1, c)) / h;
    }
    ASSERT_TRUE(oracle::solve(a, rhs, mom));
    for (std::size_t k = 0; k + 1 < n; ++k) {
      for (int off = 1; off < 3; ++off) {
        const double s = off / 3.0, b = 1.0 - s;
        const double y0 = seq.positions(k, c), y1 = seq.positions(k + 1, c);
        const double expect = b * y0 + s * y1 +
                              h * h / 6.0 * ((b * b * b - b) * mom[k] + (s * s * s - s) * mom[k + 1]);
        const double got = up.positions(static_cast<Eigen::Index>(3 * k + off), c);
        EXPECT_LE(std::abs(got), std::abs(expect) + 1e-9);
        EXPECT_LT(std::abs(got - expect), 0.1 + 1e-9);
      }
    }
  }
}

TEST(Resample, NoiseScaleFollowsGamma) {
  // A linear ramp is reproduced exactly by the spline, so off-grid deviations
  // are the added noise plus truncation.
  auto seq = testutil::make_sequence(300.0, 10.0, 1, [](double t, int) { return 10.0 * t; });
  const double range = 3000.0;
  const auto up = upsample_with_noise(seq, 30.0, kDefaultNoiseGamma, 21);
  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < up.positions.rows(); ++i) {
    if (i % 3 == 0) continue;
    const double d = up.positions(i, 0) - 10.0 * up.times[static_cast<std::size_t>(i)];
    sum += d;
    sum_sq += d * d;
    ++count;
  }
  const double mean = sum / count;
  const double sd = std::sqrt(sum_sq / count - mean * mean);
  EXPECT_NEAR(sd, range / 150.0, 0.05 * range / 150.0);
}

TEST(Resample, ConstantStaysConstant) {
  auto seq = testutil::make_sequence(4.0, 10.0, 1, [](double, int) { return 7.3; });
  const auto up = resample(seq, 30.0, kDefaultNoiseGamma, 4);
  EXPECT_TRUE((up.positions.array() == 7.3).all());
}

TEST(Resample, RejectsNonIntegerRatios) {
  auto seq = testutil::make_sequence(4.0, 10.0, 1, [](double t, int) { return t; });
  EXPECT_THROW(resample(seq, 25.0, kDefaultNoiseGamma, 1), ArgumentError);
  EXPECT_THROW(resample(seq, 4.0, kDefaultNoiseGamma, 1), ArgumentError);
}

TEST(Resample, SidecarRoundTrip) {
  testutil::TempDir dir("meta");
  const ResampleMetadata m{10.0, 30.0, 1.0 / 150.0, 123456789012345ULL};
  save_resample_metadata(m, dir.path() / "m.json");
  const auto back = load_resample_metadata(dir.path() / "m.json");
  EXPECT_EQ(back.seed, m.seed);
  EXPECT_DOUBLE_EQ(back.gamma, m.gamma);
  EXPECT_DOUBLE_EQ(back.target_rate_hz, 30.0);
}

TEST(Partition, IndicesAtTenAndThirdHertz) {
  auto seq = testutil::make_sequence(100.0, 10.0, 1, [](double t, int) { return t; });
  auto on = make_partition(seq, PartitionKind::kOnline);
  EXPECT_EQ(on.train.end, 300u);
  EXPECT_EQ(on.cross_validation.begin, 300u);
  EXPECT_EQ(on.cross_validation.end, 600u);
  EXPECT_EQ(on.test.begin, 600u);
  EXPECT_EQ(on.test.end, 1001u);
  auto off = make_partition(seq, PartitionKind::kOffline);
  EXPECT_EQ(off.train.end, 540u);
  EXPECT_EQ(off.test.begin, 600u);

  auto third = resample(seq, 3.33, kDefaultNoiseGamma, 0);
  auto p3 = make_partition(third, PartitionKind::kOnline);
  EXPECT_EQ(p3.cross_validation.begin, 100u);
  EXPECT_EQ(p3.test.begin, 200u);
  EXPECT_NEAR(third.times[p3.test.begin], 60.0, 1e-9);

  auto short_seq = testutil::make_sequence(59.9, 10.0, 1, [](double t, int) { return t; });
  EXPECT_THROW(make_partition(short_seq, PartitionKind::kOnline), ArgumentError);
}

TEST(Normalize, TwoPointStatistics) {
  auto seq = testutil::make_sequence(0.3, 10.0, 1, [](double t, int) { return t < 0.05 ? 0.0 : 2.0; });
  SequencePartition part{{0, 2}, {2, 3}, {3, 4}};
  const NormStats s = fit_norm_stats(seq, part);
  EXPECT_TRUE(s.mean.isApprox(Eigen::VectorXd::Ones(3)));
  EXPECT_TRUE(s.std.isApprox(Eigen::VectorXd::Ones(3)));
  Eigen::VectorXd v(3);
  v << 3, -1, 1;
  EXPECT_TRUE(denormalize(normalize(v, s), s).isApprox(v));
}

TEST(Normalize, IgnoresDataOutsideTraining) {
  auto seq = testutil::make_sequence(100.0, 10.0, 1, [](double t, int c) { return std::sin(t + c); });
  const auto part = make_partition(seq, PartitionKind::kOnline);
  const NormStats a = fit_norm_stats(seq, part);
  seq.positions.bottomRows(500).array() += 1000.0;
  const NormStats b = fit_norm_stats(seq, part);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std, b.std);
}

TEST(Normalize, ConstantCoordinate) {
  auto seq = testutil::make_sequence(100.0, 10.0, 1,
                                     [](double t, int c) { return c == 1 ? 4.0 : std::sin(t); });
  const auto part = make_partition(seq, PartitionKind::kOnline);
  EXPECT_THROW(fit_norm_stats(seq, part), DegenerateDataError);
  const NormStats s = fit_norm_stats(seq, part, true);
  EXPECT_DOUBLE_EQ(s.std(1), 1.0);
  EXPECT_DOUBLE_EQ(s.mean(1), 4.0);
}

TEST(Windows, LayoutAndCount) {
  auto seq = testutil::make_sequence(100.0, 10.0, 2, [](double t, int c) { return std::sin(t) + c; });
  const auto part = make_partition(seq, PartitionKind::kOnline);
  const NormStats s = fit_norm_stats(seq, part);
  const std::size_t L = 4, h = 3;
  WindowStream stream(seq, s, L, h);
  EXPECT_EQ(stream.size(), seq.length() - L - h + 1);
  EXPECT_EQ(stream.input_size(), 1 + 6 * L);
  const auto ex = stream.at(7);
  EXPECT_EQ(ex.target_index, 7 + L + h - 1);
  EXPECT_EQ(ex.input(0), 1.0);
  for (std::size_t k = 0; k < L; ++k) {
    const Eigen::VectorXd row = normalize(seq.positions.row(7 + k).transpose(), s);
    EXPECT_TRUE(ex.input.segment(1 + 6 * k, 6).isApprox(row, 1e-14));
  }
  EXPECT_TRUE(ex.target.isApprox(normalize(seq.positions.row(ex.target_index).transpose(), s)));
  const auto eager = make_windows(seq, s, L, h);
  ASSERT_EQ(eager.size(), stream.size());
  EXPECT_EQ(eager.back().target_index, seq.length() - 1);
}

TEST(Windows, TooShortSequenceGivesEmptyStream) {
  auto seq = testutil::make_sequence(0.5, 10.0, 1, [](double t, int c) { return t + c; });
  SequencePartition part{{0, 6}, {6, 6}, {6, 6}};
  const NormStats s = fit_norm_stats(seq, part);
  WindowStream stream(seq, s, 4, 3);
  EXPECT_TRUE(stream.too_short());
  EXPECT_TRUE(stream.empty());
}
