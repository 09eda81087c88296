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
#include "rnnforecast/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "rnnforecast/error.hpp"
#include "rnnforecast/seeding.hpp"

namespace rnnforecast {

namespace {

constexpr double kTimeTolerance = 1e-9;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  char delim = 0;
  for (char c : {',', ';', '\t'}) {
    if (line.find(c) != std::string_view::npos) {
      delim = c;
      break;
    }
  }
  std::vector<std::string_view> out;
  if (delim != 0) {
    std::size_t start = 0;
    while (true) {
      std::size_t pos = line.find(delim, start);
      out.push_back(trim(line.substr(start, pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  } else {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) out.push_back(line.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Second derivatives of the natural cubic spline through equally spaced `y`.
Eigen::VectorXd natural_spline_moments(const Eigen::VectorXd& y, double h) {
  const Eigen::Index n = y.size();
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(n);
  if (n < 3) return moments;
  const Eigen::Index k = n - 2;
  // Thomas algorithm on the (1, 4, 1) system for the interior moments.
  Eigen::VectorXd c(k), d(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    double rhs = 6.0 * (y(i + 2) - 2.0 * y(i + 1) + y(i)) / (h * h);
    if (i == 0) {
      c(i) = 1.0 / 4.0;
      d(i) = rhs / 4.0;
    } else {
      double denom = 4.0 - c(i - 1);
      c(i) = 1.0 / denom;
      d(i) = (rhs - d(i - 1)) / denom;
    }
  }
  moments(k) = d(k - 1);
  for (Eigen::Index i = k - 2; i >= 0; --i) moments(i + 1) = d(i) - c(i) * moments(i + 2);
  return moments;
}

}  // namespace

std::string_view to_string(Regularity r) {
  switch (r) {
    case Regularity::kRegular: return "regular";
    case Regularity::kIrregular: return "irregular";
    case Regularity::kSlow: return "slow";
  }
  return "regular";
}

Regularity parse_regularity(std::string_view s) {
  if (s == "regular") return Regularity::kRegular;
  if (s == "irregular") return Regularity::kIrregular;
  if (s == "slow") return Regularity::kSlow;
  throw ArgumentError("unknown regularity label '" + std::string(s) + "'");
}

void MarkerSequence::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
    throw ArgumentError("sample rate must be positive");
  if (static_cast<std::size_t>(positions.rows()) != times.size())
    throw ArgumentError("positions row count does not match times count");
  if (positions.cols() == 0 || positions.cols() % 3 != 0)
    throw ArgumentError("positions must hold 3 coordinates per marker");
  if (!positions.allFinite()) throw ArgumentError("positions contain non-finite values");
  const double dt = 1.0 / sample_rate_hz;
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw ArgumentError("times must be strictly increasing");
    if (std::abs(times[k] - (times[0] + static_cast<double>(k) * dt)) > kTimeTolerance)
      throw ArgumentError("times are not uniformly spaced at the sample rate");
  }
}

MarkerSequence parse_sequence(std::string_view text, const LoadOptions& options) {
  if (options.n_markers == 0) throw ArgumentError("n_markers must be >= 1");
  const std::size_t ncoord = 3 * options.n_markers;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<std::size_t> line_numbers;

  std::size_t line_no = 0;
  bool seen_data = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_fields(line);
    double t = 0.0;
    if (!parse_double(fields.front(), t)) {
      if (!seen_data && times.empty()) {
        seen_data = true;  // header row
        continue;
      }
      throw ParseError("malformed timestamp '" + std::string(fields.front()) + "'", line_no);
    }
    seen_data = true;
    if (fields.size() - 1 != ncoord)
      throw ParseError("expected " + std::to_string(ncoord) + " coordinates, got " +
                           std::to_string(fields.size() - 1),
                       line_no);
    if (!std::isfinite(t)) throw ParseError("non-finite timestamp", line_no);
    if (!times.empty() && !(t > times.back()))
      throw ParseError("timestamps must be strictly increasing", line_no);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v = 0.0;
      if (!parse_double(fields[j], v))
        throw ParseError("malformed coordinate '" + std::string(fields[j]) + "'", line_no);
      if (!std::isfinite(v)) throw ParseError("non-finite coordinate", line_no);
      values.push_back(v);
    }
    times.push_back(t);
    line_numbers.push_back(line_no);
  }

  MarkerSequence seq;
  seq.label = options.label;
  const std::size_t n = times.size();
  seq.positions = Eigen::Map<RowMatrix>(values.data(), static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(ncoord));
  if (n >= 2) {
    const double dt = (times.back() - times.front()) / static_cast<double>(n - 1);
    // Timestamps are printed with finite precision; accept jitter well below
    // one sampling period and snap to the exact grid.
    for (std::size_t k = 0; k < n; ++k) {
      double expected = times.front() + static_cast<double>(k) * dt;
      if (std::abs(times[k] - expected) > 1e-3 * dt)
        throw ParseError("timestamps are not uniformly spaced", line_numbers[k]);
    }
    seq.sample_rate_hz = canonical_rate(1.0 / dt);
    const double t0 = times.front();
    for (std::size_t k = 0; k < n; ++k)
      times[k] = t0 + static_cast<double>(k) / seq.sample_rate_hz;
  } else {
    seq.sample_rate_hz = options.nominal_rate_hz;
  }
  seq.times = std::move(times);
  return seq;
}

MarkerSequence load_sequence(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sequence(ss.str(), options);
}

void save_sequence(const MarkerSequence& seq, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "t";
  for (std::size_t m = 0; m < seq.markers(); ++m)
    for (char axis : {'x', 'y', 'z'}) out << ",m" << (m + 1) << axis;
  out << '\n';
  for (std::size_t k = 0; k < seq.length(); ++k) {
    out << std::setprecision(12) << seq.times[k];
    out << std::setprecision(17);
    for (Eigen::Index j = 0; j < seq.positions.cols(); ++j)
      out << ',' << seq.positions(static_cast<Eigen::Index>(k), j);
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

double truncate_one_decimal(double v) {
  double x = v * 10.0;
  double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) x = r;
  return std::trunc(x) / 10.0;
}

double canonical_rate(double hz) {
  double thirds = std::round(hz * 3.0) / 3.0;
  return std::abs(hz - thirds) <= 5e-3 ? thirds : hz;
}

MarkerSequence downsample(const MarkerSequence& seq, int factor) {
  if (factor <= 0) throw ArgumentError("downsample factor must be >= 1");
  MarkerSequence out;
  out.label = seq.label;
  out.sample_rate_hz = seq.sample_rate_hz / factor;
  const std::size_t n = seq.length();
  const std::size_t kept = n == 0 ? 0 : (n - 1) / static_cast<std::size_t>(factor) + 1;
  out.positions.resize(static_cast<Eigen::Index>(kept), seq.positions.cols());
  for (std::size_t i = 0; i < kept; ++i) {
    std::size_t src = i * static_cast<std::size_t>(factor);
    out.times.push_back(seq.times[src]);
    out.positions.row(static_cast<Eigen::Index>(i)) =
        seq.positions.row(static_cast<Eigen::Index>(src));
  }
  return out;
}

MarkerSequence upsample_with_noise(const MarkerSequence& seq, double target_hz, double gamma,
                                   std::uint64_t rng_seed) {
  if (!(gamma >= 0.0)) throw ArgumentError("gamma must be non-negative");
  const double ratio = target_hz / seq.sample_rate_hz;
  const double k_real = std::round(ratio);
  if (!(target_hz > 0.0) || k_real < 1.0 || std::abs(ratio - k_real) > 1e-6)
    throw ArgumentError("target rate must be an integer multiple of the sequence rate");
  const std::size_t k = static_cast<std::size_t>(k_real);
  const std::size_t n = seq.length();
  const Eigen::Index ncoord = seq.positions.cols();

  MarkerSequence out;
  out.label = seq.label;
  out.sample_rate_hz = seq.sample_rate_hz * static_cast<double>(k);
  const std::size_t len = n == 0 ? 0 : (n - 1) * k + 1;
  out.positions.resize(static_cast<Eigen::Index>(len), ncoord);
  out.times.resize(len);
  const double t0 = n == 0 ? 0.0 : seq.times.front();
  for (std::size_t i = 0; i < len; ++i)
    out.times[i] = t0 + static_cast<double>(i) / out.sample_rate_hz;

  const double h = 1.0 / seq.sample_rate_hz;
  for (Eigen::Index j = 0; j < ncoord; ++j) {
    Eigen::VectorXd y = seq.positions.col(j);
    Eigen::VectorXd mom = natural_spline_moments(y, h);
    for (std::size_t i = 0; i < len; ++i) {
      std::size_t seg = i / k;
      std::size_t off = i % k;
      double value;
      if (off == 0) {
        value = y(static_cast<Eigen::Index>(seg));
      } else {
        const double s = static_cast<double>(off) / static_cast<double>(k);
        const double a = 1.0 - s;
        const auto lo = static_cast<Eigen::Index>(seg);
        value = a * y(lo) + s * y(lo + 1) +
                h * h / 6.0 * ((a * a * a - a) * mom(lo) + (s * s * s - s) * mom(lo + 1));
      }
      out.positions(static_cast<Eigen::Index>(i), j) = value;
    }
  }

  Eigen::VectorXd sigma(ncoord);
  for (Eigen::Index j = 0; j < ncoord; ++j)
    sigma(j) = n == 0 ? 0.0 : gamma * (seq.positions.col(j).maxCoeff() - seq.positions.col(j).minCoeff());

  Rng rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < len; ++i) {
    const bool on_grid = i % k == 0;
    for (Eigen::Index j = 0; j < ncoord; ++j) {
      double& v = out.positions(static_cast<Eigen::Index>(i), j);
      if (!on_grid) v += sigma(j) * normal(rng);
      v = truncate_one_decimal(v);
    }
  }
  return out;
}

MarkerSequence resample(const MarkerSequence& seq, double target_hz, double gamma,
                        std::uint64_t rng_seed) {
  if (!(target_hz > 0.0)) throw ArgumentError("target rate must be positive");
  target_hz = canonical_rate(target_hz);
  const double ratio = target_hz / seq.sample_rate_hz;
  if (std::abs(ratio - 1.0) < 1e-9) return seq;
  if (ratio > 1.0) return upsample_with_noise(seq, target_hz, gamma, rng_seed);
  const double inv = 1.0 / ratio;
  const double factor = std::round(inv);
  if (std::abs(inv - factor) > 1e-6)
    throw ArgumentError("target rate must divide the sequence rate by an integer");
  return downsample(seq, static_cast<int>(factor));
}

void save_resample_metadata(const ResampleMetadata& meta, const std::filesystem::path& path) {
  nlohmann::json j = {{"source_rate_hz", meta.source_rate_hz},
                      {"target_rate_hz", meta.target_rate_hz},
                      {"gamma", meta.gamma},
                      {"seed", meta.seed}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ResampleMetadata load_resample_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    return {j.at("source_rate_hz").get<double>(), j.at("target_rate_hz").get<double>(),
            j.at("gamma").get<double>(), j.at("seed").get<std::uint64_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::size_t index_at_seconds(const MarkerSequence& seq, double seconds) {
  double idx = std::ceil(seconds * seq.sample_rate_hz - 1e-6);
  if (idx <= 0.0) return 0;
  return std::min(seq.length(), static_cast<std::size_t>(idx));
}

SequencePartition make_partition(const MarkerSequence& seq, PartitionKind kind) {
  const double split = kind == PartitionKind::kOnline ? 30.0 : 54.0;
  const std::size_t a = index_at_seconds(seq, split);
  const std::size_t b = index_at_seconds(seq, kTestStartSeconds);
  const std::size_t n = seq.length();
  if (b >= n)
    throw ArgumentError("sequence lasts " + std::to_string(seq.duration()) +
                        " s; the partition needs data beyond 60 s");
  return {{0, a}, {a, b}, {b, n}};
}

NormStats fit_norm_stats(const MarkerSequence& seq, const SequencePartition& part,
                         bool unit_scale_constant) {
  if (part.train.empty()) throw ArgumentError("training range is empty");
  if (part.train.end > seq.length()) throw ArgumentError("training range exceeds the sequence");
  auto block = seq.positions.middleRows(static_cast<Eigen::Index>(part.train.begin),
                                        static_cast<Eigen::Index>(part.train.size()));
  NormStats stats;
  stats.mean = block.colwise().mean().transpose();
  const auto centered = block.rowwise() - stats.mean.transpose();
  stats.std = (centered.array().square().colwise().sum() / static_cast<double>(block.rows()))
                  .sqrt()
                  .transpose();
  for (Eigen::Index j = 0; j < stats.std.size(); ++j) {
    if (stats.std(j) > 1e-12 * (1.0 + std::abs(stats.mean(j)))) continue;
    if (unit_scale_constant)
      stats.std(j) = 1.0;
    else
      throw DegenerateDataError("coordinate " + std::to_string(j) +
                                " is constant over the training range");
  }
  return stats;
}

Eigen::VectorXd normalize(const Eigen::VectorXd& v, const NormStats& stats) {
  if (v.size() != stats.mean.size()) throw ArgumentError("normalize: length mismatch");
  return ((v - stats.mean).array() / stats.std.array()).matrix();
}

Eigen::VectorXd denormalize(const Eigen::VectorXd& pred, const NormStats& stats) {
  if (pred.size() != stats.mean.size()) throw ArgumentError("denormalize: length mismatch");
  return (stats.std.array() * pred.array() + stats.mean.array()).matrix();
}

WindowStream::WindowStream(const MarkerSequence& seq, const NormStats& stats,
                           std::size_t shl_steps, std::size_t horizon_steps)
    : coords_(seq.coordinates()), shl_(shl_steps), horizon_(horizon_steps) {
  if (shl_steps < 1) throw ArgumentError("signal history length must be >= 1");
  if (horizon_steps < 1) throw ArgumentError("horizon must be >= 1");
  if (stats.mean.size() != static_cast<Eigen::Index>(coords_) ||
      stats.std.size() != static_cast<Eigen::Index>(coords_))
    throw ArgumentError("normalization statistics do not match the sequence");
  auto normalized = std::make_shared<RowMatrix>(
      ((seq.positions.rowwise() - stats.mean.transpose()).array().rowwise() /
       stats.std.transpose().array())
          .matrix());
  normalized_ = std::move(normalized);
  const std::size_t n = seq.length();
  if (n >= shl_ + horizon_) {
    count_ = n - shl_ - horizon_ + 1;
  } else {
    too_short_ = true;
  }
}

WindowedExample WindowStream::at(std::size_t n) const {
  if (n >= count_) throw ArgumentError("window index out of range");
  WindowedExample ex;
  ex.step = n;
  ex.target_index = n + shl_ + horizon_ - 1;
  ex.input.resize(static_cast<Eigen::Index>(1 + shl_ * coords_));
  ex.input(0) = 1.0;
  const double* src = normalized_->data() + n * coords_;
  std::copy(src, src + shl_ * coords_, ex.input.data() + 1);
  ex.target = row(ex.target_index);
  return ex;
}

Eigen::VectorXd WindowStream::row(std::size_t index) const {
  return normalized_->row(static_cast<Eigen::Index>(index)).transpose();
}

std::vector<WindowedExample> make_windows(const MarkerSequence& seq, const NormStats& stats,
                                          std::size_t shl_steps, std::size_t horizon_steps) {
  WindowStream stream(seq, stats, shl_steps, horizon_steps);
  std::vector<WindowedExample> out;
  out.reserve(stream.size());
  for (std::size_t n = 0; n < stream.size(); ++n) out.push_back(stream.at(n));
  return out;
}

}  // namespace rnnforecast
