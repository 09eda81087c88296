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
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "rnnforecast/error.hpp"
#include "rnnforecast/harness.hpp"

namespace rnnforecast {

namespace {

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string rate_label(double hz) {
  std::ostringstream os;
  os << std::setprecision(3) << hz;
  return os.str();
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

const char* kMetricNames[5] = {"mae", "rmse", "nrmse", "max_error", "jitter"};

const MetricSummary& metric(const MetricsReport& r, int i) {
  const MetricSummary* ms[5] = {&r.mae, &r.rmse, &r.nrmse, &r.max_error, &r.jitter};
  return *ms[i];
}

MetricSummary& metric(MetricsReport& r, int i) {
  MetricSummary* ms[5] = {&r.mae, &r.rmse, &r.nrmse, &r.max_error, &r.jitter};
  return *ms[i];
}

constexpr const char* kResultsHeader =
    "sequence,label,algorithm,frequency_hz,horizon_s,horizon_steps,eta,shl_s,hidden,"
    "svr_sqrt2_sigma,svr_epsilon,svr_c,cv_rmse,n_runs,mae,mae_ci95,rmse,rmse_ci95,nrmse,"
    "nrmse_ci95,max_error,max_error_ci95,jitter,jitter_ci95,status";

}  // namespace

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << sanitize(r.sequence) << ',' << to_string(r.label) << ',' << to_string(r.algorithm)
        << ',' << num(r.rate_hz) << ',' << num(r.horizon_s) << ',' << r.horizon_steps << ','
        << num(r.params.eta) << ',' << num(r.params.shl_seconds) << ',' << r.params.hidden << ','
        << num(r.params.svr_sqrt2_sigma) << ',' << num(r.params.svr_epsilon) << ','
        << num(r.params.svr_c) << ',' << num(r.cv_rmse) << ',' << r.report.n_runs;
    for (int i = 0; i < 5; ++i)
      out << ',' << num(metric(r.report, i).mean) << ',' << num(metric(r.report, i).ci95);
    out << ',' << (r.ok() ? std::string("ok") : "error: " + sanitize(r.error)) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw ParseError("unexpected results header in " + path.string(), 1);
  std::vector<ResultRow> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 25) throw ParseError("expected 25 fields, got " + std::to_string(f.size()), row_no);
    try {
      ResultRow r;
      r.sequence = f[0];
      r.label = parse_regularity(f[1]);
      r.algorithm = parse_algorithm(f[2]);
      r.rate_hz = canonical_rate(std::stod(f[3]));
      r.horizon_s = std::stod(f[4]);
      r.horizon_steps = std::stoul(f[5]);
      r.params = {std::stod(f[6]),  std::stod(f[7]),  std::stol(f[8]),
                  std::stod(f[9]),  std::stod(f[10]), std::stod(f[11])};
      r.cv_rmse = std::stod(f[12]);
      r.report.n_runs = std::stoul(f[13]);
      for (int i = 0; i < 5; ++i)
        metric(r.report, i) = {std::stod(f[14 + 2 * i]), std::stod(f[15 + 2 * i])};
      if (f[24] != "ok") r.error = f[24].rfind("error: ", 0) == 0 ? f[24].substr(7) : f[24];
      rows.push_back(std::move(r));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(std::string("bad field: ") + e.what(), row_no);
    }
  }
  return rows;
}

void write_summary_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  const auto summary = summarize_results(rows);
  std::set<double> rates;
  std::set<int> algos;
  std::map<std::pair<int, double>, const SummaryRow*> cells;
  for (const auto& s : summary) {
    if (s.group != "all" || s.horizon_s) continue;
    rates.insert(s.rate_hz);
    algos.insert(static_cast<int>(s.algorithm));
    cells[{static_cast<int>(s.algorithm), s.rate_hz}] = &s;
  }
  auto out = open_out(path);
  out << "metric,algorithm";
  for (double f : rates) out << ",mean_" << rate_label(f) << "Hz,ci95_" << rate_label(f) << "Hz";
  out << '\n';
  for (int i = 0; i < 5; ++i) {
    for (int a : algos) {
      out << kMetricNames[i] << ',' << to_string(static_cast<Algorithm>(a));
      for (double f : rates) {
        const auto it = cells.find({a, f});
        if (it == cells.end()) {
          out << ",,";
        } else {
          const auto& m = metric(it->second->metrics, i);
          out << ',' << num(m.mean) << ',' << num(m.ci95);
        }
      }
      out << '\n';
    }
  }
}

void write_marginals_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "algorithm,frequency_hz,group,horizon_s,cells";
  for (const char* m : kMetricNames) out << ',' << m << ',' << m << "_ci95";
  out << '\n';
  for (const auto& s : summarize_results(rows)) {
    out << to_string(s.algorithm) << ',' << num(s.rate_hz) << ',' << s.group << ','
        << (s.horizon_s ? num(*s.horizon_s) : std::string()) << ',' << s.cells;
    for (int i = 0; i < 5; ++i)
      out << ',' << num(metric(s.metrics, i).mean) << ',' << num(metric(s.metrics, i).ci95);
    out << '\n';
  }
}

void write_long_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "algorithm,sequence,label,frequency_hz,horizon_s,metric,mean,ci95\n";
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    for (int i = 0; i < 5; ++i) {
      out << to_string(r.algorithm) << ',' << sanitize(r.sequence) << ',' << to_string(r.label)
          << ',' << num(r.rate_hz) << ',' << num(r.horizon_s) << ',' << kMetricNames[i] << ','
          << num(metric(r.report, i).mean) << ',' << num(metric(r.report, i).ci95) << '\n';
    }
  }
}

void write_predictions_csv(const ScoredRun& run, const MarkerSequence& seq,
                           const std::filesystem::path& path) {
  auto out = open_out(path);
  const Eigen::Index p = run.prediction.cols();
  const char axes[3] = {'x', 'y', 'z'};
  out << "target_index,t";
  for (const char* kind : {"pred", "true"})
    for (Eigen::Index c = 0; c < p; ++c) out << ',' << kind << "_m" << c / 3 + 1 << axes[c % 3];
  out << '\n';
  for (std::size_t r = 0; r < run.target_indices.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    out << run.target_indices[r] << ',' << num(seq.times[run.target_indices[r]]);
    for (Eigen::Index c = 0; c < p; ++c) out << ',' << num(run.prediction(i, c));
    for (Eigen::Index c = 0; c < p; ++c) out << ',' << num(run.truth(i, c));
    out << '\n';
  }
}

void write_profile_csv(const std::vector<ProfileCell>& cells, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "algorithm,frequency_hz,hidden,shl_s,inputs,steps,median_ms\n";
  for (const auto& c : cells) {
    out << to_string(c.algorithm) << ',' << num(c.rate_hz) << ',' << c.hidden << ','
        << num(c.shl_seconds) << ',' << c.inputs << ',' << c.steps << ','
        << num(c.median_seconds * 1e3) << '\n';
  }
}

void write_profile_table_csv(const std::vector<ProfileCell>& cells,
                             const std::filesystem::path& path) {
  std::set<double> rates;
  std::map<std::pair<int, double>, std::pair<double, std::size_t>> acc;
  std::set<int> algos;
  for (const auto& c : cells) {
    rates.insert(c.rate_hz);
    algos.insert(static_cast<int>(c.algorithm));
    auto& a = acc[{static_cast<int>(c.algorithm), c.rate_hz}];
    a.first += c.median_seconds * 1e3;
    ++a.second;
  }
  auto out = open_out(path);
  out << "algorithm";
  for (double f : rates) out << ",ms_" << rate_label(f) << "Hz";
  out << '\n';
  for (int a : algos) {
    out << to_string(static_cast<Algorithm>(a));
    for (double f : rates) {
      const auto it = acc.find({a, f});
      out << ',' << (it == acc.end() ? std::string() : num(it->second.first / it->second.second));
    }
    out << '\n';
  }
}

}  // namespace rnnforecast
