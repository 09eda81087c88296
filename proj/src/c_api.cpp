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
#include "rnnforecast/rnnforecast.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <string>

#include "rnnforecast/config.hpp"
#include "rnnforecast/error.hpp"
#include "rnnforecast/harness.hpp"
#include "rnnforecast/online_trainers.hpp"
#include "rnnforecast/seeding.hpp"
#include "rnnforecast/worker_pool.hpp"

struct rf_sequence {
  rnnforecast::MarkerSequence seq;
};

struct rf_trainer {
  std::unique_ptr<rnnforecast::Forecaster> forecaster;
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::size_t steps = 0;
};

namespace {

using nlohmann::json;
namespace rf = rnnforecast;
namespace fs = std::filesystem;

thread_local std::string g_last_error;

rf_status classify(const std::exception& e) {
  if (dynamic_cast<const rf::ParseError*>(&e)) return RF_ERR_PARSE;
  if (dynamic_cast<const rf::IoError*>(&e)) return RF_ERR_IO;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return RF_ERR_IO;
  if (dynamic_cast<const rf::NumericError*>(&e)) return RF_ERR_NUMERIC;
  if (dynamic_cast<const rf::DegenerateDataError*>(&e)) return RF_ERR_DEGENERATE;
  if (dynamic_cast<const rf::ConvergenceError*>(&e)) return RF_ERR_CONVERGENCE;
  if (dynamic_cast<const rf::ConfigError*>(&e)) return RF_ERR_CONFIG;
  if (dynamic_cast<const rf::ArgumentError*>(&e)) return RF_ERR_ARGUMENT;
  if (dynamic_cast<const json::exception*>(&e)) return RF_ERR_CONFIG;
  return RF_ERR_INTERNAL;
}

template <class Fn>
rf_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return classify(e);
  } catch (...) {
    g_last_error = "unknown error";
    return RF_ERR_INTERNAL;
  }
}

rf_status bad_argument(const char* msg) {
  g_last_error = msg;
  return RF_ERR_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rf::Regularity to_label(rf_label label) {
  switch (label) {
    case RF_LABEL_IRREGULAR: return rf::Regularity::kIrregular;
    case RF_LABEL_SLOW: return rf::Regularity::kSlow;
    default: return rf::Regularity::kRegular;
  }
}

std::string rate_tag(double hz) {
  std::ostringstream os;
  os << std::setprecision(3) << hz;
  return os.str();
}

json params_json(const rf::HyperParams& p) {
  return {{"eta", p.eta},
          {"shl_seconds", p.shl_seconds},
          {"hidden", p.hidden},
          {"svr_sqrt2_sigma", p.svr_sqrt2_sigma},
          {"svr_epsilon", p.svr_epsilon},
          {"svr_c", p.svr_c}};
}

json report_json(const rf::MetricsReport& r) {
  auto one = [](const rf::MetricSummary& m) { return json{{"mean", m.mean}, {"ci95", m.ci95}}; };
  return {{"n_runs", r.n_runs},
          {"mae", one(r.mae)},
          {"rmse", one(r.rmse)},
          {"nrmse", one(r.nrmse)},
          {"max_error", one(r.max_error)},
          {"jitter", one(r.jitter)}};
}

// Fails early when the directory cannot be created or written.
void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw rf::IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".rnnforecast_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw rf::IoError("output directory is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

std::vector<rf::NamedSequence> load_datasets(const rf::ExperimentConfig& cfg) {
  std::vector<std::string> missing;
  for (const auto& d : cfg.datasets)
    if (!fs::is_regular_file(d.path)) missing.push_back(d.path.string());
  if (!missing.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& m : missing) msg += "\n  - dataset not found: " + m;
    throw rf::ConfigError(msg);
  }
  std::vector<rf::NamedSequence> out;
  for (const auto& d : cfg.datasets) {
    rf::LoadOptions opt;
    opt.n_markers = cfg.n_markers;
    opt.label = d.label;
    out.push_back({d.name, rf::load_sequence(d.path, opt)});
  }
  return out;
}

}  // namespace

extern "C" {

const char* rf_last_error(void) { return g_last_error.c_str(); }

const char* rf_version(void) { return "1.0.0"; }

void rf_string_free(char* s) { delete[] s; }

rf_status rf_sequence_load(const char* path, size_t n_markers, rf_label label, rf_sequence** out) {
  if (!path || !out) return bad_argument("null argument");
  return guarded([&] {
    rf::LoadOptions opt;
    opt.n_markers = n_markers;
    opt.label = to_label(label);
    *out = new rf_sequence{rf::load_sequence(path, opt)};
    return RF_OK;
  });
}

rf_status rf_sequence_create(const double* times, const double* positions, size_t n,
                             size_t n_markers, double rate_hz, rf_sequence** out) {
  if (!times || !positions || !out) return bad_argument("null argument");
  return guarded([&] {
    auto* s = new rf_sequence;
    s->seq.sample_rate_hz = rate_hz;
    s->seq.times.assign(times, times + n);
    const auto p = static_cast<Eigen::Index>(3 * n_markers);
    s->seq.positions = Eigen::Map<const rf::RowMatrix>(positions, static_cast<Eigen::Index>(n), p);
    try {
      s->seq.validate();
    } catch (...) {
      delete s;
      throw;
    }
    *out = s;
    return RF_OK;
  });
}

rf_status rf_sequence_save(const rf_sequence* seq, const char* path) {
  if (!seq || !path) return bad_argument("null argument");
  return guarded([&] {
    rf::save_sequence(seq->seq, path);
    return RF_OK;
  });
}

rf_status rf_sequence_resample(const rf_sequence* seq, double target_hz, double gamma,
                               uint64_t seed, rf_sequence** out) {
  if (!seq || !out) return bad_argument("null argument");
  return guarded([&] {
    if (gamma < 0.0) gamma = rf::kDefaultNoiseGamma;
    *out = new rf_sequence{rf::resample(seq->seq, rf::canonical_rate(target_hz), gamma, seed)};
    return RF_OK;
  });
}

size_t rf_sequence_length(const rf_sequence* seq) { return seq ? seq->seq.length() : 0; }

size_t rf_sequence_coords(const rf_sequence* seq) {
  return seq ? static_cast<size_t>(seq->seq.positions.cols()) : 0;
}

double rf_sequence_rate(const rf_sequence* seq) { return seq ? seq->seq.sample_rate_hz : 0.0; }

rf_status rf_sequence_positions(const rf_sequence* seq, double* out, size_t capacity) {
  if (!seq || !out) return bad_argument("null argument");
  const auto size = static_cast<size_t>(seq->seq.positions.size());
  if (capacity < size) return bad_argument("output buffer too small");
  std::memcpy(out, seq->seq.positions.data(), size * sizeof(double));
  return RF_OK;
}

void rf_sequence_free(rf_sequence* seq) { delete seq; }

rf_status rf_resample_file(const char* in_path, const char* out_dir, const double* rates_hz,
                           size_t n_rates, double gamma, uint64_t seed, size_t n_markers) {
  if (!in_path || !out_dir || (!rates_hz && n_rates > 0)) return bad_argument("null argument");
  return guarded([&] {
    if (gamma < 0.0) gamma = rf::kDefaultNoiseGamma;
    rf::LoadOptions opt;
    opt.n_markers = n_markers;
    const fs::path in(in_path);
    const rf::MarkerSequence seq = rf::load_sequence(in, opt);
    ensure_writable(out_dir);
    const std::string stem = in.stem().string();
    for (size_t i = 0; i < n_rates; ++i) {
      const double rate = rf::canonical_rate(rates_hz[i]);
      const std::uint64_t s = rf::resample_seed(seed, stem, rate);
      const rf::MarkerSequence out = rf::resample(seq, rate, gamma, s);
      const fs::path base = fs::path(out_dir) / (stem + "_" + rate_tag(rate) + "Hz");
      rf::save_sequence(out, base.string() + ".csv");
      rf::save_resample_metadata({seq.sample_rate_hz, rate, gamma, s}, base.string() + ".json");
    }
    return RF_OK;
  });
}

rf_online_params rf_online_params_default(void) {
  return {0.01, 30, rf::kDefaultClipThreshold, rf::kDefaultSigmaInit,
          rf::kDefaultCreditLearningRate};
}

rf_status rf_trainer_create(const char* algorithm, size_t inputs, size_t outputs,
                            const rf_online_params* params, uint64_t seed, rf_trainer** out) {
  if (!algorithm || !out) return bad_argument("null argument");
  return guarded([&] {
    const rf::Algorithm algo = rf::parse_algorithm(algorithm);
    if (!rf::is_online(algo))
      throw rf::ArgumentError(std::string(algorithm) + " is not an online learner");
    const rf_online_params p = params ? *params : rf_online_params_default();
    rf::OnlineParams op;
    op.eta = p.eta;
    op.hidden = p.hidden;
    op.clip_threshold = p.clip_threshold;
    op.sigma_init = p.sigma_init;
    op.eta_a = p.eta_a;
    auto t = std::make_unique<rf_trainer>();
    t->forecaster = rf::make_online_forecaster(algo, static_cast<Eigen::Index>(inputs),
                                               static_cast<Eigen::Index>(outputs), op, seed);
    t->inputs = inputs;
    t->outputs = outputs;
    *out = t.release();
    return RF_OK;
  });
}

rf_status rf_trainer_step(rf_trainer* trainer, const double* input, const double* target,
                          double* prediction) {
  if (!trainer || !input || !target || !prediction) return bad_argument("null argument");
  return guarded([&] {
    rf::WindowedExample ex;
    ex.step = trainer->steps;
    ex.input = Eigen::Map<const Eigen::VectorXd>(input, static_cast<Eigen::Index>(trainer->inputs));
    ex.target =
        Eigen::Map<const Eigen::VectorXd>(target, static_cast<Eigen::Index>(trainer->outputs));
    const Eigen::VectorXd y = trainer->forecaster->step(ex);
    Eigen::Map<Eigen::VectorXd>(prediction, y.size()) = y;
    ++trainer->steps;
    return RF_OK;
  });
}

void rf_trainer_free(rf_trainer* trainer) { delete trainer; }

rf_status rf_run_one(const rf_sequence* seq, const char* options_json, char** result_json) {
  if (!seq || !options_json || !result_json) return bad_argument("null argument");
  return guarded([&] {
    json opt = json::parse(options_json);
    // Reuse the config validator for preset, overrides and seed.
    json cfg_json = json::object();
    for (const char* k : {"preset", "overrides", "seed", "gamma", "workers"})
      if (opt.contains(k)) cfg_json[k] = opt[k];
    const rf::ExperimentConfig cfg = rf::parse_config(cfg_json.dump());

    if (!opt.contains("algorithm")) throw rf::ConfigError("run-one: algorithm is required");
    if (!opt.contains("horizon")) throw rf::ConfigError("run-one: horizon is required");
    const rf::Algorithm algo = rf::parse_algorithm(opt["algorithm"].get<std::string>());
    const double horizon = opt["horizon"].get<double>();
    const double rate = rf::canonical_rate(opt.value("frequency", seq->seq.sample_rate_hz));
    const std::string name = opt.value("sequence", std::string("input"));
    const std::size_t workers = rf::resolve_workers(cfg.workers);
    rf::horizon_steps(horizon, rate);

    const rf::MarkerSequence data =
        rf::resample(seq->seq, rate, cfg.gamma, rf::resample_seed(cfg.seed, name, rate));
    const std::uint64_t cell = rf::derive_seed(
        cfg.seed, {rf::hash_name(name), rf::hash_name(rf::to_string(algo)),
                   static_cast<std::uint64_t>(std::llround(rate * 1000.0)),
                   static_cast<std::uint64_t>(std::llround(horizon * rate))});

    json result;
    rf::HyperParams params;
    if (opt.contains("params")) {
      const json& p = opt["params"];
      params.eta = p.value("eta", 0.0);
      params.shl_seconds = p.value("shl_seconds", 0.0);
      params.hidden = p.value("hidden", Eigen::Index{0});
      params.svr_sqrt2_sigma = p.value("svr_sqrt2_sigma", 0.0);
      params.svr_epsilon = p.value("svr_epsilon", 0.0);
      params.svr_c = p.value("svr_c", 0.0);
      result["cv_rmse"] = nullptr;
    } else {
      const rf::CvOutcome cv = rf::cross_validate(data, algo, cfg.grid, horizon, cell, workers);
      params = cv.best;
      result["cv_rmse"] = cv.cv_rmse;
    }
    const rf::Evaluation ev = rf::evaluate(data, algo, params, horizon, cfg.grid.fixed,
                                           rf::derive_seed(cell, {1}), workers);
    if (opt.contains("predictions_path"))
      rf::write_predictions_csv(ev.first_run, data, opt["predictions_path"].get<std::string>());

    result["sequence"] = name;
    result["algorithm"] = rf::to_string(algo);
    result["frequency_hz"] = rate;
    result["horizon_s"] = horizon;
    result["params"] = params_json(params);
    result["metrics"] = report_json(ev.report);
    *result_json = dup_string(result.dump(2));
    return RF_OK;
  });
}

rf_status rf_sweep(const char* config_json, const char* base_dir, rf_progress_fn progress,
                   void* user, char** report_json) {
  if (!config_json || !report_json) return bad_argument("null argument");
  return guarded([&] {
    const rf::ExperimentConfig cfg =
        rf::parse_config(config_json, base_dir ? fs::path(base_dir) : fs::path());
    std::string problems;
    if (cfg.datasets.empty()) problems += "\n  - datasets: at least one is required";
    if (cfg.algorithms.empty()) problems += "\n  - algorithms: at least one is required";
    if (!problems.empty()) throw rf::ConfigError("invalid configuration:" + problems);
    const auto sequences = load_datasets(cfg);
    ensure_writable(cfg.output_dir);

    rf::SweepSpec spec;
    spec.rates_hz = cfg.frequencies;
    spec.horizons = cfg.horizons;
    spec.algorithms = cfg.algorithms;
    spec.gamma = cfg.gamma;
    spec.seed = cfg.seed;
    spec.workers = rf::resolve_workers(cfg.workers);
    rf::ProgressFn fn;
    if (progress) {
      fn = [&](const rf::ResultRow& r) {
        std::ostringstream os;
        os << r.sequence << ' ' << rf::to_string(r.algorithm) << ' ' << rate_tag(r.rate_hz)
           << " Hz h=" << r.horizon_s << " s: ";
        if (r.ok())
          os << "rmse " << r.report.rmse.mean << " nrmse " << r.report.nrmse.mean;
        else
          os << "FAILED " << r.error;
        progress(os.str().c_str(), user);
      };
    }
    const auto rows = rf::sweep(sequences, spec, cfg.grid, fn);
    rf::write_results_csv(rows, cfg.output_dir / "results.csv");
    rf::write_summary_csv(rows, cfg.output_dir / "summary.csv");
    rf::write_marginals_csv(rows, cfg.output_dir / "marginals.csv");
    rf::write_long_csv(rows, cfg.output_dir / "long.csv");

    json report;
    report["cells"] = rows.size();
    report["output_dir"] = cfg.output_dir.string();
    json failed = json::array();
    for (const auto& r : rows) {
      if (r.ok()) continue;
      failed.push_back({{"sequence", r.sequence},
                        {"algorithm", rf::to_string(r.algorithm)},
                        {"frequency_hz", r.rate_hz},
                        {"horizon_s", r.horizon_s},
                        {"error", r.error}});
    }
    report["failed"] = failed;
    *report_json = dup_string(report.dump(2));
    if (!failed.empty()) {
      g_last_error = std::to_string(failed.size()) + " of " + std::to_string(rows.size()) +
                     " cells failed";
      return RF_ERR_PARTIAL;
    }
    return RF_OK;
  });
}

rf_status rf_profile(const char* config_json, char** report_json) {
  if (!config_json || !report_json) return bad_argument("null argument");
  return guarded([&] {
    const rf::ExperimentConfig cfg = rf::parse_config(config_json);
    if (cfg.algorithms.empty())
      throw rf::ConfigError("invalid configuration:\n  - algorithms: at least one is required");
    ensure_writable(cfg.output_dir);
    std::vector<rf::ProfileCell> cells;
    for (rf::Algorithm algo : cfg.algorithms) {
      const auto& qs = algo == rf::Algorithm::kRtrl ? cfg.grid.hidden_rtrl : cfg.profile.hidden;
      for (double f : cfg.frequencies) {
        auto part = rf::time_profile(algo, qs, cfg.profile.shl_seconds, f, cfg.profile.steps,
                                     cfg.seed);
        cells.insert(cells.end(), part.begin(), part.end());
      }
    }
    rf::write_profile_csv(cells, cfg.output_dir / "profile.csv");
    rf::write_profile_table_csv(cells, cfg.output_dir / "profile_table.csv");
    json report;
    report["cells"] = cells.size();
    report["output_dir"] = cfg.output_dir.string();
    *report_json = dup_string(report.dump(2));
    return RF_OK;
  });
}

rf_status rf_export(const char* results_csv, const char* out_dir) {
  if (!results_csv || !out_dir) return bad_argument("null argument");
  return guarded([&] {
    const auto rows = rf::read_results_csv(results_csv);
    ensure_writable(out_dir);
    const fs::path dir(out_dir);
    rf::write_long_csv(rows, dir / "long.csv");
    rf::write_summary_csv(rows, dir / "summary.csv");
    rf::write_marginals_csv(rows, dir / "marginals.csv");
    return RF_OK;
  });
}

}  // extern "C"
