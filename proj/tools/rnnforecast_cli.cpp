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
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rnnforecast/rnnforecast.h"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;

int exit_code(rf_status s) {
  switch (s) {
    case RF_OK: return kExitOk;
    case RF_ERR_ARGUMENT:
    case RF_ERR_PARSE:
    case RF_ERR_IO:
    case RF_ERR_CONFIG: return kExitInput;
    default: return kExitFailure;
  }
}

int report_error(const char* what, rf_status s) {
  std::cerr << "rnnforecast " << what << ": " << rf_last_error() << '\n';
  return exit_code(s);
}

// Flags shared by the experiment commands. Unset values leave the config
// file untouched.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string preset;
  std::string algos;
  std::string freqs;
  std::string horizons;
  std::string out;
  std::optional<std::size_t> workers;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "experiment config (JSON)")
        ->envname("RNNFORECAST_CONFIG")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "master seed")->envname("RNNFORECAST_SEED");
    cmd->add_option("--preset", preset, "grid preset")
        ->envname("RNNFORECAST_PRESET")
        ->check(CLI::IsMember({"paper", "desk"}));
    cmd->add_option("--algos", algos, "comma-separated algorithms")->envname("RNNFORECAST_ALGOS");
    cmd->add_option("--freqs", freqs, "comma-separated rates in Hz")->envname("RNNFORECAST_FREQS");
    cmd->add_option("--horizons", horizons, "comma-separated horizons in s")
        ->envname("RNNFORECAST_HORIZONS");
    cmd->add_option("--out", out, "output directory")->envname("RNNFORECAST_OUT");
    cmd->add_option("--workers", workers, "worker threads (0: all cores)")
        ->envname("RNNFORECAST_WORKERS");
  }

  json load() const {
    json cfg = json::object();
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw std::runtime_error("cannot open config " + config);
      cfg = json::parse(in);
    }
    if (seed) cfg["seed"] = *seed;
    if (!preset.empty()) cfg["preset"] = preset;
    if (!algos.empty()) cfg["algorithms"] = split(algos);
    if (!freqs.empty()) cfg["frequencies"] = numbers(freqs, "--freqs");
    if (!horizons.empty()) cfg["horizons"] = numbers(horizons, "--horizons");
    if (!out.empty()) cfg["output_dir"] = out;
    if (workers) cfg["workers"] = *workers;
    return cfg;
  }

  std::string base_dir() const {
    return config.empty() ? std::string() : fs::absolute(config).parent_path().string();
  }

  static std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
    return out;
  }

  static std::vector<double> numbers(const std::string& text, const char* flag) {
    std::vector<double> out;
    for (const auto& s : split(text)) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != s.size()) throw CLI::ValidationError(flag, "not a number: " + s);
      out.push_back(v);
    }
    return out;
  }
};

void print_metrics(const json& r) {
  const auto& m = r["metrics"];
  std::printf("%s  %s  %.4g Hz  h = %.3g s  (%d runs)\n", r["sequence"].get<std::string>().c_str(),
              r["algorithm"].get<std::string>().c_str(), r["frequency_hz"].get<double>(),
              r["horizon_s"].get<double>(), m["n_runs"].get<int>());
  std::printf("  %-10s %12s %12s\n", "metric", "mean", "ci95");
  for (const char* k : {"mae", "rmse", "nrmse", "max_error", "jitter"})
    std::printf("  %-10s %12.6g %12.6g\n", k, m[k]["mean"].get<double>(),
                m[k]["ci95"].get<double>());
}

int cmd_resample(const std::vector<std::string>& inputs, const std::string& out,
                 const std::string& freqs, double gamma, std::uint64_t seed, std::size_t markers) {
  const auto rates = CommonFlags::numbers(freqs, "--freqs");
  for (const auto& in : inputs) {
    const rf_status s =
        rf_resample_file(in.c_str(), out.c_str(), rates.data(), rates.size(), gamma, seed, markers);
    if (s != RF_OK) return report_error("resample", s);
    std::printf("%s -> %zu rate(s) in %s\n", in.c_str(), rates.size(), out.c_str());
  }
  return kExitOk;
}

struct RunOneFlags {
  std::string input;
  std::string sequence_name;
  std::size_t markers = 3;
  std::optional<double> eta, shl, svr_sigma, svr_epsilon, svr_c;
  std::optional<long long> hidden;
};

int cmd_run_one(const CommonFlags& flags, const RunOneFlags& ro) {
  json cfg = flags.load();
  json opt = json::object();
  for (const char* k : {"preset", "overrides", "seed", "gamma", "workers"})
    if (cfg.contains(k)) opt[k] = cfg[k];

  std::vector<std::string> problems;
  std::string input = ro.input;
  std::string name = ro.sequence_name;
  if (input.empty() && cfg.contains("datasets") && cfg["datasets"].is_array() &&
      !cfg["datasets"].empty()) {
    const json& d = cfg["datasets"][0];
    input = d.value("path", std::string());
    if (!input.empty() && fs::path(input).is_relative() && !flags.base_dir().empty())
      input = (fs::path(flags.base_dir()) / input).string();
    if (name.empty()) name = d.value("name", std::string());
  }
  if (input.empty()) problems.push_back("an input sequence is required (--input or datasets)");
  else if (!fs::is_regular_file(input)) problems.push_back("input not found: " + input);
  if (name.empty() && !input.empty()) name = fs::path(input).stem().string();

  auto single = [&](const char* key, const char* flag) -> std::optional<json> {
    if (!cfg.contains(key) || !cfg[key].is_array() || cfg[key].size() != 1) {
      problems.push_back(std::string(flag) + ": exactly one value is required");
      return std::nullopt;
    }
    return cfg[key][0];
  };
  const auto algo = single("algorithms", "--algos");
  const auto freq = single("frequencies", "--freqs");
  const auto horizon = single("horizons", "--horizons");
  const std::string out = cfg.value("output_dir", std::string("results"));
  if (!problems.empty()) {
    std::cerr << "rnnforecast run-one: invalid arguments:\n";
    for (const auto& p : problems) std::cerr << "  - " << p << '\n';
    return kExitInput;
  }
  opt["algorithm"] = *algo;
  opt["frequency"] = *freq;
  opt["horizon"] = *horizon;
  opt["sequence"] = name;
  opt["predictions_path"] = (fs::path(out) / "run_one_predictions.csv").string();
  if (ro.eta || ro.shl || ro.hidden || ro.svr_sigma || ro.svr_epsilon || ro.svr_c) {
    opt["params"] = {{"eta", ro.eta.value_or(0.0)},
                     {"shl_seconds", ro.shl.value_or(0.0)},
                     {"hidden", ro.hidden.value_or(0)},
                     {"svr_sqrt2_sigma", ro.svr_sigma.value_or(0.0)},
                     {"svr_epsilon", ro.svr_epsilon.value_or(0.0)},
                     {"svr_c", ro.svr_c.value_or(0.0)}};
  }

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    std::cerr << "rnnforecast run-one: cannot create " << out << ": " << ec.message() << '\n';
    return kExitInput;
  }

  rf_sequence* seq = nullptr;
  rf_status s = rf_sequence_load(input.c_str(), ro.markers, RF_LABEL_REGULAR, &seq);
  if (s != RF_OK) return report_error("run-one", s);
  char* result = nullptr;
  s = rf_run_one(seq, opt.dump().c_str(), &result);
  rf_sequence_free(seq);
  if (s != RF_OK) return report_error("run-one", s);
  const json r = json::parse(result);
  rf_string_free(result);

  print_metrics(r);
  std::ofstream js(fs::path(out) / "run_one.json");
  js << r.dump(2) << '\n';
  std::ofstream row(fs::path(out) / "run_one.csv");
  row << "sequence,algorithm,frequency_hz,horizon_s,mae,rmse,nrmse,max_error,jitter\n";
  row << r["sequence"].get<std::string>() << ',' << r["algorithm"].get<std::string>() << ','
      << r["frequency_hz"].get<double>() << ',' << r["horizon_s"].get<double>();
  for (const char* k : {"mae", "rmse", "nrmse", "max_error", "jitter"})
    row << ',' << r["metrics"][k]["mean"].get<double>();
  row << '\n';
  if (!js || !row) {
    std::cerr << "rnnforecast run-one: cannot write results to " << out << '\n';
    return kExitInput;
  }
  return kExitOk;
}

void print_progress(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

int cmd_sweep(const CommonFlags& flags, bool quiet) {
  const json cfg = flags.load();
  char* report = nullptr;
  const std::string base = flags.base_dir();
  const rf_status s = rf_sweep(cfg.dump().c_str(), base.empty() ? nullptr : base.c_str(),
                               quiet ? nullptr : print_progress, nullptr, &report);
  if (s != RF_OK && s != RF_ERR_PARTIAL) return report_error("sweep", s);
  const json r = json::parse(report);
  rf_string_free(report);
  std::printf("%zu cell(s) written to %s\n", r["cells"].get<std::size_t>(),
              r["output_dir"].get<std::string>().c_str());
  if (s == RF_ERR_PARTIAL) {
    std::fprintf(stderr, "%zu cell(s) failed:\n", r["failed"].size());
    for (const auto& f : r["failed"])
      std::fprintf(stderr, "  %s %s %.4g Hz h=%.3g s: %s\n",
                   f["sequence"].get<std::string>().c_str(),
                   f["algorithm"].get<std::string>().c_str(), f["frequency_hz"].get<double>(),
                   f["horizon_s"].get<double>(), f["error"].get<std::string>().c_str());
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_profile(const CommonFlags& flags, const std::string& hidden, const std::string& shl,
                std::optional<std::size_t> steps) {
  json cfg = flags.load();
  if (!hidden.empty()) {
    std::vector<long long> q;
    for (double v : CommonFlags::numbers(hidden, "--hidden")) q.push_back(static_cast<long long>(v));
    cfg["profile"]["hidden"] = q;
    cfg["overrides"]["hidden_rtrl"] = q;
  }
  if (!shl.empty()) cfg["profile"]["shl_seconds"] = CommonFlags::numbers(shl, "--shl");
  if (steps) cfg["profile"]["steps"] = *steps;
  char* report = nullptr;
  const rf_status s = rf_profile(cfg.dump().c_str(), &report);
  if (s != RF_OK) return report_error("profile", s);
  const json r = json::parse(report);
  rf_string_free(report);
  std::printf("%zu profile cell(s) written to %s\n", r["cells"].get<std::size_t>(),
              r["output_dir"].get<std::string>().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online RNN forecasting of respiratory marker motion"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rf_version());

  auto* resample = app.add_subcommand("resample", "resample marker files to new rates");
  std::vector<std::string> rs_inputs;
  std::string rs_out = "resampled", rs_freqs = "3.33,10,30";
  double rs_gamma = -1.0;
  std::uint64_t rs_seed = 0;
  std::size_t rs_markers = 3;
  resample->add_option("inputs", rs_inputs, "marker files")->required()->check(CLI::ExistingFile);
  resample->add_option("--out", rs_out, "output directory")->envname("RNNFORECAST_OUT");
  resample->add_option("--freqs", rs_freqs, "comma-separated rates in Hz")
      ->envname("RNNFORECAST_FREQS");
  resample->add_option("--gamma", rs_gamma, "noise level as a fraction of the range")
      ->check(CLI::NonNegativeNumber);
  resample->add_option("--seed", rs_seed, "master seed")->envname("RNNFORECAST_SEED");
  resample->add_option("--markers", rs_markers, "markers per file")->check(CLI::PositiveNumber);

  auto* run_one = app.add_subcommand("run-one", "evaluate one sequence, algorithm, rate and horizon");
  CommonFlags ro_flags;
  ro_flags.attach(run_one);
  RunOneFlags ro;
  run_one->add_option("--input", ro.input, "marker file (defaults to the first dataset)");
  run_one->add_option("--name", ro.sequence_name, "sequence name used for seeding");
  run_one->add_option("--markers", ro.markers, "markers per file")->check(CLI::PositiveNumber);
  run_one->add_option("--eta", ro.eta, "fixed learning rate (skips cross-validation)");
  run_one->add_option("--shl", ro.shl, "fixed signal history length in s");
  run_one->add_option("--hidden", ro.hidden, "fixed hidden size");
  run_one->add_option("--svr-sigma", ro.svr_sigma, "fixed SVR sqrt(2) sigma");
  run_one->add_option("--svr-epsilon", ro.svr_epsilon, "fixed SVR epsilon");
  run_one->add_option("--svr-c", ro.svr_c, "fixed SVR C");

  auto* sweep = app.add_subcommand("sweep", "cross-validate and evaluate a grid of cells");
  CommonFlags sw_flags;
  sw_flags.attach(sweep);
  bool sw_quiet = false;
  sweep->add_flag("--quiet", sw_quiet, "no per-cell progress");

  auto* profile = app.add_subcommand("profile", "time per-step cost on a synthetic signal");
  CommonFlags pf_flags;
  pf_flags.attach(profile);
  std::string pf_hidden, pf_shl;
  std::optional<std::size_t> pf_steps;
  profile->add_option("--hidden", pf_hidden, "comma-separated hidden sizes");
  profile->add_option("--shl", pf_shl, "comma-separated history lengths in s");
  profile->add_option("--steps", pf_steps, "timed steps per cell");

  auto* exp = app.add_subcommand("export", "rebuild tidy tables from results.csv");
  std::string ex_results, ex_out = "export";
  exp->add_option("results", ex_results, "results.csv from a sweep")
      ->required()
      ->check(CLI::ExistingFile);
  exp->add_option("--out", ex_out, "output directory")->envname("RNNFORECAST_OUT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (resample->parsed())
      return cmd_resample(rs_inputs, rs_out, rs_freqs, rs_gamma, rs_seed, rs_markers);
    if (run_one->parsed()) return cmd_run_one(ro_flags, ro);
    if (sweep->parsed()) return cmd_sweep(sw_flags, sw_quiet);
    if (profile->parsed()) return cmd_profile(pf_flags, pf_hidden, pf_shl, pf_steps);
    if (exp->parsed()) {
      const rf_status s = rf_export(ex_results.c_str(), ex_out.c_str());
      if (s != RF_OK) return report_error("export", s);
      std::printf("tables written to %s\n", ex_out.c_str());
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "rnnforecast: " << e.what() << '\n';
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << "rnnforecast: bad config: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "rnnforecast: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitFailure;
}
