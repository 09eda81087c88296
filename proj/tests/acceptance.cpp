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
// Prints one PASS/FAIL line per acceptance criterion.
//
//   acceptance [--tier desk|full]
//
// The full tier needs the public marker dataset: RNNFORECAST_DATA_DIR points
// at a directory holding either experiment.json (datasets with labels) or the
// sequence CSV files. Without it the full tier reports FAIL with the reason
// and exits with code 77 so ctest records it as skipped.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <string>

#include "criteria.hpp"
#include "rnnforecast/config.hpp"

namespace {

using namespace rnnforecast;
using criteria::Outcome;

int g_failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++g_failures;
  std::printf("%s  %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

int run_desk() {
  report("rtrl-exactness", [] { return criteria::rtrl_exactness(50); });
  report("snap1-equals-rtrl-single-unit", [] { return criteria::snap1_single_unit(200); });
  report("snap1-compressed-equals-sparse", [] { return criteria::snap1_sparse(200); });
  report("uoro-unbiased", [] { return criteria::uoro_unbiased(10, 20000); });
  report("dni-credit-gradient", [] { return criteria::dni_credit(50); });
  report("metrics-sanity", [] { return criteria::metrics_sanity(1000); });
  report("synthetic-learning", [] { return criteria::synthetic_learning(); });
  report("complexity-ordering", [] { return criteria::complexity(1000); });
  return g_failures == 0 ? 0 : 1;
}

std::vector<NamedSequence> load_full_data(const std::filesystem::path& dir) {
  std::vector<NamedSequence> out;
  const auto cfg_path = dir / "experiment.json";
  if (std::filesystem::exists(cfg_path)) {
    const ExperimentConfig cfg = load_config(cfg_path);
    for (const auto& d : cfg.datasets) {
      LoadOptions opt;
      opt.n_markers = cfg.n_markers;
      opt.label = d.label;
      out.push_back({d.name, load_sequence(d.path, opt)});
    }
    return out;
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.push_back({f.stem().string(), load_sequence(f)});
  return out;
}

struct CellMeans {
  double nrmse = 0.0, rmse = 0.0;
  std::size_t cells = 0, failed = 0;
};

CellMeans run_cells(const std::vector<NamedSequence>& data, Algorithm algo, double rate,
                    std::vector<double> horizons, const GridSpec& grid, std::size_t workers) {
  SweepSpec spec;
  spec.rates_hz = {rate};
  spec.horizons = std::move(horizons);
  spec.algorithms = {algo};
  spec.seed = 2024;
  spec.workers = workers;
  CellMeans m;
  for (const auto& row : sweep(data, spec, grid)) {
    if (!row.ok()) {
      ++m.failed;
      continue;
    }
    m.nrmse += row.report.nrmse.mean;
    m.rmse += row.report.rmse.mean;
    ++m.cells;
  }
  if (m.cells > 0) {
    m.nrmse /= static_cast<double>(m.cells);
    m.rmse /= static_cast<double>(m.cells);
  }
  return m;
}

std::string cell_note(const CellMeans& m) {
  return " over " + std::to_string(m.cells) + " cells" +
         (m.failed ? " (" + std::to_string(m.failed) + " failed)" : std::string());
}

int run_full() {
  const char* env = std::getenv("RNNFORECAST_DATA_DIR");
  const char* names[] = {"full-data-table3-nrmse", "full-data-linreg-10hz",
                         "full-data-dni-ablation"};
  if (!env || !*env || !std::filesystem::is_directory(env)) {
    for (const char* n : names)
      std::printf("FAIL  %s: not run, marker dataset unavailable (set RNNFORECAST_DATA_DIR)\n", n);
    return 77;
  }
  const auto data = load_full_data(env);
  const char* preset = std::getenv("RNNFORECAST_FULL_PRESET");
  const GridSpec grid = preset_grid(preset && *preset ? preset : "paper");
  const std::size_t workers = resolve_workers(0);
  const double third = 10.0 / 3.0;

  report(names[0], [&] {
    const auto s3 = run_cells(data, Algorithm::kSnap1, third, {}, grid, workers);
    const auto s10 = run_cells(data, Algorithm::kSnap1, 10.0, {}, grid, workers);
    const auto u30 = run_cells(data, Algorithm::kUoro, 30.0, {}, grid, workers);
    const bool pass = std::abs(s3.nrmse - 0.335) <= 0.03 && std::abs(s10.nrmse - 0.157) <= 0.02 &&
                      std::abs(u30.nrmse - 0.086) <= 0.015 && s3.failed + s10.failed + u30.failed == 0;
    return Outcome{pass, "snap1 3.33 Hz " + criteria::fmt(s3.nrmse) + cell_note(s3) +
                             ", snap1 10 Hz " + criteria::fmt(s10.nrmse) + cell_note(s10) +
                             ", uoro 30 Hz " + criteria::fmt(u30.nrmse) + cell_note(u30)};
  });
  report(names[1], [&] {
    const auto lr = run_cells(data, Algorithm::kLinearRegression, 10.0, {0.1}, grid, workers);
    const bool pass = std::abs(lr.nrmse - 0.098) <= 0.01 && std::abs(lr.rmse - 0.442) <= 0.05 &&
                      lr.failed == 0;
    return Outcome{pass, "nRMSE " + criteria::fmt(lr.nrmse) + ", RMSE " +
                             criteria::fmt(lr.rmse) + " mm" + cell_note(lr)};
  });
  report(names[2], [&] {
    bool pass = true;
    std::string detail;
    for (double rate : {third, 10.0}) {
      const auto full = run_cells(data, Algorithm::kDni, rate, {}, grid, workers);
      const auto simple = run_cells(data, Algorithm::kDniSimplified, rate, {}, grid, workers);
      pass = pass && full.rmse < simple.rmse && full.failed + simple.failed == 0;
      detail += criteria::fmt(rate) + " Hz full " + criteria::fmt(full.rmse) + " vs simplified " +
                criteria::fmt(simple.rmse) + " mm; ";
    }
    return Outcome{pass, detail};
  });
  return g_failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::string tier = "desk";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--tier" && i + 1 < argc) {
      tier = argv[++i];
    } else {
      std::fprintf(stderr, "usage: acceptance [--tier desk|full]\n");
      return 2;
    }
  }
  if (tier == "desk") return run_desk();
  if (tier == "full") return run_full();
  std::fprintf(stderr, "unknown tier '%s'\n", tier.c_str());
  return 2;
}
