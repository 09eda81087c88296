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
#include "rnnforecast/config.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <type_traits>

#include "rnnforecast/error.hpp"

namespace rnnforecast {

namespace {

using nlohmann::json;

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

class Checker {
 public:
  void fail(std::string msg) { problems_.push_back(std::move(msg)); }

  template <class T>
  bool get(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return false;
    if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (!obj.at(key).is_number_unsigned()) {
        fail(where + key + ": must be a non-negative integer");
        return false;
      }
    }
    try {
      out = obj.at(key).get<T>();
      return true;
    } catch (const json::exception&) {
      fail(where + key + ": wrong type");
      return false;
    }
  }

  void positive(const std::vector<double>& v, const std::string& name) {
    if (v.empty()) fail(name + ": must not be empty");
    for (double x : v)
      if (!(x > 0.0)) fail(name + ": values must be positive");
  }

  void finish() const {
    if (problems_.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& p : problems_) msg += "\n  - " + p;
    throw ConfigError(msg);
  }

 private:
  std::vector<std::string> problems_;
};

}  // namespace

GridSpec preset_grid(std::string_view name) {
  if (name == "paper") return GridSpec::paper();
  if (name == "desk") return GridSpec::desk();
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected paper or desk)");
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split_list(text)) {
    const std::string s(item);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw ArgumentError("not a number: '" + s + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<Algorithm> parse_algorithm_list(std::string_view text) {
  std::vector<Algorithm> out;
  for (auto item : split_list(text)) out.push_back(parse_algorithm(item));
  return out;
}

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");

  Checker check;
  ExperimentConfig cfg;

  if (check.get(root, "preset", cfg.preset, "")) {
    try {
      cfg.grid = preset_grid(cfg.preset);
    } catch (const ConfigError& e) {
      check.fail(e.what());
    }
  }

  if (root.contains("datasets")) {
    const json& ds = root["datasets"];
    if (!ds.is_array()) {
      check.fail("datasets: must be an array");
    } else {
      for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::string where = "datasets[" + std::to_string(i) + "].";
        if (!ds[i].is_object()) {
          check.fail(where + ": must be an object");
          continue;
        }
        DatasetEntry e;
        std::string path, label = "regular";
        if (!check.get(ds[i], "path", path, where)) check.fail(where + "path: required");
        e.path = path;
        if (e.path.is_relative() && !base_dir.empty()) e.path = base_dir / e.path;
        if (!check.get(ds[i], "name", e.name, where)) e.name = e.path.stem().string();
        check.get(ds[i], "label", label, where);
        try {
          e.label = parse_regularity(label);
        } catch (const Error& err) {
          check.fail(where + "label: " + err.what());
        }
        cfg.datasets.push_back(std::move(e));
      }
    }
  }

  std::vector<std::string> algos;
  if (check.get(root, "algorithms", algos, "")) {
    for (const auto& a : algos) {
      try {
        cfg.algorithms.push_back(parse_algorithm(a));
      } catch (const Error& err) {
        check.fail(std::string("algorithms: ") + err.what());
      }
    }
  }

  if (check.get(root, "frequencies", cfg.frequencies, "")) {
    check.positive(cfg.frequencies, "frequencies");
    for (double& f : cfg.frequencies) f = canonical_rate(f);
  }
  if (check.get(root, "horizons", cfg.horizons, "") && !cfg.horizons.empty())
    check.positive(cfg.horizons, "horizons");
  check.get(root, "seed", cfg.seed, "");
  if (check.get(root, "gamma", cfg.gamma, "") && !(cfg.gamma >= 0.0))
    check.fail("gamma: must be non-negative");
  std::string out_dir;
  if (check.get(root, "output_dir", out_dir, "")) cfg.output_dir = out_dir;
  check.get(root, "workers", cfg.workers, "");
  if (check.get(root, "n_markers", cfg.n_markers, "") && cfg.n_markers == 0)
    check.fail("n_markers: must be at least 1");

  if (root.contains("overrides")) {
    const json& o = root["overrides"];
    const std::string w = "overrides.";
    if (!o.is_object()) {
      check.fail("overrides: must be an object");
    } else {
      GridSpec& g = cfg.grid;
      if (check.get(o, "eta", g.eta, w)) check.positive(g.eta, "overrides.eta");
      if (check.get(o, "shl_seconds", g.shl_seconds, w))
        check.positive(g.shl_seconds, "overrides.shl_seconds");
      auto positive_int = [&](const char* key, std::vector<Eigen::Index>& v) {
        if (!check.get(o, key, v, w)) return;
        if (v.empty()) check.fail(w + key + ": must not be empty");
        for (auto q : v)
          if (q < 1) check.fail(w + key + ": values must be at least 1");
      };
      positive_int("hidden", g.hidden);
      positive_int("hidden_rtrl", g.hidden_rtrl);
      if (check.get(o, "svr_sqrt2_sigma", g.svr_sqrt2_sigma, w))
        check.positive(g.svr_sqrt2_sigma, "overrides.svr_sqrt2_sigma");
      if (check.get(o, "svr_epsilon", g.svr_epsilon, w))
        check.positive(g.svr_epsilon, "overrides.svr_epsilon");
      if (check.get(o, "svr_c", g.svr_c, w)) check.positive(g.svr_c, "overrides.svr_c");
      std::vector<double> lms;
      if (check.get(o, "lms_eta", lms, w)) {
        check.positive(lms, "overrides.lms_eta");
        for (auto& [rate, etas] : g.lms_eta) etas = lms;
      }
      if (check.get(o, "n_cv", g.fixed.n_cv, w) && g.fixed.n_cv == 0)
        check.fail("overrides.n_cv: must be at least 1");
      if (check.get(o, "n_test", g.fixed.n_test, w) && g.fixed.n_test == 0)
        check.fail("overrides.n_test: must be at least 1");
      if (check.get(o, "clip_threshold", g.fixed.clip_threshold, w) &&
          !(g.fixed.clip_threshold > 0.0))
        check.fail("overrides.clip_threshold: must be positive");
      if (check.get(o, "sigma_init", g.fixed.sigma_init, w) && !(g.fixed.sigma_init > 0.0))
        check.fail("overrides.sigma_init: must be positive");
      if (check.get(o, "eta_a", g.fixed.eta_a, w) && !(g.fixed.eta_a > 0.0))
        check.fail("overrides.eta_a: must be positive");
    }
  }

  if (root.contains("profile")) {
    const json& p = root["profile"];
    if (!p.is_object()) {
      check.fail("profile: must be an object");
    } else {
      check.get(p, "hidden", cfg.profile.hidden, "profile.");
      if (check.get(p, "shl_seconds", cfg.profile.shl_seconds, "profile."))
        check.positive(cfg.profile.shl_seconds, "profile.shl_seconds");
      check.get(p, "steps", cfg.profile.steps, "profile.");
    }
  }

  for (auto it = root.begin(); it != root.end(); ++it) {
    static const char* known[] = {"preset", "datasets", "algorithms", "frequencies", "horizons",
                                  "seed", "gamma", "output_dir", "workers", "n_markers",
                                  "overrides", "profile"};
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
      check.fail("unknown key '" + it.key() + "'");
  }

  check.finish();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace rnnforecast
