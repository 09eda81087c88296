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
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rnnforecast/harness.hpp"

namespace rnnforecast {

struct DatasetEntry {
  std::string name;
  std::filesystem::path path;
  Regularity label = Regularity::kRegular;
};

struct ProfileSettings {
  std::vector<Eigen::Index> hidden = {30, 60, 90, 120, 150, 180};
  std::vector<double> shl_seconds = {1.2, 2.4, 3.6, 4.8, 6.0};
  std::size_t steps = 1000;
};

/// Experiment description read from JSON. Relative dataset paths resolve
/// against the config file's directory.
struct ExperimentConfig {
  std::vector<DatasetEntry> datasets;
  std::vector<Algorithm> algorithms;
  std::string preset = "paper";
  std::vector<double> frequencies = {10.0 / 3.0, 10.0, 30.0};
  std::vector<double> horizons;  // empty: defaults per rate
  std::uint64_t seed = 0;
  double gamma = kDefaultNoiseGamma;
  std::filesystem::path output_dir = "results";
  std::size_t workers = 0;  // 0: hardware concurrency
  std::size_t n_markers = 3;
  GridSpec grid = GridSpec::paper();
  ProfileSettings profile;
};

/// Parses and validates; every problem found is listed in one ConfigError.
ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Grid for a preset name ("paper" or "desk").
GridSpec preset_grid(std::string_view name);

/// Parses comma-separated lists such as "0.1,0.2" or "rtrl,uoro".
std::vector<double> parse_number_list(std::string_view text);
std::vector<Algorithm> parse_algorithm_list(std::string_view text);

}  // namespace rnnforecast
