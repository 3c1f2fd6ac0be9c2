// Copyright 2026 The scengen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Pipeline configuration. One JSON document, every section optional:
//
//   {
//     "paths":    {"reports": dir, "transcript": file, "defaults": file, "out": dir},
//     "llm":      {"mode": "replay"|"record"|"live", "endpoint", "model",
//                  "max_tokens", "temperature", "max_retries", "api_key_env"},
//     "sim":      {"horizon", "dt", "lane_width", "curve_radius",
//                  "collision_threshold", "action_duration", "lane_change_time",
//                  "vehicle_length", "npc_accel", "npc_decel", "accel_max",
//                  "brake_max", "ego": {"desired_speed", "cruise_at_initial_speed",
//                  "safe_time_headway", "max_brake", "speed_gain",
//                  "standstill_gap", "perception_lane_tolerance"}},
//     "fitness":  {"eta", "archive_div"},
//     "search":   {"p_max": n|"template_length", "g_max", "crossover_rate",
//                  "mutation_rate", "eta_m", "tournament_size", "max_retries"},
//     "triage":   {"window", "rear_end_lane_tolerance"},
//     "campaign": {"scenarios": [files], "reports": [files], "repetitions",
//                  "methods": ["ga", "random"]},
//     "seed": n, "jobs": n
//   }
//
// Relative paths are resolved against the directory of the config file.
// Unknown keys are rejected so that typos do not silently fall back to
// defaults.

#ifndef SCENGEN_CONFIG_HPP_
#define SCENGEN_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "scengen/fitness.hpp"
#include "scengen/llm.hpp"
#include "scengen/microsim.hpp"
#include "scengen/search.hpp"
#include "scengen/triage.hpp"

namespace scengen {

enum class SearchMethod { Genetic, Random };
std::string_view method_name(SearchMethod m);

struct PipelineConfig {
  std::string reports_dir;
  std::string transcript_path;
  /// Empty means the built-in default range table.
  std::string defaults_path;
  std::string out_dir = "out";

  LlmClientConfig llm;
  int llm_max_retries = kDefaultMaxRetries;
  SimConfig sim;
  FitnessConfig fitness;
  SearchConfig search;
  TriageConfig triage;

  std::vector<std::string> campaign_scenarios;
  std::vector<std::string> campaign_reports;
  int repetitions = 5;
  std::vector<SearchMethod> methods{SearchMethod::Genetic};

  std::uint64_t seed = 1;
  int jobs = 1;

  /// Throws ConfigError. With `check_files`, referenced files must exist.
  void validate(bool check_files = false) const;

  static PipelineConfig from_json(const std::string& text, const std::string& base_dir = "");
  static PipelineConfig load(const std::string& path);
  std::string to_json() const;
};

}  // namespace scengen

#endif  // SCENGEN_CONFIG_HPP_
