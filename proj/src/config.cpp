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

#include "scengen/config.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scengen/error.hpp"

namespace scengen {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view method_name(SearchMethod m) { return m == SearchMethod::Genetic ? "ga" : "random"; }

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& section) {
  if (!obj.is_object()) throw ConfigError(section + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + section);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& section) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(section + "." + key + " has the wrong type");
  }
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

LlmMode mode_from(const std::string& s) {
  if (s == "replay") return LlmMode::Replay;
  if (s == "record") return LlmMode::Record;
  if (s == "live") return LlmMode::Live;
  throw ConfigError("llm.mode must be replay, record or live");
}

std::string mode_name(LlmMode m) {
  switch (m) {
    case LlmMode::Replay: return "replay";
    case LlmMode::Record: return "record";
    case LlmMode::Live: return "live";
  }
  return "replay";
}

}  // namespace

void PipelineConfig::validate(bool check_files) const {
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (jobs < 0) throw ConfigError("jobs must be non-negative (0 = all cores)");
  if (llm_max_retries < 1) throw ConfigError("llm.max_retries must be at least 1");
  if (llm.max_tokens < 1) throw ConfigError("llm.max_tokens must be positive");
  if (!(llm.temperature >= 0.0 && llm.temperature <= 2.0)) throw ConfigError("llm.temperature must be in [0,2]");
  if (!(fitness.eta > 0.0)) throw ConfigError("fitness.eta must be positive");
  if (!(triage.window > 0.0)) throw ConfigError("triage.window must be positive");
  if (methods.empty()) throw ConfigError("campaign.methods must not be empty");
  sim.validate();
  search.validate();
  if (!check_files) return;
  auto must_exist = [](const std::string& p, const char* what) {
    if (!p.empty() && !fs::exists(p)) throw ConfigError(std::string(what) + " not found: " + p);
  };
  if (llm.mode != LlmMode::Live) must_exist(transcript_path, "transcript");
  must_exist(defaults_path, "default range table");
  must_exist(reports_dir, "reports directory");
  for (const auto& s : campaign_scenarios) must_exist(s, "scenario");
  for (const auto& r : campaign_reports) must_exist(r, "report");
}

PipelineConfig PipelineConfig::from_json(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"paths", "llm", "sim", "fitness", "search", "triage", "campaign", "seed", "jobs"}, "config");
  PipelineConfig c;

  if (auto it = j.find("paths"); it != j.end()) {
    const auto& p = *it;
    check_keys(p, {"reports", "transcript", "defaults", "out"}, "paths");
    read(p, "reports", c.reports_dir, "paths");
    read(p, "transcript", c.transcript_path, "paths");
    read(p, "defaults", c.defaults_path, "paths");
    read(p, "out", c.out_dir, "paths");
    c.reports_dir = resolve(base_dir, c.reports_dir);
    c.transcript_path = resolve(base_dir, c.transcript_path);
    c.defaults_path = resolve(base_dir, c.defaults_path);
    c.out_dir = resolve(base_dir, c.out_dir);
  }

  if (auto it = j.find("llm"); it != j.end()) {
    const auto& l = *it;
    check_keys(l, {"mode", "endpoint", "model", "max_tokens", "temperature", "max_retries", "api_key_env"}, "llm");
    std::string mode = mode_name(c.llm.mode);
    read(l, "mode", mode, "llm");
    c.llm.mode = mode_from(mode);
    read(l, "endpoint", c.llm.endpoint, "llm");
    read(l, "model", c.llm.model_name, "llm");
    read(l, "max_tokens", c.llm.max_tokens, "llm");
    read(l, "temperature", c.llm.temperature, "llm");
    read(l, "max_retries", c.llm_max_retries, "llm");
    read(l, "api_key_env", c.llm.api_key_env, "llm");
  }
  c.llm.transcript_path = c.transcript_path;

  if (auto it = j.find("sim"); it != j.end()) {
    const auto& s = *it;
    check_keys(s, {"horizon", "dt", "lane_width", "curve_radius", "collision_threshold", "action_duration",
                   "lane_change_time", "vehicle_length", "npc_accel", "npc_decel", "accel_max", "brake_max", "ego"},
               "sim");
    read(s, "horizon", c.sim.horizon, "sim");
    read(s, "dt", c.sim.dt, "sim");
    read(s, "lane_width", c.sim.lane_width, "sim");
    read(s, "curve_radius", c.sim.curve_radius, "sim");
    read(s, "collision_threshold", c.sim.collision_threshold, "sim");
    read(s, "action_duration", c.sim.physics.action_duration, "sim");
    read(s, "lane_change_time", c.sim.physics.lane_change_time, "sim");
    read(s, "vehicle_length", c.sim.physics.vehicle_length, "sim");
    read(s, "npc_accel", c.sim.physics.npc_accel, "sim");
    read(s, "npc_decel", c.sim.physics.npc_decel, "sim");
    read(s, "accel_max", c.sim.physics.accel_max, "sim");
    read(s, "brake_max", c.sim.physics.brake_max, "sim");
    if (auto e = s.find("ego"); e != s.end()) {
      check_keys(*e, {"desired_speed", "cruise_at_initial_speed", "safe_time_headway", "max_brake", "speed_gain",
                      "standstill_gap", "perception_lane_tolerance"},
                 "sim.ego");
      read(*e, "desired_speed", c.sim.ego.desired_speed, "sim.ego");
      read(*e, "cruise_at_initial_speed", c.sim.ego.cruise_at_initial_speed, "sim.ego");
      read(*e, "safe_time_headway", c.sim.ego.safe_time_headway, "sim.ego");
      read(*e, "max_brake", c.sim.ego.max_brake, "sim.ego");
      read(*e, "speed_gain", c.sim.ego.speed_gain, "sim.ego");
      read(*e, "standstill_gap", c.sim.ego.standstill_gap, "sim.ego");
      read(*e, "perception_lane_tolerance", c.sim.ego.perception_lane_tolerance, "sim.ego");
    }
  }
  c.search.collision_threshold = c.sim.collision_threshold;

  if (auto it = j.find("fitness"); it != j.end()) {
    check_keys(*it, {"eta", "archive_div"}, "fitness");
    read(*it, "eta", c.fitness.eta, "fitness");
    read(*it, "archive_div", c.fitness.archive_div, "fitness");
  }

  if (auto it = j.find("search"); it != j.end()) {
    const auto& s = *it;
    check_keys(s, {"p_max", "g_max", "crossover_rate", "mutation_rate", "eta_m", "tournament_size", "max_retries"},
               "search");
    if (auto p = s.find("p_max"); p != s.end()) {
      if (p->is_string() && p->get<std::string>() == "template_length") {
        c.search.p_max = 0;
      } else if (p->is_number_unsigned() && p->get<std::size_t>() >= 2) {
        c.search.p_max = p->get<std::size_t>();
      } else {
        throw ConfigError("search.p_max must be an integer >= 2 or \"template_length\"");
      }
    }
    read(s, "g_max", c.search.g_max, "search");
    read(s, "crossover_rate", c.search.crossover_rate, "search");
    read(s, "mutation_rate", c.search.mutation_rate, "search");
    read(s, "eta_m", c.search.eta_m, "search");
    read(s, "tournament_size", c.search.tournament_size, "search");
    read(s, "max_retries", c.search.max_retries, "search");
  }

  if (auto it = j.find("triage"); it != j.end()) {
    check_keys(*it, {"window", "rear_end_lane_tolerance"}, "triage");
    read(*it, "window", c.triage.window, "triage");
    read(*it, "rear_end_lane_tolerance", c.triage.rear_end_lane_tolerance, "triage");
  }

  if (auto it = j.find("campaign"); it != j.end()) {
    const auto& s = *it;
    check_keys(s, {"scenarios", "reports", "repetitions", "methods"}, "campaign");
    read(s, "scenarios", c.campaign_scenarios, "campaign");
    read(s, "reports", c.campaign_reports, "campaign");
    for (auto& p : c.campaign_scenarios) p = resolve(base_dir, p);
    for (auto& p : c.campaign_reports) p = resolve(base_dir, p);
    read(s, "repetitions", c.repetitions, "campaign");
    if (auto m = s.find("methods"); m != s.end()) {
      std::vector<std::string> names;
      read(s, "methods", names, "campaign");
      c.methods.clear();
      for (const auto& n : names) {
        if (n == "ga") {
          c.methods.push_back(SearchMethod::Genetic);
        } else if (n == "random") {
          c.methods.push_back(SearchMethod::Random);
        } else {
          throw ConfigError("campaign.methods: unknown method '" + n + "'");
        }
      }
    }
  }

  read(j, "seed", c.seed, "config");
  read(j, "jobs", c.jobs, "config");
  c.search.rng_seed = c.seed;
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), fs::path(path).parent_path().string());
}

std::string PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["paths"] = {{"reports", reports_dir}, {"transcript", transcript_path}, {"defaults", defaults_path}, {"out", out_dir}};
  j["llm"] = {{"mode", mode_name(llm.mode)},          {"endpoint", llm.endpoint},
              {"model", llm.model_name},              {"max_tokens", llm.max_tokens},
              {"temperature", llm.temperature},       {"max_retries", llm_max_retries},
              {"api_key_env", llm.api_key_env}};
  nlohmann::ordered_json ego = {{"desired_speed", sim.ego.desired_speed},
                                {"cruise_at_initial_speed", sim.ego.cruise_at_initial_speed},
                                {"safe_time_headway", sim.ego.safe_time_headway},
                                {"max_brake", sim.ego.max_brake},
                                {"speed_gain", sim.ego.speed_gain},
                                {"standstill_gap", sim.ego.standstill_gap},
                                {"perception_lane_tolerance", sim.ego.perception_lane_tolerance}};
  j["sim"] = {{"horizon", sim.horizon},
              {"dt", sim.dt},
              {"lane_width", sim.lane_width},
              {"curve_radius", sim.curve_radius},
              {"collision_threshold", sim.collision_threshold},
              {"action_duration", sim.physics.action_duration},
              {"lane_change_time", sim.physics.lane_change_time},
              {"vehicle_length", sim.physics.vehicle_length},
              {"npc_accel", sim.physics.npc_accel},
              {"npc_decel", sim.physics.npc_decel},
              {"accel_max", sim.physics.accel_max},
              {"brake_max", sim.physics.brake_max},
              {"ego", ego}};
  j["fitness"] = {{"eta", fitness.eta}, {"archive_div", fitness.archive_div}};
  nlohmann::ordered_json search_j;
  if (search.p_max == 0) {
    search_j["p_max"] = "template_length";
  } else {
    search_j["p_max"] = search.p_max;
  }
  search_j["g_max"] = search.g_max;
  search_j["crossover_rate"] = search.crossover_rate;
  search_j["mutation_rate"] = search.mutation_rate;
  search_j["eta_m"] = search.eta_m;
  search_j["tournament_size"] = search.tournament_size;
  search_j["max_retries"] = search.max_retries;
  j["search"] = search_j;
  j["triage"] = {{"window", triage.window}, {"rear_end_lane_tolerance", triage.rear_end_lane_tolerance}};
  std::vector<std::string> method_names;
  for (auto m : methods) method_names.emplace_back(method_name(m));
  j["campaign"] = {{"scenarios", campaign_scenarios},
                   {"reports", campaign_reports},
                   {"repetitions", repetitions},
                   {"methods", method_names}};
  j["seed"] = seed;
  j["jobs"] = jobs;
  return j.dump(2);
}

}  // namespace scengen
