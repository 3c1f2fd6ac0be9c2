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

#include "scengen/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scengen/error.hpp"
#include "text_util.hpp"

namespace scengen {

namespace fs = std::filesystem;

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InputError*>(&e) ||
      dynamic_cast<const ParseError*>(&e) || dynamic_cast<const MissingDefault*>(&e)) {
    return kExitUsage;
  }
  if (dynamic_cast<const RetryExhausted*>(&e) || dynamic_cast<const ReplayMiss*>(&e) ||
      dynamic_cast<const LlmTransportError*>(&e) || dynamic_cast<const EmptyReport*>(&e) ||
      dynamic_cast<const IllegalIps*>(&e) || dynamic_cast<const UnknownEgo*>(&e) ||
      dynamic_cast<const InvalidTestCase*>(&e) || dynamic_cast<const SamplingExhausted*>(&e) ||
      dynamic_cast<const NoNpc*>(&e)) {
    return kExitPipeline;
  }
  return kExitInternal;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << content;
  if (!out) throw InputError("write failed for " + path);
}

ExtractOutcome cmd_extract(const std::string& report_path, const std::string& out_path, const PipelineConfig& cfg,
                           LlmClient& client) {
  const std::string report = read_text_file(report_path);
  auto result = extract_ips(report, client, cfg.llm_max_retries);
  write_text_file(out_path, serialize_ips(result.ips));
  return {std::move(result.ips), result.attempts};
}

namespace {

DefaultRangeTable defaults_for(const PipelineConfig& cfg) {
  return cfg.defaults_path.empty() ? DefaultRangeTable::builtin() : DefaultRangeTable::load(cfg.defaults_path);
}

std::string decisions_json(const std::vector<RangeDecision>& decisions, const EgoAssignment& ego) {
  nlohmann::ordered_json j;
  j["ego"] = ego.ego.str();
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [v, n] : ego.active_counts) counts[v.str()] = n;
  j["active_actions"] = counts;
  auto& slots = j["slots"] = nlohmann::ordered_json::array();
  for (const auto& d : decisions) {
    slots.push_back({{"slot", d.slot},
                     {"source", d.source == RangeSource::Proposed ? "proposed" : "default"},
                     {"range", {d.range.lo, d.range.hi}},
                     {"reason", d.reason}});
  }
  return j.dump(2);
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

}  // namespace

LogicalizeOutcome cmd_logicalize(const std::string& ips_path, const std::string& out_path, const PipelineConfig& cfg,
                                 LlmClient& client) {
  const Ips ips = parse_ips(read_text_file(ips_path));
  const DefaultRangeTable defaults = defaults_for(cfg);
  auto conv = convert_to_template(ips, client, cfg.llm_max_retries);
  std::vector<RangeDecision> decisions;
  LogicalScenario filled = fill_ranges(conv.tpl, conv.proposed, defaults, cfg.sim.physics.vehicle_length, &decisions);
  EgoAssignment ego = select_ego(ips);
  LogicalScenario ls = substitute_ego(filled, ego.ego);
  write_text_file(out_path, serialize_logical(ls));
  write_text_file(out_path + ".ranges.json", decisions_json(decisions, ego));
  return {std::move(ls), std::move(ego), std::move(decisions), conv.attempts};
}

SearchRunOutcome run_method(const LogicalScenarioPtr& ls, const PipelineConfig& cfg, SearchMethod method,
                            std::uint64_t seed, std::vector<HistoryRecord> resume) {
  SearchConfig sc = cfg.search;
  sc.rng_seed = seed;
  sc.collision_threshold = cfg.sim.collision_threshold;
  SearchRuntime rt{cfg.sim, cfg.fitness, cfg.jobs, std::move(resume)};

  const auto start = std::chrono::steady_clock::now();
  SearchRunOutcome out;
  out.result = method == SearchMethod::Genetic ? run_search(ls, sc, rt) : run_random(ls, sc, rt);
  out.outcome.simulations = out.result.simulations;
  for (auto& c : out.result.critical.cases) {
    // Cases restored from a history file carry no trace; re-simulating is
    // exact because the simulator is deterministic.
    if (!c.trace) c.trace = std::make_shared<SimTrace>(simulate(c.tc, cfg.sim));
    out.outcome.criticals.emplace_back(c.sim, classify(c, cfg.triage));
  }
  out.outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

namespace {

void write_search_artifacts(const std::string& out_dir, const PipelineConfig& cfg, const LogicalScenario& ls,
                            const SearchRunOutcome& run, SearchMethod method, std::uint64_t seed) {
  const fs::path dir(out_dir);
  write_text_file((dir / "config.json").string(), cfg.to_json());
  write_text_file((dir / "history.jsonl").string(), history_to_jsonl(ls, run.result.history));

  std::string criticals;
  for (std::size_t i = 0; i < run.result.critical.cases.size(); ++i) {
    const auto& c = run.result.critical.cases[i];
    const auto& sig = run.outcome.criticals[i].second;
    nlohmann::ordered_json j;
    j["sim"] = c.sim;
    j["generation"] = c.generation;
    j["signature"] = sig.key();
    j["fitness"] = {{"mhd", c.fv.mhd}, {"acr", c.fv.acr}, {"div", c.fv.div}};
    j["values"] = c.tc.values;
    criticals += j.dump() + "\n";
    const std::string base = (dir / "critical" / std::to_string(c.sim)).string();
    write_text_file(base + ".sc", serialize_concrete(c.tc));
    if (c.trace) write_text_file(base + ".csv", trace_to_csv(*c.trace));
  }
  write_text_file((dir / "criticals.jsonl").string(), criticals);

  nlohmann::ordered_json s;
  s["method"] = method_name(method);
  s["seed"] = seed;
  s["population_size"] = cfg.search.population_size(ls);
  s["simulations"] = run.result.simulations;
  s["reused"] = run.result.reused;
  s["critical"] = run.result.critical.size();
  s["distinct_types"] = distinct_types(run.outcome);
  s["metrics"] = nlohmann::json::parse(metrics_json(metrics({run.outcome})));
  write_text_file((dir / "summary.json").string(), s.dump(2));
}

}  // namespace

SearchRunOutcome cmd_search(const std::string& ls_path, const std::string& out_dir, const PipelineConfig& cfg,
                            SearchMethod method, bool resume) {
  auto ls = std::make_shared<const LogicalScenario>(parse_logical(read_text_file(ls_path)));
  std::vector<HistoryRecord> previous;
  const std::string history_path = (fs::path(out_dir) / "history.jsonl").string();
  if (resume && fs::exists(history_path)) previous = parse_history(read_text_file(history_path));
  auto run = run_method(ls, cfg, method, cfg.seed, std::move(previous));
  write_search_artifacts(out_dir, cfg, *ls, run, method, cfg.seed);
  return run;
}

namespace {

std::string fmt(double v) { return text::format_double(v); }

std::string stat_cells(const Stat& s) {
  if (!s.reached()) return "not reached,not reached";
  return fmt(s.mean) + "," + fmt(s.std);
}

}  // namespace

CampaignOutcome cmd_campaign(const PipelineConfig& cfg, const std::string& out_dir, LlmClient* client) {
  cfg.validate(true);
  if (cfg.campaign_scenarios.empty() && cfg.campaign_reports.empty()) {
    throw ConfigError("campaign lists no scenarios or reports");
  }
  if (!cfg.campaign_reports.empty() && !client) throw ConfigError("campaign reports need a language-model client");
  const fs::path dir(out_dir);
  write_text_file((dir / "config.json").string(), cfg.to_json());

  // Scenario name -> logical scenario, in configuration order.
  std::vector<std::pair<std::string, LogicalScenarioPtr>> scenarios;
  for (const auto& path : cfg.campaign_scenarios) {
    scenarios.emplace_back(stem_of(path),
                           std::make_shared<const LogicalScenario>(parse_logical(read_text_file(path))));
  }
  for (const auto& path : cfg.campaign_reports) {
    const std::string name = stem_of(path);
    const std::string ips_path = (dir / name / (name + ".ips")).string();
    const std::string ls_path = (dir / name / (name + ".lsc")).string();
    cmd_extract(path, ips_path, cfg, *client);
    auto lz = cmd_logicalize(ips_path, ls_path, cfg, *client);
    scenarios.emplace_back(name, std::make_shared<const LogicalScenario>(std::move(lz.scenario)));
  }

  CampaignOutcome out;
  std::string reps_csv =
      "scenario,method,repetition,seed,simulations,critical,n_types,type_expos_rate,sim_for_first_type,"
      "sim_for_all_types,time_for_one_scenario\n";
  std::string cumulative_csv = "scenario,method,repetition,simulation,types\n";
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& [name, ls] = scenarios[i];
    for (int r = 1; r <= cfg.repetitions; ++r) {
      const std::uint64_t seed = split_seed(cfg.seed, i * 1000 + static_cast<std::uint64_t>(r));
      for (SearchMethod m : cfg.methods) {
        const std::string mname(method_name(m));
        auto run = run_method(ls, cfg, m, seed);
        write_search_artifacts((dir / name / mname / ("rep" + std::to_string(r))).string(), cfg, *ls, run, m, seed);

        const auto single = metrics({run.outcome});
        reps_csv += name + "," + mname + "," + std::to_string(r) + "," + std::to_string(seed) + "," +
                    std::to_string(run.outcome.simulations) + "," + std::to_string(run.outcome.criticals.size()) +
                    "," + fmt(single.n_types.mean) + "," + fmt(single.type_expos_rate.mean) + "," +
                    (single.sim_for_first_type.reached() ? fmt(single.sim_for_first_type.mean) : "not reached") +
                    "," + (single.sim_for_all_types.reached() ? fmt(single.sim_for_all_types.mean) : "not reached") +
                    "," + fmt(single.time_for_one_scenario.mean) + "\n";
        const auto curve = cumulative_types(run.outcome);
        for (std::size_t s = 0; s < curve.size(); ++s) {
          cumulative_csv += name + "," + mname + "," + std::to_string(r) + "," + std::to_string(s + 1) + "," +
                            std::to_string(curve[s]) + "\n";
        }
        for (const auto& [sim, sig] : run.outcome.criticals) out.types_by_method[mname].insert(sig);
        out.runs[{name, mname}].push_back(std::move(run.outcome));
      }
    }
  }

  std::string metrics_csv =
      "scenario,method,repetitions,n_types_mean,n_types_std,type_expos_rate_mean,type_expos_rate_std,"
      "sim_for_first_type_mean,sim_for_first_type_std,sim_for_all_types_mean,sim_for_all_types_std,"
      "time_for_one_scenario_mean,time_for_one_scenario_std,rate_undefined\n";
  nlohmann::ordered_json summary;
  for (const auto& [key, reps] : out.runs) {
    const auto m = metrics(reps);
    out.metrics[key] = m;
    metrics_csv += key.first + "," + key.second + "," + std::to_string(m.repetitions) + "," + stat_cells(m.n_types) +
                   "," + stat_cells(m.type_expos_rate) + "," + stat_cells(m.sim_for_first_type) + "," +
                   stat_cells(m.sim_for_all_types) + "," + stat_cells(m.time_for_one_scenario) + "," +
                   (m.rate_undefined ? "true" : "false") + "\n";
    summary["scenarios"][key.first][key.second] = nlohmann::json::parse(metrics_json(m));
  }
  for (const auto& [mname, types] : out.types_by_method) {
    std::vector<std::string> keys;
    for (const auto& t : types) keys.push_back(t.key());
    summary["distinct_types"][mname] = {{"count", types.size()}, {"signatures", keys}};
  }

  std::string counts_csv = "method,signature,count\n";
  std::map<std::string, std::vector<RepetitionOutcome>> by_method;
  for (const auto& [key, reps] : out.runs) {
    auto& v = by_method[key.second];
    v.insert(v.end(), reps.begin(), reps.end());
  }
  for (const auto& [mname, reps] : by_method) {
    for (const auto& [sig, n] : type_counts(reps)) counts_csv += mname + ",\"" + sig + "\"," + std::to_string(n) + "\n";
  }

  write_text_file((dir / "repetitions.csv").string(), reps_csv);
  write_text_file((dir / "metrics.csv").string(), metrics_csv);
  write_text_file((dir / "summary.json").string(), summary.dump(2));
  write_text_file((dir / "cumulative_types.csv").string(), cumulative_csv);
  write_text_file((dir / "type_counts.csv").string(), counts_csv);
  return out;
}

}  // namespace scengen
