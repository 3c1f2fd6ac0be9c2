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

// scengen: accident report -> interaction sequence -> logical scenario ->
// critical concrete scenarios.
//
//   scengen extract report.txt --replay data/transcripts/replay.json --out case.ips
//   scengen logicalize case.ips --replay data/transcripts/replay.json --out case.lsc
//   scengen search case.lsc --seed 7 --out runs/case
//   scengen campaign --config data/campaign.json --out runs/campaign

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include "scengen/config.hpp"
#include "scengen/error.hpp"
#include "scengen/pipeline.hpp"

namespace {

using namespace scengen;

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string replay;
  std::string record;
  bool live = false;
  std::optional<int> jobs;
  std::string out;
};

PipelineConfig load_config(const GlobalFlags& g) {
  PipelineConfig cfg = g.config_path.empty() ? PipelineConfig{} : PipelineConfig::load(g.config_path);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.search.rng_seed = *g.seed;
  }
  if (g.jobs) cfg.jobs = *g.jobs;
  const int modes = !g.replay.empty() + !g.record.empty() + g.live;
  if (modes > 1) throw ConfigError("--replay, --record and --live are mutually exclusive");
  if (!g.replay.empty()) {
    cfg.llm.mode = LlmMode::Replay;
    cfg.transcript_path = g.replay;
  } else if (!g.record.empty()) {
    cfg.llm.mode = LlmMode::Record;
    cfg.transcript_path = g.record;
  } else if (g.live) {
    cfg.llm.mode = LlmMode::Live;
  }
  cfg.llm.transcript_path = cfg.transcript_path;
  cfg.validate();
  return cfg;
}

// Owns the client stack for one invocation; in record mode the transcript
// is written when the session ends, even after a failure.
class ClientSession {
 public:
  explicit ClientSession(const PipelineConfig& cfg) : cfg_(cfg) {
    inner_ = make_client(cfg.llm);
    if (cfg.llm.mode == LlmMode::Record) recorder_ = std::make_unique<RecordingClient>(*inner_, cfg.llm.model_name);
  }
  ~ClientSession() {
    if (!recorder_) return;
    try {
      recorder_->save(cfg_.transcript_path);
    } catch (const std::exception& e) {
      std::cerr << "scengen: could not save transcript: " << e.what() << "\n";
    }
  }
  LlmClient& client() { return recorder_ ? static_cast<LlmClient&>(*recorder_) : *inner_; }

 private:
  const PipelineConfig& cfg_;
  std::unique_ptr<LlmClient> inner_;
  std::unique_ptr<RecordingClient> recorder_;
};

std::string default_out(const std::string& input, const char* ext) {
  return std::filesystem::path(input).replace_extension(ext).filename().string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario generation from accident reports"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--config", g.config_path, "Pipeline configuration (JSON)");
  app.add_option("--seed", g.seed, "Root seed for every random choice");
  app.add_option("--replay", g.replay, "Answer model prompts from this transcript");
  app.add_option("--record", g.record, "Query the live model and save a transcript here");
  app.add_flag("--live", g.live, "Query the live model");
  app.add_option("--jobs", g.jobs, "Threads for fitness evaluation (0 = all cores)");
  app.add_option("--out", g.out, "Output file or directory");

  std::string input;
  auto* extract = app.add_subcommand("extract", "Accident report -> interaction sequence (.ips)");
  extract->add_option("report", input, "Accident report text")->required();

  auto* logicalize = app.add_subcommand("logicalize", "Interaction sequence -> logical scenario (.lsc)");
  logicalize->add_option("ips", input, "Interaction sequence file")->required();

  std::optional<int> generations;
  std::optional<std::size_t> population;
  std::string method = "ga";
  bool resume = false;
  auto* search = app.add_subcommand("search", "Search a logical scenario for critical cases");
  search->add_option("scenario", input, "Logical scenario file")->required();
  search->add_option("--generations", generations, "Number of generations")->check(CLI::PositiveNumber);
  search->add_option("--population", population, "Population size")->check(CLI::Range(2, 100000));
  search->add_option("--method", method, "ga or random")->check(CLI::IsMember({"ga", "random"}));
  search->add_flag("--resume", resume, "Reuse results from an existing history in the output directory");

  app.add_subcommand("campaign", "Repeated searches over the configured scenarios, with metrics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    PipelineConfig cfg = load_config(g);
    if (extract->parsed()) {
      if (!std::filesystem::exists(input)) throw InputError("report not found: " + input);
      ClientSession session(cfg);
      const std::string out = g.out.empty() ? default_out(input, ".ips") : g.out;
      auto r = cmd_extract(input, out, cfg, session.client());
      std::cout << "wrote " << out << " (" << r.ips.initials.size() << " initial actions, " << r.ips.patterns.size()
                << " patterns, " << r.attempts << " attempt(s))\n";
    } else if (logicalize->parsed()) {
      if (!std::filesystem::exists(input)) throw InputError("interaction sequence not found: " + input);
      ClientSession session(cfg);
      const std::string out = g.out.empty() ? default_out(input, ".lsc") : g.out;
      auto r = cmd_logicalize(input, out, cfg, session.client());
      std::cout << "wrote " << out << " (ego " << r.ego.ego.str() << ", " << r.scenario.dimension()
                << " parameters)\n";
    } else if (search->parsed()) {
      if (generations) cfg.search.g_max = *generations;
      if (population) cfg.search.p_max = *population;
      const std::string out = g.out.empty() ? "runs/" + std::filesystem::path(input).stem().string() : g.out;
      auto r = cmd_search(input, out, cfg, method == "ga" ? SearchMethod::Genetic : SearchMethod::Random, resume);
      std::cout << "wrote " << out << " (" << r.result.simulations << " simulations, " << r.result.critical.size()
                << " critical, " << distinct_types(r.outcome) << " types)\n";
    } else {
      if (g.config_path.empty()) throw ConfigError("campaign needs --config");
      cfg.validate(true);
      const std::string out = g.out.empty() ? cfg.out_dir : g.out;
      std::unique_ptr<ClientSession> session;
      if (!cfg.campaign_reports.empty()) session = std::make_unique<ClientSession>(cfg);
      auto r = cmd_campaign(cfg, out, session ? &session->client() : nullptr);
      for (const auto& [m, types] : r.types_by_method) {
        std::cout << m << ": " << types.size() << " distinct types\n";
      }
      std::cout << "wrote " << out << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "scengen: " << e.what() << "\n";
    return exit_code(e);
  }
}
