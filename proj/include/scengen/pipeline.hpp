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

// The phases of the command-line tool as library calls. Each writes its
// artifacts to disk and returns what it computed; failures surface as
// exceptions which exit_code() maps to the tool's exit status.

#ifndef SCENGEN_PIPELINE_HPP_
#define SCENGEN_PIPELINE_HPP_

#include <exception>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "scengen/config.hpp"
#include "scengen/ips.hpp"
#include "scengen/llm.hpp"
#include "scengen/logicalize.hpp"
#include "scengen/search.hpp"
#include "scengen/triage.hpp"

namespace scengen {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitPipeline = 3, kExitInternal = 4 };

/// 2 for configuration and input problems, 3 for pipeline failures (model
/// retries exhausted, unusable scenarios), 4 for anything else.
int exit_code(const std::exception& e);

/// Throws InputError if the file cannot be read.
std::string read_text_file(const std::string& path);
/// Creates parent directories as needed.
void write_text_file(const std::string& path, const std::string& content);

struct ExtractOutcome {
  Ips ips;
  int attempts = 0;
};
ExtractOutcome cmd_extract(const std::string& report_path, const std::string& out_path, const PipelineConfig& cfg,
                           LlmClient& client);

struct LogicalizeOutcome {
  LogicalScenario scenario;
  EgoAssignment ego;
  std::vector<RangeDecision> decisions;
  int attempts = 0;
};
/// Writes the logical scenario to `out_path` and the range decisions next
/// to it (`<out_path>.ranges.json`).
LogicalizeOutcome cmd_logicalize(const std::string& ips_path, const std::string& out_path, const PipelineConfig& cfg,
                                 LlmClient& client);

struct SearchRunOutcome {
  SearchResult result;
  RepetitionOutcome outcome;
};
/// Output directory layout: config.json, history.jsonl, criticals.jsonl,
/// critical/<sim>.sc and critical/<sim>.csv (trace), summary.json. With
/// `resume`, an existing history.jsonl is reused record by record.
SearchRunOutcome cmd_search(const std::string& ls_path, const std::string& out_dir, const PipelineConfig& cfg,
                            SearchMethod method = SearchMethod::Genetic, bool resume = false);
SearchRunOutcome run_method(const LogicalScenarioPtr& ls, const PipelineConfig& cfg, SearchMethod method,
                            std::uint64_t seed, std::vector<HistoryRecord> resume = {});

struct CampaignOutcome {
  /// Keyed by (scenario name, method).
  std::map<std::pair<std::string, std::string>, std::vector<RepetitionOutcome>> runs;
  std::map<std::pair<std::string, std::string>, CampaignMetrics> metrics;
  /// Distinct signatures per method over all scenarios and repetitions.
  std::map<std::string, std::set<TypeSignature>> types_by_method;
};
/// Runs every configured scenario (and report, when `client` is given) with
/// every method for `cfg.repetitions` repetitions. Repetition r of scenario
/// i uses the same sub-seed for every method. Writes repetitions.csv,
/// metrics.csv (mean/std columns), summary.json, cumulative_types.csv and
/// type_counts.csv to `out_dir`.
CampaignOutcome cmd_campaign(const PipelineConfig& cfg, const std::string& out_dir, LlmClient* client = nullptr);

}  // namespace scengen

#endif  // SCENGEN_PIPELINE_HPP_
