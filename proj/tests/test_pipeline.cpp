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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "scengen/error.hpp"
#include "scengen/pipeline.hpp"

namespace scengen {
namespace {

namespace fs = std::filesystem;
const std::string kData = SCENGEN_DATA_DIR;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("scengen_test_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

PipelineConfig offline_config() {
  PipelineConfig cfg;
  cfg.transcript_path = kData + "/transcripts/replay.json";
  cfg.llm.transcript_path = cfg.transcript_path;
  return cfg;
}

std::size_t count_lines(const std::string& text) { return std::count(text.begin(), text.end(), '\n'); }

TEST(ExitCode, Mapping) {
  EXPECT_EQ(exit_code(ConfigError("x")), 2);
  EXPECT_EQ(exit_code(InputError("x")), 2);
  EXPECT_EQ(exit_code(ParseError(1, 1, "x")), 2);
  EXPECT_EQ(exit_code(MissingDefault("x")), 2);
  EXPECT_EQ(exit_code(ReplayMiss("abc")), 3);
  EXPECT_EQ(exit_code(EmptyReport()), 3);
  EXPECT_EQ(exit_code(NoNpc()), 3);
  EXPECT_EQ(exit_code(InvalidTestCase("x")), 3);
  EXPECT_EQ(exit_code(SamplingExhausted("x")), 3);
  EXPECT_EQ(exit_code(DimensionMismatch("x")), 4);
  EXPECT_EQ(exit_code(std::runtime_error("x")), 4);
}

TEST(Files, ReadWrite) {
  TempDir tmp;
  const std::string p = tmp / "a/b/c.txt";
  write_text_file(p, "hello\n");
  EXPECT_EQ(read_text_file(p), "hello\n");
  EXPECT_THROW(read_text_file(tmp / "missing.txt"), InputError);
}

class Golden : public ::testing::TestWithParam<std::string> {};

TEST_P(Golden, ExtractAndLogicalizeOffline) {
  const std::string name = GetParam();
  TempDir tmp;
  auto cfg = offline_config();
  ReplayClient client(Transcript::load(cfg.transcript_path));
  auto ex = cmd_extract(kData + "/reports/" + name + ".txt", tmp / (name + ".ips"), cfg, client);
  EXPECT_GE(ex.attempts, 1);
  EXPECT_EQ(read_text_file(tmp / (name + ".ips")), read_text_file(kData + "/golden/" + name + ".ips"));

  auto lz = cmd_logicalize(tmp / (name + ".ips"), tmp / (name + ".lsc"), cfg, client);
  EXPECT_EQ(read_text_file(tmp / (name + ".lsc")), read_text_file(kData + "/golden/" + name + ".lsc"));
  auto ranges = nlohmann::json::parse(read_text_file(tmp / (name + ".lsc.ranges.json")));
  EXPECT_EQ(ranges["ego"], lz.ego.ego.str());
  EXPECT_EQ(ranges["slots"].size(), lz.decisions.size());
  EXPECT_GT(lz.scenario.dimension(), 0u);
}

INSTANTIATE_TEST_SUITE_P(Bundled, Golden, ::testing::Values("three_vehicle", "rear_end", "curved_cut_in"));

TEST(Pipeline, ExtractionRetriesThenFails) {
  TempDir tmp;
  auto cfg = offline_config();
  ReplayClient client(Transcript::load(cfg.transcript_path));
  try {
    cmd_extract(kData + "/reports/unparseable.txt", tmp / "u.ips", cfg, client);
    FAIL() << "expected ExtractionFailed";
  } catch (const ExtractionFailed& e) {
    EXPECT_EQ(e.attempts(), 3);
    EXPECT_EQ(exit_code(e), 3);
  }
  EXPECT_FALSE(fs::exists(tmp / "u.ips"));
}

TEST(Pipeline, SearchArtifactsAndResume) {
  TempDir tmp;
  PipelineConfig cfg;
  cfg.search.g_max = 3;
  cfg.seed = 5;
  const std::string ls = kData + "/scenarios/cutin.lsc";
  auto first = cmd_search(ls, tmp / "run", cfg);
  const std::size_t p = first.result.population.size();
  EXPECT_EQ(first.result.simulations, 3 * p);
  for (const char* f : {"config.json", "history.jsonl", "criticals.jsonl", "summary.json"}) {
    EXPECT_TRUE(fs::exists(tmp / ("run/" + std::string(f)))) << f;
  }
  EXPECT_EQ(count_lines(read_text_file(tmp / "run/history.jsonl")), first.result.simulations);
  EXPECT_EQ(count_lines(read_text_file(tmp / "run/criticals.jsonl")), first.result.critical.size());
  for (const auto& c : first.result.critical.cases) {
    EXPECT_TRUE(fs::exists(tmp / ("run/critical/" + std::to_string(c.sim) + ".sc")));
    EXPECT_TRUE(fs::exists(tmp / ("run/critical/" + std::to_string(c.sim) + ".csv")));
  }
  auto summary = nlohmann::json::parse(read_text_file(tmp / "run/summary.json"));
  EXPECT_EQ(summary["simulations"], first.result.simulations);
  EXPECT_EQ(summary["method"], "ga");

  // Resuming the same run replays every simulation from the history.
  auto again = cmd_search(ls, tmp / "run", cfg, SearchMethod::Genetic, true);
  EXPECT_EQ(again.result.reused, first.result.simulations);
  EXPECT_EQ(again.result.critical.size(), first.result.critical.size());
  EXPECT_EQ(read_text_file(tmp / "run/history.jsonl"), [&] {
    TempDir other;
    cmd_search(ls, other / "run", cfg);
    return read_text_file(other / "run/history.jsonl");
  }());
}

TEST(Pipeline, RandomMethodUsesSameBudget) {
  TempDir tmp;
  PipelineConfig cfg;
  cfg.search.g_max = 2;
  const std::string path = kData + "/scenarios/cutin.lsc";
  const auto ls = parse_logical(read_text_file(path));
  auto r = cmd_search(path, tmp / "rnd", cfg, SearchMethod::Random);
  EXPECT_EQ(r.result.simulations, 2 * cfg.search.population_size(ls));
  EXPECT_EQ(nlohmann::json::parse(read_text_file(tmp / "rnd/summary.json"))["method"], "random");
}

TEST(Pipeline, SmallCampaign) {
  TempDir tmp;
  PipelineConfig cfg;
  cfg.campaign_scenarios = {kData + "/scenarios/cutin.lsc"};
  cfg.repetitions = 2;
  cfg.methods = {SearchMethod::Genetic, SearchMethod::Random};
  cfg.search.g_max = 2;
  auto out = cmd_campaign(cfg, tmp.path().string());
  ASSERT_EQ(out.runs.size(), 2u);
  EXPECT_EQ(out.runs.at({"cutin", "ga"}).size(), 2u);
  EXPECT_EQ(out.runs.at({"cutin", "random"}).size(), 2u);
  for (const char* f : {"repetitions.csv", "metrics.csv", "summary.json", "cumulative_types.csv", "type_counts.csv"}) {
    EXPECT_TRUE(fs::exists(tmp / f)) << f;
  }
  // Header plus one row per (method, repetition).
  EXPECT_EQ(count_lines(read_text_file(tmp / "repetitions.csv")), 5u);
  EXPECT_EQ(count_lines(read_text_file(tmp / "metrics.csv")), 3u);

  // Reports without a client are a configuration error.
  cfg.campaign_reports = {kData + "/reports/rear_end.txt"};
  EXPECT_THROW(cmd_campaign(cfg, tmp / "x"), ConfigError);
}

TEST(Pipeline, CampaignSeedsAreSharedAcrossMethods) {
  TempDir tmp;
  PipelineConfig cfg;
  cfg.campaign_scenarios = {kData + "/scenarios/cutin.lsc"};
  cfg.repetitions = 1;
  cfg.methods = {SearchMethod::Genetic, SearchMethod::Random};
  cfg.search.g_max = 1;
  cmd_campaign(cfg, tmp.path().string());
  // With a single generation both methods evaluate the same initial sample.
  EXPECT_EQ(read_text_file(tmp / "cutin/ga/rep1/history.jsonl"), read_text_file(tmp / "cutin/random/rep1/history.jsonl"));
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SCENGEN_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  TempDir tmp;
  const std::string replay = " --replay " + kData + "/transcripts/replay.json";
  EXPECT_EQ(run_cli("extract " + kData + "/reports/rear_end.txt" + replay + " --out " + (tmp / "r.ips")), 0);
  EXPECT_EQ(read_text_file(tmp / "r.ips"), read_text_file(kData + "/golden/rear_end.ips"));
  EXPECT_EQ(run_cli("logicalize " + (tmp / "r.ips") + replay + " --out " + (tmp / "r.lsc")), 0);
  EXPECT_EQ(read_text_file(tmp / "r.lsc"), read_text_file(kData + "/golden/rear_end.lsc"));
  EXPECT_EQ(run_cli("search " + (tmp / "r.lsc") + " --generations 2 --seed 3 --out " + (tmp / "run")), 0);
  EXPECT_TRUE(fs::exists(tmp / "run/summary.json"));

  EXPECT_EQ(run_cli("extract " + kData + "/reports/unparseable.txt" + replay + " --out " + (tmp / "u.ips")), 3);
  EXPECT_EQ(run_cli("extract " + kData + "/reports/missing.txt" + replay), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("search " + (tmp / "r.lsc") + " --population 1"), 2);
  EXPECT_EQ(run_cli("campaign"), 2);
  EXPECT_EQ(run_cli("extract " + kData + "/reports/rear_end.txt --replay " + kData + "/nope.json"), 2);
  // A report the transcript has never seen.
  write_text_file(tmp / "new.txt", "V1 drove along an empty road.\n");
  EXPECT_EQ(run_cli("extract " + (tmp / "new.txt") + replay + " --out " + (tmp / "n.ips")), 3);
}

}  // namespace
}  // namespace scengen
