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

// Same configuration as the library's translation unit, so both see one
// definition of the client classes.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "scengen/error.hpp"
#include "scengen/llm.hpp"

namespace scengen {
namespace {

constexpr const char* kLegalIps =
    "road: straight, lanes: 2\n"
    "V1: drives in lane 1.\n"
    "V2: follows V1 in lane 1.\n"
    "(V1, V2): V1 brakes abruptly in front of V2, V2 decelerates.\n";

constexpr const char* kTemplate =
    "road(straight, lanes=2)\n"
    "npc(V1, lane=1, offset=[20,40], speed=?)\n"
    "npc(V2, lane=1, offset=2.5 in [0,10], speed=?)\n"
    "decelerate(V1, speed=[0,5], trigger=1)\n";

TEST(Digest, Sha256OfCanonicalText) {
  // Reference digests from coreutils sha256sum.
  EXPECT_EQ(prompt_digest("abc"), "edeaaff3f1774ad2888673770c6d64097e391bc362d7d6fb34982ddf0efd18cb");
  EXPECT_EQ(prompt_digest("line one\nline two\n"), "e9024f1a07d29d52ad3aa5e1a18e94db1f3a9fd32b89e39d47c472cd99071e13");
}

TEST(Digest, InsensitiveToLineEndingsAndTrailingSpace) {
  const std::string d = prompt_digest("line one\nline two\n");
  EXPECT_EQ(prompt_digest("line one  \r\nline two\t\r\n\n\n"), d);
  EXPECT_EQ(prompt_digest("line one\nline two"), d);
  EXPECT_NE(prompt_digest("line  one\nline two\n"), d);
}

TEST(Prompts, ExtractionPromptLayout) {
  const std::string text = build_extraction_prompt("  V1 hit V2.  \n").render();
  EXPECT_EQ(text.rfind("Task: ", 0), 0u);
  EXPECT_NE(text.find("IPS Format:\n"), std::string::npos);
  EXPECT_NE(text.find("A1: "), std::string::npos);
  EXPECT_NE(text.find("{brake, decelerate, accelerate, swerve left, swerve right}"), std::string::npos);
  EXPECT_NE(text.find("Accident report:\nV1 hit V2.\n"), std::string::npos);
  EXPECT_EQ(text, canonicalize_prompt(text));
}

TEST(Prompts, EmptyReportRejected) {
  EXPECT_THROW(build_extraction_prompt(" \n\t"), EmptyReport);
}

TEST(Prompts, ConversionPromptNeedsLegalIps) {
  Ips ips = parse_ips(kLegalIps);
  const std::string text = build_conversion_prompt(ips).render();
  EXPECT_NE(text.find("Example:\n"), std::string::npos);
  EXPECT_NE(text.find("Functional scenario:\n" + serialize_ips(ips)), std::string::npos);
  ips.patterns.clear();
  EXPECT_THROW(build_conversion_prompt(ips), IllegalIps);
}

TEST(Fence, Stripping) {
  EXPECT_EQ(strip_code_fence("plain"), "plain");
  EXPECT_EQ(strip_code_fence("intro\n```text\na\nb\n```\nafter"), "a\nb\n");
  EXPECT_EQ(strip_code_fence("```\nunterminated"), "unterminated");
}

TEST(Extract, RetriesWithFeedback) {
  struct Spy : LlmClient {
    std::vector<std::string> prompts;
    std::vector<std::string> answers;
    std::string complete(const std::string& p) override {
      prompts.push_back(p);
      return answers.at(prompts.size() - 1);
    }
  } spy;
  spy.answers = {"no ips here", "road: straight, lanes: 1\nV1: alone.\n", std::string("```\n") + kLegalIps + "```"};
  auto r = extract_ips("report", spy, 3);
  EXPECT_EQ(r.attempts, 3);
  EXPECT_EQ(r.ips, parse_ips(kLegalIps));
  ASSERT_EQ(spy.prompts.size(), 3u);
  EXPECT_EQ(spy.prompts[0].find("rejected"), std::string::npos);
  EXPECT_NE(spy.prompts[1].find("Attempt 2: your previous answer was rejected:"), std::string::npos);
  EXPECT_NE(spy.prompts[1].find("parse error"), std::string::npos);
  EXPECT_NE(spy.prompts[2].find("- R5 patterns"), std::string::npos);
  // Feedback accumulates: earlier notes stay in later prompts.
  EXPECT_NE(spy.prompts[2].find("Attempt 2:"), std::string::npos);
}

TEST(Extract, ExhaustionReportsLastViolations) {
  ScriptedClient client({"x", "y", "road: straight, lanes: 1\nV1: alone.\n"});
  try {
    extract_ips("report", client, 3);
    FAIL();
  } catch (const ExtractionFailed& e) {
    EXPECT_EQ(e.attempts(), 3);
    ASSERT_FALSE(e.last_violations().empty());
    EXPECT_EQ(e.last_violations()[0].rfind("R5", 0), 0u);
  }
  EXPECT_EQ(client.calls(), 3u);
}

TEST(Convert, ProposalsAndUnboundTemplate) {
  ScriptedClient client({std::string("Sure:\n```\n") + kTemplate + "```\n"});
  auto r = convert_to_template(parse_ips(kLegalIps), client);
  EXPECT_EQ(r.attempts, 1);
  EXPECT_FALSE(r.tpl.ego);
  for (const auto& st : r.tpl.statements) {
    for (const auto& p : st.params) EXPECT_TRUE(std::holds_alternative<Unbound>(p.state));
  }
  // Slots: 0..2 V1, 3..5 V2, 6..7 decelerate.
  ProposedRanges expected{{0, {1, 1}}, {1, {20, 40}}, {3, {1, 1}}, {4, {0, 10}}, {6, {0, 5}}, {7, {1, 1}}};
  EXPECT_EQ(r.proposed, expected);
}

TEST(Convert, RejectsEmptyTemplate) {
  ScriptedClient client({"road(straight, lanes=2)\n", "road(straight, lanes=2)\n"});
  EXPECT_THROW(convert_to_template(parse_ips(kLegalIps), client, 2), ConversionFailed);
}

TEST(Transcript, RecordThenReplay) {
  const auto path = std::filesystem::temp_directory_path() / "scengen_transcript_test.json";
  ScriptedClient scripted({"first", "second"});
  RecordingClient rec(scripted, "model-x");
  EXPECT_EQ(rec.complete("prompt A"), "first");
  EXPECT_EQ(rec.complete("prompt B  \n"), "second");
  rec.save(path.string());

  Transcript t = Transcript::load(path.string());
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.find(prompt_digest("prompt A"))->model, "model-x");
  ReplayClient replay(std::move(t));
  EXPECT_EQ(replay.complete("prompt B"), "second");
  EXPECT_EQ(replay.complete("prompt A\r\n"), "first");
  try {
    replay.complete("prompt C");
    FAIL();
  } catch (const ReplayMiss& e) {
    EXPECT_EQ(e.digest(), prompt_digest("prompt C"));
  }
  std::filesystem::remove(path);
}

TEST(Transcript, MalformedFileIsConfigError) {
  const auto path = std::filesystem::temp_directory_path() / "scengen_bad_transcript.json";
  {
    std::ofstream(path) << "[1, 2";
  }
  EXPECT_THROW(Transcript::load(path.string()), ConfigError);
  EXPECT_THROW(Transcript::load("/nonexistent/transcript.json"), ConfigError);
  std::filesystem::remove(path);
}

TEST(ClientConfig, Validation) {
  LlmClientConfig c;
  EXPECT_EQ(c.model_name, "gpt-4-0613");
  EXPECT_EQ(c.max_tokens, 1000);
  EXPECT_DOUBLE_EQ(c.temperature, 0.8);
  EXPECT_THROW(c.validate(), ConfigError);  // replay without a transcript
  c.transcript_path = "x.json";
  EXPECT_NO_THROW(c.validate());
  c.temperature = 3;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ClientConfig, LiveNeedsApiKey) {
  LlmClientConfig c;
  c.mode = LlmMode::Live;
  c.api_key_env = "SCENGEN_TEST_UNSET_KEY_VARIABLE";
  ::unsetenv(c.api_key_env.c_str());
  EXPECT_THROW(make_client(c), ConfigError);
}

TEST(LiveClient, PostsChatCompletionRequest) {
  httplib::Server server;
  nlohmann::json seen;
  std::string auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"hello"}}]})", "application/json");
  });
  server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("overloaded", "text/plain");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  LlmClientConfig c;
  c.mode = LlmMode::Live;
  c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  LiveClient client(c, "secret");
  EXPECT_EQ(client.complete("the prompt"), "hello");
  EXPECT_EQ(auth, "Bearer secret");
  EXPECT_EQ(seen["model"], "gpt-4-0613");
  EXPECT_EQ(seen["max_tokens"], 1000);
  EXPECT_DOUBLE_EQ(seen["temperature"].get<double>(), 0.8);
  EXPECT_EQ(seen["messages"][0]["content"], "the prompt");

  c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/broken";
  EXPECT_THROW(LiveClient(c, "secret").complete("x"), LlmTransportError);
  server.stop();
  worker.join();
}

}  // namespace
}  // namespace scengen
