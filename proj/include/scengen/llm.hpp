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

// Language-model bridge: prompt construction for the two transformation
// steps (report -> IPS, IPS -> test case template), chat-completion clients,
// transcript record/replay, and the retry-until-valid loops.

#ifndef SCENGEN_LLM_HPP_
#define SCENGEN_LLM_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scengen/dsl.hpp"
#include "scengen/ips.hpp"

namespace scengen {

struct Prompt {
  std::string task;
  /// Heading of the format block ("IPS Format", "Test Case Model & Example").
  std::string format_title;
  std::string format_block;
  std::vector<std::string> attentions;
  /// One-shot example; present on conversion prompts.
  std::optional<std::string> example_block;
  std::string input_title;
  std::string input;
  /// Rejection notes from earlier attempts, appended on retry.
  std::vector<std::string> feedback;

  std::string render() const;
};

/// Throws EmptyReport for a blank report.
Prompt build_extraction_prompt(std::string_view report);
/// Throws IllegalIps if `ips` fails the legality check.
Prompt build_conversion_prompt(const Ips& ips);

/// Normalizes line endings to LF, strips trailing whitespace from every line
/// and drops trailing blank lines.
std::string canonicalize_prompt(std::string_view text);
/// Lower-case hex SHA-256 of the canonical prompt text.
std::string prompt_digest(std::string_view text);

enum class LlmMode { Live, Replay, Record };

struct LlmClientConfig {
  LlmMode mode = LlmMode::Replay;
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4-0613";
  int max_tokens = 1000;
  double temperature = 0.8;
  /// Required for Replay and Record.
  std::string transcript_path;
  std::string api_key_env = "SCENGEN_API_KEY";

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
};

struct TranscriptEntry {
  std::string response;
  std::string model;
  std::string timestamp;
};

/// On-disk JSON map: {"<digest>": {"response": .., "model": .., "timestamp": ..}}.
class Transcript {
 public:
  static Transcript load(const std::string& path);
  void save(const std::string& path) const;

  const TranscriptEntry* find(const std::string& digest) const;
  void put(const std::string& digest, TranscriptEntry entry) { entries_[digest] = std::move(entry); }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, TranscriptEntry>& entries() const { return entries_; }

 private:
  std::map<std::string, TranscriptEntry> entries_;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

/// Answers from a transcript; unknown prompts raise ReplayMiss.
class ReplayClient : public LlmClient {
 public:
  explicit ReplayClient(Transcript transcript) : transcript_(std::move(transcript)) {}
  std::string complete(const std::string& prompt) override;

 private:
  Transcript transcript_;
};

/// Returns canned responses in order, regardless of the prompt.
class ScriptedClient : public LlmClient {
 public:
  explicit ScriptedClient(std::vector<std::string> responses) : responses_(std::move(responses)) {}
  std::string complete(const std::string& prompt) override;
  std::size_t calls() const { return next_; }

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
};

/// POSTs {model, messages, max_tokens, temperature} to a chat-completion
/// endpoint and returns choices[0].message.content.
class LiveClient : public LlmClient {
 public:
  LiveClient(LlmClientConfig config, std::string api_key);
  std::string complete(const std::string& prompt) override;

 private:
  LlmClientConfig config_;
  std::string api_key_;
};

/// Forwards to `inner` and records every exchange. Call save() to persist.
class RecordingClient : public LlmClient {
 public:
  RecordingClient(LlmClient& inner, std::string model_name) : inner_(inner), model_(std::move(model_name)) {}
  std::string complete(const std::string& prompt) override;
  const Transcript& transcript() const { return transcript_; }
  void save(const std::string& path) const { transcript_.save(path); }

 private:
  LlmClient& inner_;
  std::string model_;
  Transcript transcript_;
};

/// Replay and Live clients from config. Record mode is composed by the
/// caller (RecordingClient wrapping a Live client).
std::unique_ptr<LlmClient> make_client(const LlmClientConfig& config);

inline constexpr int kDefaultMaxRetries = 3;

struct ExtractionResult {
  Ips ips;
  int attempts = 0;
};

/// Asks for an IPS until a response parses and passes the legality check.
/// Throws ExtractionFailed after `max_retries` attempts.
ExtractionResult extract_ips(std::string_view report, LlmClient& client, int max_retries = kDefaultMaxRetries);

/// Slot index -> range suggested by the model.
using ProposedRanges = std::map<std::size_t, Range>;

struct ConversionResult {
  /// Every slot Unbound.
  TestCaseTemplate tpl;
  ProposedRanges proposed;
  int attempts = 0;
};

/// Asks for a test-case template until a response parses as one. Ranges or
/// values written in the response become proposals. Throws ConversionFailed.
ConversionResult convert_to_template(const Ips& ips, LlmClient& client, int max_retries = kDefaultMaxRetries);

/// Body of the first ``` fenced block if present, else the whole text.
std::string strip_code_fence(std::string_view response);

}  // namespace scengen

#endif  // SCENGEN_LLM_HPP_
