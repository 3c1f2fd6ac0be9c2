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

#include "scengen/llm.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scengen/error.hpp"
#include "text_util.hpp"

namespace scengen {

namespace {

constexpr std::string_view kExtractionTask =
    "Please extract the road structure, and the interactive pattern sequence (IPS) from the given "
    "accident report.";

constexpr std::string_view kIpsFormat =
    "road: <straight|curved>, lanes: <number of lanes>\n"
    "Vi: initial action of Vi.\n"
    "Vj: initial action of Vj.\n"
    "(Vi, Vj): interactive actions between Vi and Vj.";

constexpr std::string_view kConversionTask =
    "Please generate the test case template corresponding to the given functional scenario.";

constexpr std::string_view kTestCaseModel =
    "A test case is a sequence of vehicle constructors followed by NPC actions, one call per line:\n"
    "road(<straight|curved>, lanes=<n>)\n"
    "npc(Vk, lane=<lane id>, offset=<lane offset m>, speed=<initial speed m/s>)\n"
    "accelerate(Vk, speed=<target speed m/s>, trigger=<trigger sequence>)\n"
    "decelerate(Vk, speed=<target speed m/s>, trigger=<trigger sequence>)\n"
    "lane_change(Vk, lane=<target lane>, speed=<target speed m/s>, trigger=<trigger sequence>)\n"
    "Lanes are numbered from 1 (rightmost) upward to the left. The trigger sequence of a vehicle's\n"
    "actions counts 1, 2, 3, ... and each action lasts a fixed duration.";

constexpr std::string_view kOneShotExample =
    "Functional scenario:\n"
    "road: straight, lanes: 2\n"
    "V1: drives in lane 1 at moderate speed.\n"
    "V2: drives in lane 2 slightly ahead of V1.\n"
    "(V2, V1): V2 swerves right into lane 1 in front of V1, V1 brakes.\n"
    "Test case template:\n"
    "road(straight, lanes=2)\n"
    "npc(V1, lane=1, offset=[0,20], speed=[8,15])\n"
    "npc(V2, lane=2, offset=[10,40], speed=[8,15])\n"
    "lane_change(V2, lane=1, speed=?, trigger=1)\n"
    "decelerate(V1, speed=?, trigger=1)";

std::string join_lines(const std::vector<std::string>& items, std::string_view prefix) {
  std::string out;
  for (const auto& item : items) {
    out += prefix;
    out += item;
    out += '\n';
  }
  return out;
}

std::string now_iso8601() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> feedback_block(int attempt, const std::vector<std::string>& problems) {
  std::vector<std::string> out;
  out.push_back("Attempt " + std::to_string(attempt) + ": your previous answer was rejected:");
  for (const auto& p : problems) out.push_back("- " + p);
  out.push_back("Please answer again and fix these problems.");
  return out;
}

}  // namespace

std::string Prompt::render() const {
  std::string out;
  out += "Task: " + task + "\n";
  out += format_title + ":\n" + format_block + "\n";
  if (example_block) out += "Example:\n" + *example_block + "\n";
  out += "Attentions:\n";
  for (std::size_t i = 0; i < attentions.size(); ++i) {
    out += "A" + std::to_string(i + 1) + ": " + attentions[i] + "\n";
  }
  out += input_title + ":\n" + input + "\n";
  if (!feedback.empty()) out += join_lines(feedback, "");
  return canonicalize_prompt(out);
}

Prompt build_extraction_prompt(std::string_view report) {
  if (text::trim(report).empty()) throw EmptyReport();
  Prompt p;
  p.task = std::string(kExtractionTask);
  p.format_title = "IPS Format";
  p.format_block = std::string(kIpsFormat);
  p.attentions = {
      "The verbs used to describe actions must be selected from the set {brake, decelerate, "
      "accelerate, swerve left, swerve right}.",
      "Each interactive pattern involves exactly two vehicles; list the vehicle performing the "
      "active action first and the vehicle that responds second.",
      "Every vehicle that appears in an interactive pattern must have exactly one initial action line.",
      "Write the interactive patterns in the chronological order in which they happened.",
      "Name the vehicles V1, V2, ... as in the report and answer with the IPS lines only.",
  };
  p.input_title = "Accident report";
  p.input = std::string(text::trim(report));
  return p;
}

Prompt build_conversion_prompt(const Ips& ips) {
  LegalityReport legality = check_legality(ips);
  if (!legality.ok()) {
    std::string msg = "IPS is not legal:";
    for (const auto& line : legality.lines()) msg += " " + line + ";";
    throw IllegalIps(msg);
  }
  Prompt p;
  p.task = std::string(kConversionTask);
  p.format_title = "Test Case Model & Example";
  p.format_block = std::string(kTestCaseModel);
  p.example_block = std::string(kOneShotExample);
  p.attentions = {
      "Only use the calls road, npc, accelerate, decelerate and lane_change.",
      "Write one npc constructor per vehicle before any action, in vehicle order.",
      "Map swerve left/right to lane_change, brake and decelerate to decelerate, accelerate to accelerate.",
      "Write ? for a parameter you cannot determine; give a value or a range [lo,hi] when the "
      "scenario implies one.",
      "Answer with the test case template only.",
  };
  p.input_title = "Functional scenario";
  p.input = serialize_ips(ips);
  return p;
}

std::string canonicalize_prompt(std::string_view input) {
  std::string out;
  out.reserve(input.size());
  for (auto line : text::lines(input)) {
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
      line.remove_suffix(1);
    }
    out.append(line);
    out.push_back('\n');
  }
  while (out.size() >= 2 && out[out.size() - 1] == '\n' && out[out.size() - 2] == '\n') out.pop_back();
  if (out == "\n") out.clear();
  return out;
}

std::string prompt_digest(std::string_view input) {
  const std::string canon = canonicalize_prompt(input);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(canon.data(), canon.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

void LlmClientConfig::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) throw ConfigError("temperature must lie in [0,2]");
  if (max_tokens < 1) throw ConfigError("max_tokens must be positive");
  if ((mode == LlmMode::Replay || mode == LlmMode::Record) && transcript_path.empty()) {
    throw ConfigError("replay and record modes need a transcript path");
  }
  if (mode != LlmMode::Replay && endpoint.empty()) throw ConfigError("live mode needs an endpoint");
}

Transcript Transcript::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open transcript " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("transcript " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("transcript " + path + " must be a JSON object");
  Transcript t;
  for (const auto& [digest, entry] : j.items()) {
    t.entries_[digest] = {entry.at("response").get<std::string>(), entry.value("model", ""),
                          entry.value("timestamp", "")};
  }
  return t;
}

void Transcript::save(const std::string& path) const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [digest, e] : entries_) {
    j[digest] = {{"response", e.response}, {"model", e.model}, {"timestamp", e.timestamp}};
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write transcript " + path);
  out << j.dump(2) << '\n';
}

const TranscriptEntry* Transcript::find(const std::string& digest) const {
  auto it = entries_.find(digest);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string ReplayClient::complete(const std::string& prompt) {
  const std::string digest = prompt_digest(prompt);
  const TranscriptEntry* e = transcript_.find(digest);
  if (!e) throw ReplayMiss(digest);
  return e->response;
}

std::string ScriptedClient::complete(const std::string&) {
  if (next_ >= responses_.size()) throw LlmTransportError("scripted client has no response left");
  return responses_[next_++];
}

std::string RecordingClient::complete(const std::string& prompt) {
  std::string response = inner_.complete(prompt);
  transcript_.put(prompt_digest(prompt), {response, model_, now_iso8601()});
  return response;
}

std::unique_ptr<LlmClient> make_client(const LlmClientConfig& config) {
  config.validate();
  if (config.mode == LlmMode::Replay) {
    return std::make_unique<ReplayClient>(Transcript::load(config.transcript_path));
  }
  const char* key = std::getenv(config.api_key_env.c_str());
  if (!key || !*key) throw ConfigError("environment variable " + config.api_key_env + " is not set");
  return std::make_unique<LiveClient>(config, key);
}

std::string strip_code_fence(std::string_view response) {
  std::size_t open = response.find("```");
  if (open == std::string_view::npos) return std::string(response);
  std::size_t body = response.find('\n', open);
  if (body == std::string_view::npos) return std::string(response);
  std::size_t close = response.find("```", body + 1);
  if (close == std::string_view::npos) close = response.size();
  return std::string(response.substr(body + 1, close - body - 1));
}

ExtractionResult extract_ips(std::string_view report, LlmClient& client, int max_retries) {
  if (max_retries < 1) throw ConfigError("max_retries must be at least 1");
  Prompt prompt = build_extraction_prompt(report);
  std::vector<std::string> problems;
  for (int attempt = 1; attempt <= max_retries; ++attempt) {
    if (attempt > 1) {
      auto fb = feedback_block(attempt, problems);
      prompt.feedback.insert(prompt.feedback.end(), fb.begin(), fb.end());
    }
    std::string response = strip_code_fence(client.complete(prompt.render()));
    try {
      Ips ips = parse_ips(response);
      LegalityReport legality = check_legality(ips);
      if (legality.ok()) return {std::move(ips), attempt};
      problems = legality.lines();
    } catch (const ParseError& e) {
      problems = {std::string("parse error at ") + e.what()};
    }
  }
  throw ExtractionFailed(max_retries, problems);
}

ConversionResult convert_to_template(const Ips& ips, LlmClient& client, int max_retries) {
  if (max_retries < 1) throw ConfigError("max_retries must be at least 1");
  Prompt prompt = build_conversion_prompt(ips);
  std::vector<std::string> problems;
  for (int attempt = 1; attempt <= max_retries; ++attempt) {
    if (attempt > 1) {
      auto fb = feedback_block(attempt, problems);
      prompt.feedback.insert(prompt.feedback.end(), fb.begin(), fb.end());
    }
    std::string response = strip_code_fence(client.complete(prompt.render()));
    try {
      TestCaseTemplate tpl = parse_template(response);
      if (tpl.vehicles().empty()) {
        problems = {"the template declares no vehicle"};
        continue;
      }
      ConversionResult result;
      result.attempts = attempt;
      std::size_t slot = 0;
      for (auto& st : tpl.statements) {
        for (auto& p : st.params) {
          if (const auto* r = std::get_if<Range>(&p.state)) {
            result.proposed[slot] = *r;
          } else if (const auto* b = std::get_if<Bound>(&p.state)) {
            result.proposed[slot] = b->range.value_or(Range{b->value, b->value});
          }
          p.state = Unbound{};
          ++slot;
        }
      }
      tpl.ego.reset();
      result.tpl = std::move(tpl);
      return result;
    } catch (const ParseError& e) {
      problems = {std::string("parse error at ") + e.what()};
    }
  }
  throw ConversionFailed(max_retries, problems);
}

}  // namespace scengen
