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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <nlohmann/json.hpp>

#include "scengen/error.hpp"
#include "scengen/llm.hpp"

namespace scengen {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + url);
  std::size_t path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

}  // namespace

LiveClient::LiveClient(LlmClientConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {}

std::string LiveClient::complete(const std::string& prompt) {
  const SplitUrl url = split_url(config_.endpoint);
  httplib::Client client(url.origin);
  client.set_read_timeout(120, 0);
  nlohmann::json body{
      {"model", config_.model_name},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"max_tokens", config_.max_tokens},
      {"temperature", config_.temperature},
  };
  httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) throw LlmTransportError("request to " + config_.endpoint + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw LlmTransportError("endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  try {
    auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw LlmTransportError(std::string("malformed chat-completion response: ") + e.what());
  }
}

}  // namespace scengen
