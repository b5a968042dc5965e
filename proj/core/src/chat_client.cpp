// Copyright 2026 The tprover Authors. All Rights Reserved.
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

#include "tprover/chat_client.hpp"

#include <httplib.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <thread>

#include "tprover/errors.hpp"

namespace tprover {

namespace {

using nlohmann::json;

struct Attempt {
  bool ok = false;
  bool retryable = false;
  std::string body;
  std::string error;
};

}  // namespace

ChatClient::ChatClient(EndpointConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint url must start with http:// or https://");
  const auto scheme = config_.url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported endpoint scheme '" + scheme + "'");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw ConfigError("this build has no TLS support; use an http:// endpoint");
#endif
  const auto path_start = config_.url.find('/', scheme_end + 3);
  scheme_host_port_ = config_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.url.substr(path_start);
  if (config_.max_retries < 0) throw ConfigError("max_retries must be non-negative");
}

std::vector<std::string> ChatClient::complete(const std::vector<Message>& messages, std::size_t n,
                                              double temperature) const {
  json request{{"model", config_.model},
               {"messages", json::array()},
               {"n", n},
               {"temperature", temperature},
               {"max_tokens", config_.max_tokens}};
  for (const auto& m : messages) request["messages"].push_back({{"role", m.role}, {"content", m.content}});
  const std::string payload = request.dump();

  auto attempt_once = [&]() {
    Attempt a;
    httplib::Client cli(scheme_host_port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    auto res = cli.Post(path_, headers, payload, "application/json");
    if (!res) {
      a.retryable = true;
      a.error = "transport error: " + httplib::to_string(res.error());
      return a;
    }
    if (res->status < 200 || res->status >= 300) {
      a.retryable = res->status == 429 || res->status >= 500;
      a.error = "HTTP " + std::to_string(res->status);
      return a;
    }
    a.ok = true;
    a.body = res->body;
    return a;
  };

  Attempt last;
  auto backoff = config_.initial_backoff;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    last = attempt_once();
    if (last.ok || !last.retryable) break;
    if (attempt < config_.max_retries) {
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, config_.max_backoff);
    }
  }
  if (!last.ok) throw PolicyError("chat endpoint " + config_.url + ": " + last.error);

  std::vector<std::string> out;
  try {
    const json response = json::parse(last.body);
    const auto& choices = response.at("choices");
    if (!choices.is_array() || choices.empty()) throw PolicyError("chat endpoint returned no choices");
    for (const auto& choice : choices) out.push_back(choice.at("message").at("content").get<std::string>());
  } catch (const json::exception& e) {
    throw PolicyError(std::string("malformed chat response: ") + e.what());
  }
  return out;
}

}  // namespace tprover
