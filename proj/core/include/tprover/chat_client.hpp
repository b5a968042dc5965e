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

#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

#include "tprover/prompt.hpp"

namespace tprover {

// OpenAI-style chat-completions endpoint, e.g.
// http://localhost:11434/v1/chat/completions for a local Ollama server.
struct EndpointConfig {
  std::string url;
  std::string model;
  std::string api_key;  // sent as a bearer token when non-empty
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8000};
  int max_tokens = 512;
};

// Blocking client. Transport errors, 429 and 5xx replies are retried with
// exponential backoff; everything else fails immediately with PolicyError.
class ChatClient {
 public:
  explicit ChatClient(EndpointConfig config);

  // Returns choices[].message.content in choice order.
  std::vector<std::string> complete(const std::vector<Message>& messages, std::size_t n, double temperature) const;

  const EndpointConfig& config() const noexcept { return config_; }

 private:
  EndpointConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

}  // namespace tprover
