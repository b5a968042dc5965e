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

#include <string>
#include <string_view>
#include <vector>

#include "tprover/kernel.hpp"

namespace tprover {

struct Message {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;

  friend bool operator==(const Message&, const Message&) = default;
};

// Conversation-format prompt; the first message is the system prompt.
struct Prompt {
  std::vector<Message> messages;

  friend bool operator==(const Prompt&, const Prompt&) = default;
};

// System prompt instructing the <think>/<answer> output format.
extern const std::string_view kSystemPrompt;

// Instruction sent to the thought-generation endpoint ahead of the state and
// the reference tactic.
extern const std::string_view kThoughtPrompt;

// Header line preceding the rendered state in the user message.
extern const std::string_view kStateHeader;

// System prompt plus a user message `Current state:\n<render_state(state)>`.
Prompt build_prompt(const ProofState& state);

// Same, from an already rendered state (e.g. one reported by an external prover).
Prompt build_prompt(std::string_view rendered_state);

// Recovers the proof state from the last user message of a prompt built by
// build_prompt. Throws ParseError when the message does not carry one.
ProofState state_from_prompt(const Prompt& prompt);

}  // namespace tprover
