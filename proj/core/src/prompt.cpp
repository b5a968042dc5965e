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

#include "tprover/prompt.hpp"

#include "tprover/errors.hpp"

namespace tprover {

const std::string_view kSystemPrompt =
    "You need to complete the proof in Lean4. Please think carefully and provide the next step based on "
    "the current state. The format should be:\n<think>Your thought process</think>\n<answer>```lean \n "
    "Your strategy\n```</answer>";

const std::string_view kThoughtPrompt =
    "Read the following Lean4 theorem proving process, analyze the proposition to be proved and the "
    "available conditions, and provide the next tactic. Note that a reference next tactic is provided; do "
    "not assume prior knowledge of this reference";

const std::string_view kStateHeader = "Current state:";

Prompt build_prompt(std::string_view rendered_state) {
  Prompt p;
  p.messages.push_back({"system", std::string(kSystemPrompt)});
  p.messages.push_back({"user", std::string(kStateHeader) + "\n" + std::string(rendered_state)});
  return p;
}

Prompt build_prompt(const ProofState& state) { return build_prompt(render_state(state)); }

ProofState state_from_prompt(const Prompt& prompt) {
  for (auto it = prompt.messages.rbegin(); it != prompt.messages.rend(); ++it) {
    if (it->role != "user") continue;
    const std::string_view content = it->content;
    if (content.substr(0, kStateHeader.size()) != kStateHeader) {
      throw ParseError("user message does not start with the state header", 0);
    }
    return parse_state(content.substr(kStateHeader.size()));
  }
  throw ParseError("prompt has no user message", 0);
}

}  // namespace tprover
