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
#include <vector>

#include "tprover/dataset.hpp"

namespace tprover::testing {

// Completions that break the answer format in twenty distinct ways.
inline std::vector<std::string> malformed_completions() {
  return {
      "",
      "intro h",
      "<think>x</think>",
      "<answer>```lean\nrfl\n```</answer>",
      "<answer>```lean\nrfl\n```</answer><think>x</think>",
      "<think>x</think><answer>rfl</answer>",
      "<think>x</think><answer>```lean\nrfl</answer>",
      "<think>x</think><answer>```python\nrfl\n```</answer>",
      "<think>x</think><answer>```lean\n\n```</answer>",
      "<think>x</think><answer>```lean\nrfl\n```</answer><answer>```lean\nrfl\n```</answer>",
      "<think>a</think><think>b</think><answer>```lean\nrfl\n```</answer>",
      "prefix <think>x</think><answer>```lean\nrfl\n```</answer>",
      "<think>x</think><answer>```lean\nrfl\n```</answer> suffix",
      "<think>x</think> between <answer>```lean\nrfl\n```</answer>",
      "<think>x<answer>```lean\nrfl\n```</answer>",
      "<think>x</think><answer>```lean\nrfl\n```",
      "<think>x</think><answer>text ```lean\nrfl\n```</answer>",
      "<think>x</think><answer>```lean\nrfl\n``` text</answer>",
      "<think>x</think><answer>```lean\nrfl\n```\n```lean\nrfl\n```</answer>",
      "<THINK>x</THINK><ANSWER>```lean\nrfl\n```</ANSWER>",
  };
}

// Adaption or reinforce records for every reference step of the given theorems.
inline std::vector<SampleRecord> records_for(const std::vector<ToyTheorem>& theorems, DatasetKind kind) {
  std::vector<std::pair<ProofState, Tactic>> pairs;
  for (const auto& th : theorems) {
    for (auto& p : extract_pairs(th)) pairs.push_back(std::move(p));
  }
  StubThoughtGenerator stub;
  std::vector<std::string> thoughts;
  for (const auto& [state, tactic] : pairs) thoughts.push_back(generate_thought(state, tactic, stub));
  return build_records(pairs, thoughts, kind);
}

}  // namespace tprover::testing
