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

#include <optional>
#include <string>
#include <string_view>

namespace tprover {

// The <think>/<answer> split of a completion. `answer_tactic` is the
// normalised inner text of the single ```lean fence and is never empty.
struct ParsedCompletion {
  std::string think;
  std::string answer_tactic;
};

struct RewardWeights {
  double accuracy = 1.0;
  double format = 0.5;
};

struct RewardBreakdown {
  int format = 0;
  int accuracy = 0;
  double total = 0.0;
};

// Accepts exactly
//   ws* <think>…</think> ws* <answer> ws* ```lean…``` ws* </answer> ws*
// with a single occurrence of every tag and fence. Throws FormatError naming
// the first violated rule.
ParsedCompletion parse_completion(std::string_view text);

std::optional<ParsedCompletion> try_parse_completion(std::string_view text, std::string* reason = nullptr);

// Trim, collapse whitespace runs to one space, drop trailing semicolons.
// Idempotent.
std::string normalize_tactic(std::string_view text);

int format_reward(std::string_view text);

// 1 iff the completion parses and its tactic matches `groundtruth` after
// normalisation on both sides.
int accuracy_reward(std::string_view text, std::string_view groundtruth);

// total = w_acc * accuracy + w_fmt * format. Throws ConfigError for negative weights.
RewardBreakdown total_reward(std::string_view text, std::string_view groundtruth, const RewardWeights& weights = {});

// The wrapper the policies use around a bare tactic.
std::string wrap_completion(std::string_view thought, std::string_view tactic);

}  // namespace tprover
