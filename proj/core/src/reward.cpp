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

#include "tprover/reward.hpp"

#include <cctype>

#include "tprover/errors.hpp"

namespace tprover {

namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";
constexpr std::string_view kFence = "```";
constexpr std::string_view kLeanFence = "```lean";

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::size_t count(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string_view skip_space(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  return s.substr(b);
}

std::optional<std::string> check_tag_count(std::string_view text, std::string_view tag, const char* block) {
  const auto n = count(text, tag);
  if (n == 1) return std::nullopt;
  if (n == 0) return std::string(tag.substr(1, 1) == "/" ? "unterminated " : "missing ") + block + " block";
  return std::string("multiple ") + block + " blocks";
}

}  // namespace

std::string normalize_tactic(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : trim(text)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  // The whole trailing run of semicolons goes, so normalising twice changes nothing.
  while (!out.empty() && (out.back() == ';' || out.back() == ' ')) out.pop_back();
  return out;
}

std::optional<ParsedCompletion> try_parse_completion(std::string_view text, std::string* reason) {
  auto fail = [reason](std::string why) -> std::optional<ParsedCompletion> {
    if (reason) *reason = std::move(why);
    return std::nullopt;
  };

  if (auto e = check_tag_count(text, kThinkOpen, "think")) return fail(*e);
  if (auto e = check_tag_count(text, kThinkClose, "think")) return fail(*e);
  if (auto e = check_tag_count(text, kAnswerOpen, "answer")) return fail(*e);
  if (auto e = check_tag_count(text, kAnswerClose, "answer")) return fail(*e);

  std::string_view rest = skip_space(text);
  if (rest.substr(0, kThinkOpen.size()) != kThinkOpen) return fail("text before think block");
  rest.remove_prefix(kThinkOpen.size());
  const auto think_end = rest.find(kThinkClose);
  if (think_end == std::string_view::npos) return fail("unterminated think block");
  const std::string_view think = rest.substr(0, think_end);
  if (think.find(kAnswerOpen) != std::string_view::npos || think.find(kAnswerClose) != std::string_view::npos) {
    return fail("answer block inside think block");
  }
  rest = skip_space(rest.substr(think_end + kThinkClose.size()));
  if (rest.substr(0, kAnswerOpen.size()) != kAnswerOpen) return fail("text between think and answer blocks");
  rest.remove_prefix(kAnswerOpen.size());
  const auto answer_end = rest.find(kAnswerClose);
  if (answer_end == std::string_view::npos) return fail("unterminated answer block");
  const std::string_view answer = trim(rest.substr(0, answer_end));
  if (!trim(rest.substr(answer_end + kAnswerClose.size())).empty()) return fail("text after answer block");

  const auto fences = count(answer, kFence);
  if (fences == 0) return fail("missing lean fence");
  if (fences == 1) return fail("unterminated lean fence");
  if (fences > 2) return fail("multiple fenced blocks");
  if (answer.substr(0, kLeanFence.size()) != kLeanFence) return fail("text before lean fence");
  std::string_view body = answer.substr(kLeanFence.size());
  if (body.empty() || !is_space(body.front())) return fail("fence is not tagged lean");
  if (body.size() < kFence.size() || body.substr(body.size() - kFence.size()) != kFence) {
    return fail("text after lean fence");
  }
  body = body.substr(0, body.size() - kFence.size());

  ParsedCompletion parsed{std::string(think), normalize_tactic(body)};
  if (parsed.answer_tactic.empty()) return fail("empty tactic");
  return parsed;
}

ParsedCompletion parse_completion(std::string_view text) {
  std::string reason;
  auto parsed = try_parse_completion(text, &reason);
  if (!parsed) throw FormatError(reason);
  return *std::move(parsed);
}

int format_reward(std::string_view text) { return try_parse_completion(text) ? 1 : 0; }

int accuracy_reward(std::string_view text, std::string_view groundtruth) {
  const auto parsed = try_parse_completion(text);
  if (!parsed) return 0;
  return parsed->answer_tactic == normalize_tactic(groundtruth) ? 1 : 0;
}

RewardBreakdown total_reward(std::string_view text, std::string_view groundtruth, const RewardWeights& weights) {
  if (weights.accuracy < 0.0 || weights.format < 0.0) throw ConfigError("reward weights must be non-negative");
  RewardBreakdown r;
  const auto parsed = try_parse_completion(text);
  r.format = parsed ? 1 : 0;
  r.accuracy = parsed && parsed->answer_tactic == normalize_tactic(groundtruth) ? 1 : 0;
  r.total = weights.accuracy * r.accuracy + weights.format * r.format;
  return r;
}

std::string wrap_completion(std::string_view thought, std::string_view tactic) {
  std::string out;
  out.reserve(thought.size() + tactic.size() + 48);
  out += kThinkOpen;
  out += thought;
  out += kThinkClose;
  out += "\n";
  out += kAnswerOpen;
  out += kLeanFence;
  out += "\n";
  out += tactic;
  out += "\n";
  out += kFence;
  out += kAnswerClose;
  return out;
}

}  // namespace tprover
