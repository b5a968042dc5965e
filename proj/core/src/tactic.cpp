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

#include "tprover/tactic.hpp"

#include <array>
#include <cctype>
#include <vector>

#include "tprover/errors.hpp"
#include "tprover/formula.hpp"

namespace tprover {

namespace {

struct HeadInfo {
  std::string_view head;
  Tactic::Kind kind;
  bool takes_name;
};

constexpr std::array<HeadInfo, 8> kHeads{{
    {"intro", Tactic::Kind::Intro, true},
    {"exact", Tactic::Kind::Exact, true},
    {"assumption", Tactic::Kind::Assumption, false},
    {"apply", Tactic::Kind::Apply, true},
    {"split", Tactic::Kind::Split, false},
    {"left", Tactic::Kind::Left, false},
    {"right", Tactic::Kind::Right, false},
    {"rfl", Tactic::Kind::Rfl, false},
}};

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

}  // namespace

std::string render(const Tactic& tactic) {
  for (const auto& h : kHeads) {
    if (h.kind != tactic.kind) continue;
    std::string out(h.head);
    if (h.takes_name) {
      out += ' ';
      out += tactic.name;
    }
    return out;
  }
  return {};
}

std::optional<Tactic> try_parse_tactic(std::string_view text, std::string* error) {
  auto fail = [error](std::string msg) -> std::optional<Tactic> {
    if (error) *error = std::move(msg);
    return std::nullopt;
  };
  const auto words = split_words(text);
  if (words.empty()) return fail("empty tactic");
  for (const auto& h : kHeads) {
    if (h.head != words.front()) continue;
    const std::size_t want = h.takes_name ? 2 : 1;
    if (words.size() != want) {
      return fail("wrong number of arguments for '" + std::string(h.head) + "'");
    }
    if (!h.takes_name) return Tactic{h.kind, {}};
    if (!is_identifier(words[1])) return fail("invalid hypothesis name '" + std::string(words[1]) + "'");
    return Tactic{h.kind, std::string(words[1])};
  }
  return fail("unknown tactic '" + std::string(words.front()) + "'");
}

Tactic parse_tactic(std::string_view text) {
  std::string error;
  auto t = try_parse_tactic(text, &error);
  if (!t) throw GrammarError(error);
  return *std::move(t);
}

}  // namespace tprover
