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

struct Tactic {
  enum class Kind { Intro, Exact, Assumption, Apply, Split, Left, Right, Rfl };

  Kind kind;
  // Hypothesis name for Intro / Exact / Apply; empty otherwise.
  std::string name;

  static Tactic intro(std::string h) { return {Kind::Intro, std::move(h)}; }
  static Tactic exact(std::string h) { return {Kind::Exact, std::move(h)}; }
  static Tactic apply(std::string h) { return {Kind::Apply, std::move(h)}; }
  static Tactic assumption() { return {Kind::Assumption, {}}; }
  static Tactic split() { return {Kind::Split, {}}; }
  static Tactic left() { return {Kind::Left, {}}; }
  static Tactic right() { return {Kind::Right, {}}; }
  static Tactic rfl() { return {Kind::Rfl, {}}; }

  friend bool operator==(const Tactic&, const Tactic&) = default;
};

// Canonical text: `intro h`, `exact h`, `apply h`, `assumption`, `split`,
// `left`, `right`, `rfl`.
std::string render(const Tactic& tactic);

// Surrounding whitespace is ignored and internal runs are collapsed.
// Throws GrammarError on an unknown head or wrong arity.
Tactic parse_tactic(std::string_view text);

// Non-throwing variant; on failure stores the reason in `error` when given.
std::optional<Tactic> try_parse_tactic(std::string_view text, std::string* error = nullptr);

}  // namespace tprover
