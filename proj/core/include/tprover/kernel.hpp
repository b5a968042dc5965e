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

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tprover/formula.hpp"
#include "tprover/tactic.hpp"

namespace tprover {

struct Hypothesis {
  std::string name;
  Formula formula;

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

// Hypothesis names are unique within a goal.
struct Goal {
  std::vector<Hypothesis> hypotheses;
  Formula target;

  const Hypothesis* find(std::string_view name) const;

  friend bool operator==(const Goal&, const Goal&) = default;
};

// Ordered open goals. No goals means the theorem is proved.
struct ProofState {
  std::vector<Goal> goals;

  bool finished() const noexcept { return goals.empty(); }
  static ProofState from_statement(Formula target) { return ProofState{{Goal{{}, std::move(target)}}}; }

  friend bool operator==(const ProofState&, const ProofState&) = default;
};

enum class ErrorKind { GrammarError, InapplicableTactic };

struct ProofFinished {
  friend bool operator==(const ProofFinished&, const ProofFinished&) = default;
};

struct NewState {
  ProofState state;
  friend bool operator==(const NewState&, const NewState&) = default;
};

struct TacticError {
  ErrorKind kind;
  std::string message;
  friend bool operator==(const TacticError&, const TacticError&) = default;
};

using TacticOutcome = std::variant<ProofFinished, NewState, TacticError>;

// Applies `tactic` to the first goal. Pure: identical inputs give identical
// outcomes. Never produces GrammarError (the tactic is already parsed).
TacticOutcome apply_tactic(const ProofState& state, const Tactic& tactic);

// `name : formula` per hypothesis then `⊢ target`. Several goals are each
// prefixed with a `goal k/n` header and separated by a blank line. An empty
// state renders as `no goals`.
std::string render_state(const ProofState& state);

// Inverse of render_state. Also accepts a bare statement with an optional
// leading `⊢` (or `|-`). Throws ParseError.
ProofState parse_state(std::string_view text);

// render_state with hypotheses renamed to h1..hn in order of first appearance.
std::string canonical_key(const ProofState& state);

// `h{k}` for the smallest k > |hypotheses| not already taken in `goal`.
std::string fresh_hypothesis_name(const Goal& goal);

// Every instance of the template set {intro (fresh), exact h_i, assumption,
// apply h_i, split, left, right, rfl} whose precondition holds on the first
// goal, for hypothesis slots i <= max_hyps, in that order.
std::vector<Tactic> enumerate_applicable(const ProofState& state, std::size_t max_hyps);

}  // namespace tprover
