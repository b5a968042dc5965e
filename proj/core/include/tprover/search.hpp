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
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "tprover/environment.hpp"
#include "tprover/errors.hpp"
#include "tprover/kernel.hpp"
#include "tprover/policy.hpp"

namespace tprover {

struct SearchBudget {
  std::size_t max_expansions = 100;
  std::size_t candidates_per_node = 8;
  std::size_t max_depth = 10;

  // Throws ConfigError unless every field is positive.
  void validate() const;
};

enum class SearchStatus { Proved, Exhausted, BudgetSpent };

const char* to_string(SearchStatus status);

struct SearchStats {
  std::size_t expansions = 0;
  std::size_t tactic_calls = 0;
  std::size_t grammar_errors = 0;
  std::size_t inapplicable = 0;
  std::size_t duplicates_pruned = 0;
  std::size_t enqueued = 0;

  friend bool operator==(const SearchStats&, const SearchStats&) = default;
};

// `proof` is present iff status is Proved.
struct SearchResult {
  SearchStatus status = SearchStatus::Exhausted;
  std::optional<std::vector<Tactic>> proof;
  SearchStats stats;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

struct SearchNode {
  StateId state;
  std::optional<std::size_t> parent;
  std::optional<Tactic> tactic_from_parent;
  std::size_t depth = 0;
};

struct SearchOptions {
  double temperature = 1.0;
  // Called once per expanded node, in expansion order.
  std::function<void(const SearchNode&)> on_expand;
};

// Raised when the policy fails mid-search; carries the statistics gathered so far.
class SearchPolicyError : public PolicyError {
 public:
  SearchPolicyError(const std::string& message, SearchStats stats) : PolicyError(message), stats_(stats) {}
  const SearchStats& stats() const noexcept { return stats_; }

 private:
  SearchStats stats_;
};

// Breadth-first proof search with a FIFO queue. Each dequeued node asks the
// policy for `candidates_per_node` completions, extracts and parses their
// tactics, deduplicates them, and runs each against the environment:
//   proved    -> return the root-to-node tactic path plus the closing tactic
//   new state -> enqueue unless its state_key was already seen
//   error     -> drop, counting grammar errors and inapplicable tactics
// Nodes at depth max_depth are never enqueued.
SearchResult prove(ProofEnvironment& env, Policy& policy, const SearchBudget& budget, std::uint64_t seed,
                   const SearchOptions& options = {});

// Kernel-backed convenience overload. `root` must have at least one goal.
SearchResult prove(const ProofState& root, Policy& policy, const SearchBudget& budget, std::uint64_t seed,
                   const SearchOptions& options = {});

// Exhaustive breadth-first enumeration over enumerate_applicable with
// canonical-key pruning. Returns a shortest proof of length <= max_depth.
std::optional<std::vector<Tactic>> brute_force_provable(
    const ProofState& root, std::size_t max_depth,
    std::size_t max_hyps = std::numeric_limits<std::size_t>::max());

// True iff replaying `proof` from `root` ends in ProofFinished exactly at the
// last step.
bool replays_to_finished(const ProofState& root, const std::vector<Tactic>& proof);

}  // namespace tprover
