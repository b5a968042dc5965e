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

#include "tprover/search.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "tprover/prompt.hpp"
#include "tprover/reward.hpp"
#include "tprover/rng.hpp"

namespace tprover {

void SearchBudget::validate() const {
  if (max_expansions == 0 || candidates_per_node == 0 || max_depth == 0) {
    throw ConfigError("search budget fields must be positive");
  }
}

const char* to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::Proved:
      return "proved";
    case SearchStatus::Exhausted:
      return "exhausted";
    case SearchStatus::BudgetSpent:
      return "budget_spent";
  }
  return "unknown";
}

namespace {

std::vector<Tactic> path_to(const std::vector<SearchNode>& nodes, std::size_t index) {
  std::vector<Tactic> path;
  for (std::optional<std::size_t> i = index; i && nodes[*i].tactic_from_parent; i = nodes[*i].parent) {
    path.push_back(*nodes[*i].tactic_from_parent);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

SearchResult prove(ProofEnvironment& env, Policy& policy, const SearchBudget& budget, std::uint64_t seed,
                   const SearchOptions& options) {
  budget.validate();
  SearchResult result;
  auto& stats = result.stats;

  std::vector<SearchNode> nodes;
  std::deque<std::size_t> queue;
  std::unordered_set<std::string> seen;

  nodes.push_back({env.root(), std::nullopt, std::nullopt, 0});
  seen.insert(env.state_key(env.root()));
  queue.push_back(0);

  while (!queue.empty()) {
    if (stats.expansions >= budget.max_expansions) {
      result.status = SearchStatus::BudgetSpent;
      return result;
    }
    const std::size_t index = queue.front();
    queue.pop_front();
    const SearchNode node = nodes[index];
    ++stats.expansions;
    if (options.on_expand) options.on_expand(node);

    std::vector<Completion> candidates;
    try {
      candidates = policy.sample(build_prompt(env.state_text(node.state)), budget.candidates_per_node,
                                 options.temperature, mix_seed(seed, stats.expansions - 1));
    } catch (const PolicyError& e) {
      throw SearchPolicyError(e.what(), stats);
    }

    std::set<std::string> tried;
    for (const auto& candidate : candidates) {
      const auto parsed = try_parse_completion(candidate.text);
      const auto tactic = parsed ? try_parse_tactic(parsed->answer_tactic) : std::nullopt;
      if (!tactic) {
        ++stats.grammar_errors;
        continue;
      }
      const std::string text = render(*tactic);
      if (!tried.insert(text).second) continue;

      ++stats.tactic_calls;
      const StepResult step = env.run_tac(node.state, text);
      switch (step.status) {
        case StepStatus::Proved: {
          auto proof = path_to(nodes, index);
          proof.push_back(*tactic);
          result.status = SearchStatus::Proved;
          result.proof = std::move(proof);
          return result;
        }
        case StepStatus::Error:
          if (step.error == ErrorKind::GrammarError) {
            ++stats.grammar_errors;
          } else {
            ++stats.inapplicable;
          }
          break;
        case StepStatus::NewState: {
          const std::size_t depth = node.depth + 1;
          if (depth >= budget.max_depth) break;
          if (!seen.insert(env.state_key(step.state)).second) {
            ++stats.duplicates_pruned;
            break;
          }
          nodes.push_back({step.state, index, *tactic, depth});
          queue.push_back(nodes.size() - 1);
          ++stats.enqueued;
          break;
        }
      }
    }
  }
  result.status = SearchStatus::Exhausted;
  return result;
}

SearchResult prove(const ProofState& root, Policy& policy, const SearchBudget& budget, std::uint64_t seed,
                   const SearchOptions& options) {
  if (root.goals.empty()) throw std::invalid_argument("prove: root state has no goals");
  KernelEnvironment env(root);
  return prove(env, policy, budget, seed, options);
}

std::optional<std::vector<Tactic>> brute_force_provable(const ProofState& root, std::size_t max_depth,
                                                        std::size_t max_hyps) {
  if (root.goals.empty()) return std::vector<Tactic>{};
  struct Entry {
    ProofState state;
    std::vector<Tactic> path;
  };
  std::deque<Entry> frontier;
  std::unordered_set<std::string> seen{canonical_key(root)};
  frontier.push_back({root, {}});
  while (!frontier.empty()) {
    Entry entry = std::move(frontier.front());
    frontier.pop_front();
    if (entry.path.size() >= max_depth) continue;
    for (const auto& tactic : enumerate_applicable(entry.state, max_hyps)) {
      auto outcome = apply_tactic(entry.state, tactic);
      if (std::holds_alternative<ProofFinished>(outcome)) {
        entry.path.push_back(tactic);
        return entry.path;
      }
      auto* next = std::get_if<NewState>(&outcome);
      if (!next || !seen.insert(canonical_key(next->state)).second) continue;
      auto path = entry.path;
      path.push_back(tactic);
      frontier.push_back({std::move(next->state), std::move(path)});
    }
  }
  return std::nullopt;
}

bool replays_to_finished(const ProofState& root, const std::vector<Tactic>& proof) {
  ProofState state = root;
  for (std::size_t i = 0; i < proof.size(); ++i) {
    auto outcome = apply_tactic(state, proof[i]);
    if (std::holds_alternative<ProofFinished>(outcome)) return i + 1 == proof.size();
    auto* next = std::get_if<NewState>(&outcome);
    if (!next) return false;
    state = std::move(next->state);
  }
  return false;
}

}  // namespace tprover
