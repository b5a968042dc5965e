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

#include "tprover/kernel.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "tprover/errors.hpp"

namespace tprover {

namespace {

constexpr std::string_view kTurnstile = "\xE2\x8A\xA2";  // ⊢

TacticOutcome close_first_goal(const ProofState& state) {
  if (state.goals.size() == 1) return ProofFinished{};
  ProofState next;
  next.goals.assign(state.goals.begin() + 1, state.goals.end());
  return NewState{std::move(next)};
}

TacticOutcome replace_first_goal(const ProofState& state, std::vector<Goal> replacement) {
  ProofState next;
  next.goals = std::move(replacement);
  next.goals.insert(next.goals.end(), state.goals.begin() + 1, state.goals.end());
  return NewState{std::move(next)};
}

TacticError inapplicable(std::string message) {
  return TacticError{ErrorKind::InapplicableTactic, std::move(message)};
}

bool some_hypothesis_matches(const Goal& goal) {
  return std::any_of(goal.hypotheses.begin(), goal.hypotheses.end(),
                     [&](const Hypothesis& h) { return h.formula == goal.target; });
}

bool apply_precondition(const Goal& goal, const Formula& hyp) {
  return hyp.kind() == Formula::Kind::Imp && hyp.rhs() == goal.target && !(hyp.lhs() == goal.target);
}

bool is_reflexive(const Formula& f) {
  return f.kind() == Formula::Kind::Eq && f.left_term() == f.right_term();
}

void render_goal(const Goal& goal, std::string& out) {
  for (const auto& h : goal.hypotheses) {
    out += h.name;
    out += " : ";
    out += render(h.formula);
    out += '\n';
  }
  out += kTurnstile;
  out += ' ';
  out += render(goal.target);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

// Returns the remainder after a turnstile, or nullopt when the line has none.
std::optional<std::string_view> strip_turnstile(std::string_view line) {
  line = trim(line);
  if (line.substr(0, kTurnstile.size()) == kTurnstile) return line.substr(kTurnstile.size());
  if (line.substr(0, 2) == "|-") return line.substr(2);
  return std::nullopt;
}

bool is_goal_header(std::string_view line) {
  line = trim(line);
  if (line.substr(0, 5) != "goal ") return false;
  const auto rest = line.substr(5);
  const auto slash = rest.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == rest.size()) return false;
  auto digits = [](std::string_view d) {
    return std::all_of(d.begin(), d.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  return digits(rest.substr(0, slash)) && digits(rest.substr(slash + 1));
}

Goal parse_goal_block(const std::vector<std::string_view>& lines, std::size_t offset) {
  Goal goal{{}, Formula::atom("_")};
  bool have_target = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (have_target) throw ParseError("text after goal target", offset);
    if (auto rest = strip_turnstile(line)) {
      goal.target = parse_formula(*rest);
      have_target = true;
      continue;
    }
    const auto colon = line.find(" : ");
    if (colon == std::string_view::npos) throw ParseError("expected 'name : formula'", offset);
    const auto name = trim(line.substr(0, colon));
    if (!is_identifier(name)) throw ParseError("invalid hypothesis name", offset);
    if (goal.find(name)) throw ParseError("duplicate hypothesis name", offset);
    goal.hypotheses.push_back({std::string(name), parse_formula(line.substr(colon + 3))});
  }
  if (!have_target) throw ParseError("goal without target", offset);
  return goal;
}

}  // namespace

const Hypothesis* Goal::find(std::string_view name) const {
  for (const auto& h : hypotheses) {
    if (h.name == name) return &h;
  }
  return nullptr;
}

std::string fresh_hypothesis_name(const Goal& goal) {
  for (std::size_t k = goal.hypotheses.size() + 1;; ++k) {
    std::string candidate = "h" + std::to_string(k);
    if (!goal.find(candidate)) return candidate;
  }
}

TacticOutcome apply_tactic(const ProofState& state, const Tactic& tactic) {
  if (state.goals.empty()) return inapplicable("no goals");
  const Goal& goal = state.goals.front();
  const Formula& target = goal.target;

  switch (tactic.kind) {
    case Tactic::Kind::Intro: {
      if (target.kind() != Formula::Kind::Imp) return inapplicable("intro: target is not an implication");
      if (goal.find(tactic.name)) return inapplicable("intro: name '" + tactic.name + "' already in use");
      Goal next = goal;
      next.hypotheses.push_back({tactic.name, target.lhs()});
      next.target = target.rhs();
      return replace_first_goal(state, {std::move(next)});
    }
    case Tactic::Kind::Exact: {
      const Hypothesis* h = goal.find(tactic.name);
      if (!h) return inapplicable("exact: unknown hypothesis '" + tactic.name + "'");
      if (!(h->formula == target)) return inapplicable("exact: type mismatch");
      return close_first_goal(state);
    }
    case Tactic::Kind::Assumption:
      if (!some_hypothesis_matches(goal)) return inapplicable("assumption: no matching hypothesis");
      return close_first_goal(state);
    case Tactic::Kind::Apply: {
      const Hypothesis* h = goal.find(tactic.name);
      if (!h) return inapplicable("apply: unknown hypothesis '" + tactic.name + "'");
      if (!apply_precondition(goal, h->formula)) return inapplicable("apply: conclusion does not match target");
      Goal next = goal;
      next.target = h->formula.lhs();
      return replace_first_goal(state, {std::move(next)});
    }
    case Tactic::Kind::Split: {
      if (target.kind() != Formula::Kind::And) return inapplicable("split: target is not a conjunction");
      Goal a = goal;
      a.target = target.lhs();
      Goal b = goal;
      b.target = target.rhs();
      return replace_first_goal(state, {std::move(a), std::move(b)});
    }
    case Tactic::Kind::Left:
    case Tactic::Kind::Right: {
      if (target.kind() != Formula::Kind::Or) return inapplicable("left/right: target is not a disjunction");
      Goal next = goal;
      next.target = tactic.kind == Tactic::Kind::Left ? target.lhs() : target.rhs();
      return replace_first_goal(state, {std::move(next)});
    }
    case Tactic::Kind::Rfl:
      if (!is_reflexive(target)) return inapplicable("rfl: sides are not syntactically equal");
      return close_first_goal(state);
  }
  return inapplicable("unknown tactic");
}

std::string render_state(const ProofState& state) {
  if (state.goals.empty()) return "no goals";
  std::string out;
  const std::size_t n = state.goals.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (n > 1) {
      if (i > 0) out += "\n\n";
      out += "goal " + std::to_string(i + 1) + "/" + std::to_string(n) + "\n";
    }
    render_goal(state.goals[i], out);
  }
  return out;
}

ProofState parse_state(std::string_view text) {
  const auto body = trim(text);
  if (body == "no goals") return {};
  if (body.empty()) throw ParseError("empty state", 0);

  ProofState state;
  const auto lines = split_lines(body);
  // Single-line statement without a turnstile.
  if (lines.size() == 1 && !strip_turnstile(lines[0])) {
    return ProofState::from_statement(parse_formula(lines[0]));
  }

  std::vector<std::string_view> block;
  std::size_t offset = 0;
  std::size_t block_offset = 0;
  auto flush = [&] {
    if (block.empty()) return;
    state.goals.push_back(parse_goal_block(block, block_offset));
    block.clear();
  };
  for (const auto line : lines) {
    if (trim(line).empty()) {
      flush();
    } else if (is_goal_header(line)) {
      flush();
      block_offset = offset + line.size() + 1;
    } else {
      if (block.empty()) block_offset = offset;
      block.push_back(line);
    }
    offset += line.size() + 1;
  }
  flush();
  return state;
}

std::string canonical_key(const ProofState& state) {
  std::map<std::string, std::string> renaming;
  ProofState renamed = state;
  for (auto& goal : renamed.goals) {
    for (auto& h : goal.hypotheses) {
      auto [it, inserted] = renaming.try_emplace(h.name, "h" + std::to_string(renaming.size() + 1));
      h.name = it->second;
    }
  }
  return render_state(renamed);
}

std::vector<Tactic> enumerate_applicable(const ProofState& state, std::size_t max_hyps) {
  std::vector<Tactic> out;
  if (state.goals.empty()) return out;
  const Goal& goal = state.goals.front();
  const auto& hyps = goal.hypotheses;
  const std::size_t slots = std::min(max_hyps, hyps.size());
  const Formula& target = goal.target;

  if (target.kind() == Formula::Kind::Imp) out.push_back(Tactic::intro(fresh_hypothesis_name(goal)));
  for (std::size_t i = 0; i < slots; ++i) {
    if (hyps[i].formula == target) out.push_back(Tactic::exact(hyps[i].name));
  }
  if (some_hypothesis_matches(goal)) out.push_back(Tactic::assumption());
  for (std::size_t i = 0; i < slots; ++i) {
    if (apply_precondition(goal, hyps[i].formula)) out.push_back(Tactic::apply(hyps[i].name));
  }
  if (target.kind() == Formula::Kind::And) out.push_back(Tactic::split());
  if (target.kind() == Formula::Kind::Or) {
    out.push_back(Tactic::left());
    out.push_back(Tactic::right());
  }
  if (is_reflexive(target)) out.push_back(Tactic::rfl());
  return out;
}

}  // namespace tprover
