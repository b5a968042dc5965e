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

#include "tprover/policy.hpp"

#include <algorithm>
#include <cmath>

#include "tprover/errors.hpp"
#include "tprover/reward.hpp"
#include "tprover/rng.hpp"

namespace tprover {

const std::string_view kPlaceholderThought = "Choose the next tactic for the current goal.";

FeatureVector featurize(const ProofState& state) {
  FeatureVector x = FeatureVector::Zero();
  if (state.goals.empty()) return x;
  const Goal& goal = state.goals.front();
  const Formula& target = goal.target;
  switch (target.kind()) {
    case Formula::Kind::Atom:
      x[feature::kAtom] = 1.0;
      break;
    case Formula::Kind::Imp:
      x[feature::kImp] = 1.0;
      break;
    case Formula::Kind::And:
      x[feature::kAnd] = 1.0;
      break;
    case Formula::Kind::Or:
      x[feature::kOr] = 1.0;
      break;
    case Formula::Kind::Eq:
      x[feature::kEq] = 1.0;
      if (target.left_term() == target.right_term()) x[feature::kReflexive] = 1.0;
      break;
  }
  const auto& hyps = goal.hypotheses;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const Formula& f = hyps[i].formula;
    if (f == target) x[feature::kHypMatch] = 1.0;
    if (i < kHypothesisSlots && f.kind() == Formula::Kind::Imp && f.rhs() == target) {
      x[feature::kApplySlot0 + static_cast<int>(i)] = 1.0;
    }
  }
  x[feature::kHypCount] = static_cast<double>(std::min(hyps.size(), kHypothesisSlots)) / kHypothesisSlots;
  x[feature::kBias] = 1.0;
  return x;
}

std::string render_action(int a, const Goal& goal) {
  auto slot_name = [&goal](int slot) {
    const auto i = static_cast<std::size_t>(slot);
    return i < goal.hypotheses.size() ? goal.hypotheses[i].name : "h" + std::to_string(slot + 1);
  };
  if (a == action::kIntro) return "intro " + fresh_hypothesis_name(goal);
  if (a >= action::kExact0 && a < action::kExact0 + 4) return "exact " + slot_name(a - action::kExact0);
  if (a >= action::kApply0 && a < action::kApply0 + 4) return "apply " + slot_name(a - action::kApply0);
  switch (a) {
    case action::kSplit:
      return "split";
    case action::kLeft:
      return "left";
    case action::kRight:
      return "right";
    case action::kRfl:
      return "rfl";
    default:
      throw std::out_of_range("action index " + std::to_string(a));
  }
}

std::optional<int> action_for_tactic(const Tactic& tactic, const Goal& goal) {
  const std::string text = render(tactic);
  for (int a = 0; a < kActionDim; ++a) {
    if (render_action(a, goal) == text) return a;
  }
  return std::nullopt;
}

ActionVector action_logits(const PolicyParams& params, const FeatureVector& features, double temperature) {
  return (params.weights.transpose() * features) / temperature;
}

ActionVector action_log_probs(const PolicyParams& params, const FeatureVector& features, double temperature) {
  const ActionVector z = action_logits(params, features, temperature);
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  return z.array() - lse;
}

ActionVector action_probs(const PolicyParams& params, const FeatureVector& features, double temperature) {
  return action_log_probs(params, features, temperature).array().exp();
}

double logprob(const PolicyParams& params, const FeatureVector& features, int a, double temperature) {
  return action_log_probs(params, features, temperature)[a];
}

WeightMatrix grad_logprob(const PolicyParams& params, const FeatureVector& features, int a, double temperature) {
  ActionVector delta = -action_probs(params, features, temperature);
  delta[a] += 1.0;
  return features * delta.transpose() / temperature;
}

ScriptedPolicy::ScriptedPolicy(std::vector<std::string> texts, bool wrap) : texts_(std::move(texts)), wrap_(wrap) {
  if (texts_.empty()) throw ConfigError("scripted policy needs at least one text");
}

std::vector<Completion> ScriptedPolicy::sample(const Prompt&, std::size_t n, double, std::uint64_t) {
  std::vector<Completion> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = texts_[i % texts_.size()];
    out.push_back({wrap_ ? wrap_completion(kPlaceholderThought, t) : t, std::nullopt, std::nullopt});
  }
  return out;
}

std::vector<Completion> ExhaustivePolicy::sample(const Prompt& prompt, std::size_t n, double, std::uint64_t) {
  const auto tactics = enumerate_applicable(state_from_prompt(prompt), max_hyps_);
  std::vector<Completion> out;
  if (tactics.empty()) return out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({wrap_completion(kPlaceholderThought, render(tactics[i % tactics.size()])), std::nullopt,
                   std::nullopt});
  }
  return out;
}

std::vector<Completion> SoftmaxPolicy::sample(const Prompt& prompt, std::size_t n, double temperature,
                                              std::uint64_t seed) {
  return sample_state(state_from_prompt(prompt), n, temperature, seed);
}

std::vector<Completion> SoftmaxPolicy::sample_state(const ProofState& state, std::size_t n, double temperature,
                                                    std::uint64_t seed) const {
  if (state.goals.empty()) throw PolicyError("cannot sample for a finished state");
  const Goal& goal = state.goals.front();
  const ActionVector log_probs = action_log_probs(params_, featurize(state), temperature);
  const ActionVector probs = log_probs.array().exp();
  Rng rng(seed);
  std::vector<Completion> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    int picked = kActionDim - 1;
    double cumulative = 0.0;
    for (int a = 0; a < kActionDim; ++a) {
      cumulative += probs[a];
      if (u < cumulative) {
        picked = a;
        break;
      }
    }
    out.push_back({wrap_completion(kPlaceholderThought, render_action(picked, goal)), log_probs[picked], picked});
  }
  return out;
}

std::vector<Completion> RemotePolicy::sample(const Prompt& prompt, std::size_t n, double temperature,
                                             std::uint64_t) {
  std::vector<Completion> out;
  for (auto& text : client_.complete(prompt.messages, n, temperature)) {
    out.push_back({std::move(text), std::nullopt, std::nullopt});
  }
  return out;
}

}  // namespace tprover
