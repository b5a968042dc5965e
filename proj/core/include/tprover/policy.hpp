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

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tprover/chat_client.hpp"
#include "tprover/kernel.hpp"
#include "tprover/prompt.hpp"

namespace tprover {

inline constexpr std::size_t kHypothesisSlots = 4;
inline constexpr int kFeatureDim = 13;
inline constexpr int kActionDim = 13;

using FeatureVector = Eigen::Matrix<double, kFeatureDim, 1>;
using ActionVector = Eigen::Matrix<double, kActionDim, 1>;
using WeightMatrix = Eigen::Matrix<double, kFeatureDim, kActionDim>;

// Feature layout over the first goal.
namespace feature {
inline constexpr int kAtom = 0;
inline constexpr int kImp = 1;
inline constexpr int kAnd = 2;
inline constexpr int kOr = 3;
inline constexpr int kEq = 4;
inline constexpr int kHypMatch = 5;
inline constexpr int kReflexive = 6;
inline constexpr int kApplySlot0 = 7;  // 7..10
inline constexpr int kHypCount = 11;
inline constexpr int kBias = 12;
}  // namespace feature

// Action template indices. `exact`/`apply` address hypothesis slots 1..4 of
// the first goal.
namespace action {
inline constexpr int kIntro = 0;
inline constexpr int kExact0 = 1;  // 1..4
inline constexpr int kApply0 = 5;  // 5..8
inline constexpr int kSplit = 9;
inline constexpr int kLeft = 10;
inline constexpr int kRight = 11;
inline constexpr int kRfl = 12;
}  // namespace action

struct PolicyParams {
  WeightMatrix weights = WeightMatrix::Zero();

  static PolicyParams zeros() { return {}; }
  bool all_finite() const { return weights.allFinite(); }

  friend bool operator==(const PolicyParams& a, const PolicyParams& b) { return a.weights == b.weights; }
};

FeatureVector featurize(const ProofState& state);

// Tactic text of an action in the context of `goal`. Slots past the last
// hypothesis render as `exact h{slot}` / `apply h{slot}`.
std::string render_action(int action, const Goal& goal);

// Action whose rendering in `goal` equals `tactic`, if any.
std::optional<int> action_for_tactic(const Tactic& tactic, const Goal& goal);

ActionVector action_logits(const PolicyParams& params, const FeatureVector& features, double temperature);
ActionVector action_log_probs(const PolicyParams& params, const FeatureVector& features, double temperature);
ActionVector action_probs(const PolicyParams& params, const FeatureVector& features, double temperature);

double logprob(const PolicyParams& params, const FeatureVector& features, int action, double temperature);

// d logprob / d weights = features ⊗ (onehot(action) − softmax(z)) / temperature.
WeightMatrix grad_logprob(const PolicyParams& params, const FeatureVector& features, int action,
                          double temperature);

// Fixed think-block emitted by the template policies.
extern const std::string_view kPlaceholderThought;

struct Completion {
  std::string text;
  // Natural-log probability of the sampled action; absent for remote output.
  std::optional<double> logprob;
  std::optional<int> action;
};

// Source of candidate completions for a prompt.
class Policy {
 public:
  virtual ~Policy() = default;

  // Returns `n` completions (n >= 1). Deterministic for a fixed seed except
  // for remote policies. Throws PolicyError on transport failures.
  virtual std::vector<Completion> sample(const Prompt& prompt, std::size_t n, double temperature,
                                         std::uint64_t seed) = 0;
};

// Cycles through a fixed list of tactics (wrapped in the answer format
// unless `wrap` is false, in which case the texts are emitted verbatim).
class ScriptedPolicy final : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<std::string> texts, bool wrap = true);
  std::vector<Completion> sample(const Prompt& prompt, std::size_t n, double temperature,
                                 std::uint64_t seed) override;

 private:
  std::vector<std::string> texts_;
  bool wrap_;
};

// Emits every applicable tactic of the prompt's state in enumeration order,
// cycling to fill `n`. Returns nothing when no tactic applies.
class ExhaustivePolicy final : public Policy {
 public:
  explicit ExhaustivePolicy(std::size_t max_hyps = kHypothesisSlots) : max_hyps_(max_hyps) {}
  std::vector<Completion> sample(const Prompt& prompt, std::size_t n, double temperature,
                                 std::uint64_t seed) override;

 private:
  std::size_t max_hyps_;
};

// Linear-softmax policy over the 13 action templates.
class SoftmaxPolicy final : public Policy {
 public:
  explicit SoftmaxPolicy(PolicyParams params) : params_(std::move(params)) {}

  const PolicyParams& params() const noexcept { return params_; }

  std::vector<Completion> sample(const Prompt& prompt, std::size_t n, double temperature,
                                 std::uint64_t seed) override;

  // Samples directly from a state; shared by the trainer.
  std::vector<Completion> sample_state(const ProofState& state, std::size_t n, double temperature,
                                       std::uint64_t seed) const;

 private:
  PolicyParams params_;
};

// Chat-completions endpoint; each choice is one completion.
class RemotePolicy final : public Policy {
 public:
  explicit RemotePolicy(EndpointConfig config) : client_(std::move(config)) {}
  std::vector<Completion> sample(const Prompt& prompt, std::size_t n, double temperature,
                                 std::uint64_t seed) override;

 private:
  ChatClient client_;
};

}  // namespace tprover
