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
#include <span>
#include <string>
#include <vector>

#include "tprover/dataset.hpp"
#include "tprover/policy.hpp"
#include "tprover/reward.hpp"
#include "tprover/sft.hpp"

namespace tprover {

struct GrpoConfig {
  std::size_t group_size = 8;
  double clip_eps = 0.2;  // +inf disables clipping
  double kl_coeff = 0.01;
  double learning_rate = 0.05;
  double temperature = 1.0;
  // Groups per epoch; 0 means one pass over the dataset.
  std::size_t iterations = 0;
  std::size_t epochs = 3;
  double std_guard = 1e-6;
  std::uint64_t seed = 0;
  RewardWeights reward;

  // Throws ConfigError for out-of-range values and DegenerateGroup for G < 2.
  void validate() const;
};

// One sampling group: G completions of the current policy for one prompt.
struct Group {
  Prompt prompt;
  ProofState state;
  std::string groundtruth;
  std::vector<Completion> completions;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<double> advantages;
  std::vector<double> old_logprobs;
};

struct TrainRecord {
  std::size_t iteration = 0;
  std::size_t epoch = 0;
  double mean_reward = 0.0;
  double mean_format_reward = 0.0;
  double mean_accuracy_reward = 0.0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double kl_to_ref = 0.0;
  bool degenerate = false;  // all rewards in the group were equal

  friend bool operator==(const TrainRecord&, const TrainRecord&) = default;
};

using TrainLog = std::vector<TrainRecord>;

// a_i = (r_i − mean) / (population std + std_guard); all zeros when every
// reward is equal. Throws DegenerateGroup for fewer than two rewards.
std::vector<double> compute_advantages(std::span<const double> rewards, double std_guard);

struct GrpoLoss {
  double loss = 0.0;
  double kl = 0.0;
  WeightMatrix gradient = WeightMatrix::Zero();
};

// loss = −mean_i min(ρ_i a_i, clip(ρ_i, 1−ε, 1+ε) a_i) + β KL(π ‖ π_ref)
// with ρ_i = exp(logprob_now − old_logprob) and the exact categorical KL over
// the group's state. The gradient is analytic. Throws NonFiniteLoss.
GrpoLoss grpo_loss(const PolicyParams& params, const PolicyParams& ref_params, const Group& group,
                   const GrpoConfig& config);

// Exact KL(π_params ‖ π_ref) at one state.
double kl_divergence(const PolicyParams& params, const PolicyParams& ref_params, const FeatureVector& features,
                     double temperature);

struct RlResult {
  PolicyParams params;
  TrainLog log;
};

// For each drawn reinforce record: samples a group from the epoch's old
// policy (the parameters as of the start of the epoch), scores it against the
// groundtruth, and takes one gradient step on grpo_loss for the live
// parameters. Epochs are shuffled passes over the dataset.
RlResult rl_train(const PolicyParams& init, const PolicyParams& ref_params, const std::vector<SampleRecord>& dataset,
                  const GrpoConfig& config);

double epoch_mean_accuracy(const TrainLog& log, std::size_t epoch);

}  // namespace tprover
