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
#include <vector>

#include "tprover/dataset.hpp"
#include "tprover/policy.hpp"

namespace tprover {

struct SftConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 20;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;

  void validate() const;
};

// Supervision target: the groundtruth action in the state's feature space.
struct SftExample {
  FeatureVector features;
  int action = 0;
};

struct LossAndGradient {
  double loss = 0.0;
  WeightMatrix gradient = WeightMatrix::Zero();
};

struct SftStep {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double loss = 0.0;  // batch NLL before the update

  friend bool operator==(const SftStep&, const SftStep&) = default;
};

struct SftResult {
  PolicyParams params;
  std::vector<SftStep> curve;
};

// Maps adaption records onto (features, action) using the state carried in
// each prompt and the tactic inside each completion. Throws UnmappableTactic
// naming the record index when a tactic has no action template.
std::vector<SftExample> sft_examples(const std::vector<SampleRecord>& records);

// Mean negative log-likelihood (temperature 1) and its exact gradient.
LossAndGradient sft_loss(const PolicyParams& params, std::span<const SftExample> batch);

// Mini-batch gradient descent over shuffled epochs. Returns fresh parameters;
// `init` is not modified.
SftResult train_sft(const PolicyParams& init, const std::vector<SampleRecord>& dataset, const SftConfig& config);

// Mean of the per-step losses of one epoch.
double epoch_mean_loss(const std::vector<SftStep>& curve, std::size_t epoch);

}  // namespace tprover
