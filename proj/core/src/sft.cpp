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

#include "tprover/sft.hpp"

#include <cmath>
#include <numeric>

#include "tprover/errors.hpp"
#include "tprover/reward.hpp"
#include "tprover/rng.hpp"

namespace tprover {

void SftConfig::validate() const {
  if (!(learning_rate > 0.0) || epochs == 0 || batch_size == 0) {
    throw ConfigError("sft: learning_rate, epochs and batch_size must be positive");
  }
}

std::vector<SftExample> sft_examples(const std::vector<SampleRecord>& records) {
  std::vector<SftExample> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const ProofState state = state_from_prompt(r.prompt);
    const std::string tactic_text = r.completion.empty() ? r.groundtruth : parse_completion(r.completion).answer_tactic;
    const auto tactic = try_parse_tactic(tactic_text);
    const auto a = tactic && !state.goals.empty() ? action_for_tactic(*tactic, state.goals.front()) : std::nullopt;
    if (!a) {
      throw UnmappableTactic("record " + std::to_string(i) + ": tactic '" + tactic_text +
                             "' has no action template");
    }
    out.push_back({featurize(state), *a});
  }
  return out;
}

LossAndGradient sft_loss(const PolicyParams& params, std::span<const SftExample> batch) {
  if (batch.empty()) throw std::invalid_argument("sft_loss: empty batch");
  LossAndGradient out;
  for (const auto& ex : batch) {
    out.loss -= logprob(params, ex.features, ex.action, 1.0);
    out.gradient -= grad_logprob(params, ex.features, ex.action, 1.0);
  }
  const double n = static_cast<double>(batch.size());
  out.loss /= n;
  out.gradient /= n;
  if (!std::isfinite(out.loss) || !out.gradient.allFinite()) throw NonFiniteLoss("sft loss is not finite");
  return out;
}

SftResult train_sft(const PolicyParams& init, const std::vector<SampleRecord>& dataset, const SftConfig& config) {
  config.validate();
  if (dataset.empty()) throw std::invalid_argument("train_sft: empty dataset");
  const auto examples = sft_examples(dataset);

  SftResult result{init, {}};
  std::vector<std::size_t> order(examples.size());
  std::vector<SftExample> batch;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(config.seed, epoch));
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      batch.clear();
      for (std::size_t k = start; k < std::min(order.size(), start + config.batch_size); ++k) {
        batch.push_back(examples[order[k]]);
      }
      const auto lg = sft_loss(result.params, batch);
      result.curve.push_back({step++, epoch, lg.loss});
      result.params.weights -= config.learning_rate * lg.gradient;
    }
  }
  return result;
}

double epoch_mean_loss(const std::vector<SftStep>& curve, std::size_t epoch) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : curve) {
    if (s.epoch != epoch) continue;
    sum += s.loss;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : std::nan("");
}

}  // namespace tprover
