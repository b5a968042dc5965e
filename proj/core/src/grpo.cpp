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

#include "tprover/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tprover/errors.hpp"
#include "tprover/rng.hpp"

namespace tprover {

void GrpoConfig::validate() const {
  if (group_size < 2) throw DegenerateGroup("group_size must be at least 2");
  if (!(clip_eps >= 0.0) || !(kl_coeff >= 0.0) || !(learning_rate > 0.0) || !(temperature > 0.0) ||
      !(std_guard >= 0.0) || epochs == 0) {
    throw ConfigError("grpo: invalid configuration");
  }
  if (reward.accuracy < 0.0 || reward.format < 0.0) throw ConfigError("reward weights must be non-negative");
}

std::vector<double> compute_advantages(std::span<const double> rewards, double std_guard) {
  if (rewards.size() < 2) throw DegenerateGroup("a group needs at least two rewards");
  std::vector<double> adv(rewards.size(), 0.0);
  if (std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards.front(); })) return adv;
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);
  for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / (sd + std_guard);
  return adv;
}

double kl_divergence(const PolicyParams& params, const PolicyParams& ref_params, const FeatureVector& features,
                     double temperature) {
  const ActionVector lp = action_log_probs(params, features, temperature);
  const ActionVector lr = action_log_probs(ref_params, features, temperature);
  return (lp.array().exp() * (lp - lr).array()).sum();
}

GrpoLoss grpo_loss(const PolicyParams& params, const PolicyParams& ref_params, const Group& group,
                   const GrpoConfig& config) {
  const std::size_t g = group.actions.size();
  if (g < 2 || group.advantages.size() != g || group.old_logprobs.size() != g) {
    throw DegenerateGroup("group lists must share a length of at least 2");
  }
  const double t = config.temperature;
  const FeatureVector x = featurize(group.state);
  const ActionVector log_p = action_log_probs(params, x, t);
  const ActionVector p = log_p.array().exp();

  GrpoLoss out;
  // d(loss)/d(logits), accumulated then mapped to weights in one outer product.
  ActionVector dz = ActionVector::Zero();
  double surrogate = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const int a = group.actions[i];
    const double adv = group.advantages[i];
    const double ratio = std::exp(log_p[a] - group.old_logprobs[i]);
    const double clipped = std::clamp(ratio, 1.0 - config.clip_eps, 1.0 + config.clip_eps);
    const double unclipped_term = ratio * adv;
    const double clipped_term = clipped * adv;
    surrogate += std::min(unclipped_term, clipped_term);
    if (unclipped_term <= clipped_term) {
      // d(ratio)/dz = ratio * (onehot(a) − p)
      ActionVector score = -p;
      score[a] += 1.0;
      dz -= (adv * ratio / static_cast<double>(g)) * score;
    }
  }
  out.loss = -surrogate / static_cast<double>(g);

  if (config.kl_coeff > 0.0) {
    const ActionVector log_ref = action_log_probs(ref_params, x, t);
    const ActionVector diff = log_p - log_ref;
    out.kl = (p.array() * diff.array()).sum();
    out.loss += config.kl_coeff * out.kl;
    dz += config.kl_coeff * (p.array() * (diff.array() - out.kl)).matrix();
  } else {
    out.kl = kl_divergence(params, ref_params, x, t);
  }
  out.gradient = x * dz.transpose() / t;
  if (!std::isfinite(out.loss) || !std::isfinite(out.kl) || !out.gradient.allFinite()) {
    throw NonFiniteLoss("grpo loss is not finite");
  }
  return out;
}

RlResult rl_train(const PolicyParams& init, const PolicyParams& ref_params, const std::vector<SampleRecord>& dataset,
                  const GrpoConfig& config) {
  config.validate();
  if (dataset.empty()) throw std::invalid_argument("rl_train: empty reinforce dataset");

  std::vector<ProofState> states;
  states.reserve(dataset.size());
  for (const auto& r : dataset) states.push_back(state_from_prompt(r.prompt));

  RlResult result{init, {}};
  const std::size_t per_epoch = config.iterations ? config.iterations : dataset.size();
  std::vector<std::size_t> order(dataset.size());
  std::size_t iteration = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    // Groups are drawn from the policy as it stood when the epoch began, so
    // the ratio against the live parameters drifts away from 1 and the clip
    // bounds how far one epoch can move the policy.
    const SoftmaxPolicy old_policy(result.params);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(config.seed, 2 * epoch));
    rng.shuffle(order);
    for (std::size_t k = 0; k < per_epoch; ++k, ++iteration) {
      const std::size_t idx = order[k % order.size()];
      const SampleRecord& record = dataset[idx];

      Group group;
      group.prompt = record.prompt;
      group.state = states[idx];
      group.groundtruth = record.groundtruth;
      group.completions = old_policy.sample_state(group.state, config.group_size, config.temperature,
                                              mix_seed(config.seed, 2 * iteration + 1));

      TrainRecord rec;
      rec.iteration = iteration;
      rec.epoch = epoch;
      for (const auto& c : group.completions) {
        const auto breakdown = total_reward(c.text, group.groundtruth, config.reward);
        group.actions.push_back(*c.action);
        group.old_logprobs.push_back(*c.logprob);
        group.rewards.push_back(breakdown.total);
        rec.mean_reward += breakdown.total;
        rec.mean_format_reward += breakdown.format;
        rec.mean_accuracy_reward += breakdown.accuracy;
      }
      const double n = static_cast<double>(config.group_size);
      rec.mean_reward /= n;
      rec.mean_format_reward /= n;
      rec.mean_accuracy_reward /= n;
      group.advantages = compute_advantages(group.rewards, config.std_guard);
      rec.degenerate = std::all_of(group.advantages.begin(), group.advantages.end(), [](double a) { return a == 0.0; });

      const GrpoLoss lg = grpo_loss(result.params, ref_params, group, config);
      rec.loss = lg.loss;
      rec.kl_to_ref = lg.kl;
      rec.grad_norm = lg.gradient.norm();
      result.params.weights -= config.learning_rate * lg.gradient;
      result.log.push_back(rec);
    }
  }
  return result;
}

double epoch_mean_accuracy(const TrainLog& log, std::size_t epoch) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : log) {
    if (r.epoch != epoch) continue;
    sum += r.mean_accuracy_reward;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : std::nan("");
}

}  // namespace tprover
