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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "test_util.hpp"
#include "tprover/errors.hpp"
#include "tprover/grpo.hpp"

using namespace tprover;
using tprover::testing::rel_error;

namespace {

PolicyParams random_params(Rng& rng, double scale) {
  PolicyParams p;
  for (int r = 0; r < kFeatureDim; ++r)
    for (int c = 0; c < kActionDim; ++c) p.weights(r, c) = scale * (2.0 * rng.uniform() - 1.0);
  return p;
}

const std::vector<std::string> kStatements{"P -> Q -> P", "a = a", "P ∧ Q", "P ∨ Q", "Q"};

ProofState random_state(Rng& rng) {
  ProofState s = parse_state(kStatements[rng.below(kStatements.size())]);
  const auto hyps = rng.below(5);
  for (std::size_t h = 0; h < hyps; ++h) {
    s.goals[0].hypotheses.push_back({"h" + std::to_string(h + 1), rng.below(2) ? parse_formula("P -> Q") : parse_formula("Q")});
  }
  return s;
}

// A group whose old log-probabilities come from `old`, so ratios move away from 1.
Group random_group(Rng& rng, const PolicyParams& old, std::size_t g, double t) {
  Group group;
  group.state = random_state(rng);
  const FeatureVector x = featurize(group.state);
  std::vector<double> rewards;
  for (std::size_t i = 0; i < g; ++i) {
    const int a = static_cast<int>(rng.below(kActionDim));
    group.actions.push_back(a);
    group.old_logprobs.push_back(logprob(old, x, a, t));
    rewards.push_back(static_cast<double>(rng.below(3)) * 0.5);
  }
  if (std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards[0]; })) rewards[0] += 1.0;
  group.rewards = rewards;
  group.advantages = compute_advantages(rewards, 1e-6);
  return group;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double pop_std(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size());
}

std::vector<SampleRecord> rfl_dataset(std::size_t n) {
  std::vector<SampleRecord> out;
  const std::vector<std::string> eqs{"a = a", "b + 1 = b + 1", "0 = 0", "x + y = x + y", "c + 0 = c + 0"};
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = parse_state(eqs[i % eqs.size()]);
    out.push_back({build_prompt(s), "", "rfl", canonical_key(s)});
  }
  return out;
}

}  // namespace

TEST_CASE("advantages: worked examples") {
  const std::vector<double> r{1, 0, 0, 1};
  CHECK(compute_advantages(r, 0.0) == std::vector<double>{1, -1, -1, 1});
  const std::vector<double> same{1, 1, 1, 1};
  CHECK(compute_advantages(same, 0.0) == std::vector<double>{0, 0, 0, 0});
  CHECK_THROWS_AS(compute_advantages(std::vector<double>{}, 0.0), DegenerateGroup);
  CHECK_THROWS_AS(compute_advantages(std::vector<double>{1.0}, 0.0), DegenerateGroup);
}

TEST_CASE("advantages normalise non-degenerate groups") {
  Rng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> r(2 + rng.below(15));
    for (auto& x : r) x = 3.0 * rng.uniform() - 1.0;
    const auto a = compute_advantages(r, 0.0);
    CHECK(std::abs(mean(a)) < 1e-9);
    CHECK(std::abs(pop_std(a) - 1.0) < 1e-6);
    const auto guarded = compute_advantages(r, 1e-6);
    const double sd = pop_std(r);
    CHECK(pop_std(guarded) == doctest::Approx(sd / (sd + 1e-6)).epsilon(1e-9));
  }
}

TEST_CASE("on-policy first step has zero loss and zero KL") {
  Rng rng(4);
  const auto p = random_params(rng, 1.0);
  const GrpoConfig config;
  const auto group = random_group(rng, p, 8, 1.0);
  const auto lg = grpo_loss(p, p, group, config);
  CHECK(std::abs(lg.loss) < 1e-12);
  CHECK(std::abs(lg.kl) < 1e-12);
}

TEST_CASE("with no KL a lone positive advantage pushes up its action") {
  Rng rng(5);
  const auto p = random_params(rng, 1.0);
  GrpoConfig config;
  config.kl_coeff = 0.0;
  Group group = random_group(rng, p, 2, 1.0);
  group.advantages = {0.8, 0.0};
  const auto lg = grpo_loss(p, p, group, config);
  const WeightMatrix expected = -0.8 * grad_logprob(p, featurize(group.state), group.actions[0], 1.0);
  // Same direction: the gradient is a positive multiple of the expected matrix.
  const double scale = lg.gradient.norm() / expected.norm();
  CHECK((lg.gradient - scale * expected).norm() < 1e-12);
  CHECK(scale > 0.0);
}

TEST_CASE("grpo_loss gradient matches central finite differences") {
  Rng rng(6);
  const double h = 1e-5;
  int instances = 0;
  for (int trial = 0; trial < 120; ++trial) {
    GrpoConfig config;
    config.kl_coeff = rng.below(4) == 0 ? 0.0 : rng.uniform();
    config.clip_eps = rng.below(5) == 0 ? std::numeric_limits<double>::infinity() : 0.05 + 0.3 * rng.uniform();
    config.temperature = 0.5 + rng.uniform();
    const auto old = random_params(rng, 1.0);
    auto params = old;
    params.weights += random_params(rng, 0.4).weights;
    const auto ref = random_params(rng, 1.0);
    const auto group = random_group(rng, old, 2 + rng.below(8), config.temperature);
    const auto lg = grpo_loss(params, ref, group, config);
    WeightMatrix fd;
    for (int r = 0; r < kFeatureDim; ++r) {
      for (int c = 0; c < kActionDim; ++c) {
        auto up = params, down = params;
        up.weights(r, c) += h;
        down.weights(r, c) -= h;
        fd(r, c) = (grpo_loss(up, ref, group, config).loss - grpo_loss(down, ref, group, config).loss) / (2 * h);
      }
    }
    for (int r = 0; r < kFeatureDim; ++r)
      for (int c = 0; c < kActionDim; ++c) CHECK(rel_error(lg.gradient(r, c), fd(r, c)) < 1e-5);
    ++instances;
  }
  CHECK(instances >= 100);
}

TEST_CASE("unbounded clip range gives the plain surrogate") {
  Rng rng(7);
  GrpoConfig config;
  config.clip_eps = std::numeric_limits<double>::infinity();
  config.kl_coeff = 0.0;
  const auto old = random_params(rng, 1.0);
  auto params = old;
  params.weights += random_params(rng, 1.0).weights;
  const auto group = random_group(rng, old, 6, 1.0);
  const FeatureVector x = featurize(group.state);
  double surrogate = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    surrogate += std::exp(logprob(params, x, group.actions[i], 1.0) - group.old_logprobs[i]) * group.advantages[i];
  }
  CHECK(grpo_loss(params, params, group, config).loss == doctest::Approx(-surrogate / 6).epsilon(1e-12));
}

TEST_CASE("zero clip range stops the gradient where clipping binds") {
  Rng rng(8);
  GrpoConfig config;
  config.clip_eps = 0.0;
  config.kl_coeff = 0.0;
  const auto params = random_params(rng, 1.0);
  Group group;
  group.state = parse_state("P -> Q");
  const FeatureVector x = featurize(group.state);
  // Positive advantages with ratio above 1, negative with ratio below 1: all clipped.
  group.actions = {0, 3, 5, 9};
  group.advantages = {1.0, 0.5, -1.0, -0.5};
  for (std::size_t i = 0; i < 4; ++i) {
    const double shift = group.advantages[i] > 0 ? -0.3 : 0.3;
    group.old_logprobs.push_back(logprob(params, x, group.actions[i], 1.0) + shift);
  }
  CHECK(grpo_loss(params, params, group, config).gradient.isZero());

  // Flip one sign so its ratio is the smaller term again: gradient flows.
  group.advantages[0] = -1.0;
  CHECK_FALSE(grpo_loss(params, params, group, config).gradient.isZero());
}

TEST_CASE("KL divergence is non-negative and zero only at equality") {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_params(rng, 1.0);
    const auto b = random_params(rng, 1.0);
    const auto x = featurize(random_state(rng));
    CHECK(kl_divergence(a, b, x, 1.0) > 0.0);
    CHECK(std::abs(kl_divergence(a, a, x, 1.0)) < 1e-15);
  }
}

TEST_CASE("configuration validation") {
  GrpoConfig c;
  c.group_size = 1;
  CHECK_THROWS_AS(c.validate(), DegenerateGroup);
  c = {};
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.kl_coeff = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.group_size = 1;
  CHECK_THROWS_AS(rl_train(PolicyParams::zeros(), PolicyParams::zeros(), rfl_dataset(4), c), DegenerateGroup);
  CHECK_THROWS(rl_train(PolicyParams::zeros(), PolicyParams::zeros(), {}, GrpoConfig{}));
}

TEST_CASE("all-rfl dataset reaches high accuracy within 300 steps") {
  GrpoConfig c;
  c.group_size = 8;
  c.learning_rate = 0.1;
  c.kl_coeff = 0.01;
  c.epochs = 30;
  c.seed = 1;
  const auto result = rl_train(PolicyParams::zeros(), PolicyParams::zeros(), rfl_dataset(10), c);
  REQUIRE(result.log.size() == 300);
  CHECK(epoch_mean_accuracy(result.log, c.epochs - 1) >= 0.9);
  CHECK(epoch_mean_accuracy(result.log, c.epochs - 1) > epoch_mean_accuracy(result.log, 0));
  for (const auto& r : result.log) {
    CHECK(r.mean_format_reward == 1.0);
    CHECK(std::isfinite(r.loss));
    CHECK(r.mean_reward == doctest::Approx(r.mean_accuracy_reward + 0.5 * r.mean_format_reward));
  }
}

TEST_CASE("a dominant KL term keeps the policy at the reference") {
  GrpoConfig c;
  c.kl_coeff = 1e3;
  // Plain gradient descent on a stiff penalty needs a step below 2 / curvature.
  c.learning_rate = 1e-5;
  c.epochs = 2;
  Rng rng(10);
  const auto ref = random_params(rng, 0.5);
  const auto data = rfl_dataset(20);
  const auto result = rl_train(ref, ref, data, c);
  for (const auto& r : data) CHECK(kl_divergence(result.params, ref, featurize(state_from_prompt(r.prompt)), 1.0) < 1e-3);
}

TEST_CASE("training is deterministic and leaves inputs untouched") {
  GrpoConfig c;
  c.epochs = 2;
  c.seed = 3;
  const auto init = PolicyParams::zeros();
  const auto a = rl_train(init, init, rfl_dataset(12), c);
  const auto b = rl_train(init, init, rfl_dataset(12), c);
  CHECK(a.log == b.log);
  CHECK(a.params == b.params);
  CHECK(init == PolicyParams::zeros());
  c.seed = 4;
  CHECK_FALSE(rl_train(init, init, rfl_dataset(12), c).log == a.log);
}

TEST_CASE("equal-reward groups are logged as degenerate no-ops") {
  // A policy that already always answers rfl gets identical rewards.
  PolicyParams sure;
  sure.weights(feature::kBias, action::kRfl) = 60.0;
  GrpoConfig c;
  c.epochs = 1;
  c.kl_coeff = 0.0;
  const auto result = rl_train(sure, sure, rfl_dataset(5), c);
  for (const auto& r : result.log) {
    CHECK(r.degenerate);
    CHECK(r.grad_norm == 0.0);
  }
  CHECK(result.params == sure);
}

TEST_CASE("iterations caps groups per epoch") {
  GrpoConfig c;
  c.iterations = 7;
  c.epochs = 3;
  const auto result = rl_train(PolicyParams::zeros(), PolicyParams::zeros(), rfl_dataset(4), c);
  CHECK(result.log.size() == 21);
  CHECK(result.log.back().epoch == 2);
  CHECK(result.log.back().iteration == 20);
}
