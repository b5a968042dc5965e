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

#include <benchmark/benchmark.h>

#include "tprover/dataset.hpp"
#include "tprover/grpo.hpp"
#include "tprover/search.hpp"
#include "tprover/sft.hpp"

using namespace tprover;

namespace {

const ToyCorpus& corpus() {
  static const ToyCorpus c = gen_toy_corpus(7, 300, 30);
  return c;
}

std::vector<SampleRecord> reinforce_records() {
  std::vector<std::pair<ProofState, Tactic>> pairs;
  for (const auto& th : corpus().train)
    for (auto& p : extract_pairs(th)) pairs.push_back(std::move(p));
  return build_records(pairs, {}, DatasetKind::Reinforce);
}

void BM_ApplyTactic(benchmark::State& state) {
  const auto root = parse_state("P -> Q -> P ∧ Q");
  const auto intro = Tactic::intro("h1");
  for (auto _ : state) benchmark::DoNotOptimize(apply_tactic(root, intro));
}
BENCHMARK(BM_ApplyTactic);

void BM_ParseFormula(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_formula("(P -> Q) -> (Q -> R) -> P -> R ∧ (a + 1 = a + 1)"));
}
BENCHMARK(BM_ParseFormula);

void BM_BruteForceCorpus(benchmark::State& state) {
  for (auto _ : state) {
    for (const auto& th : corpus().bench) benchmark::DoNotOptimize(brute_force_provable(th.root(), 6));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().bench.size()));
}
BENCHMARK(BM_BruteForceCorpus)->Unit(benchmark::kMillisecond);

void BM_SearchUniform(benchmark::State& state) {
  SoftmaxPolicy uniform(PolicyParams::zeros());
  for (auto _ : state) {
    for (std::size_t i = 0; i < corpus().bench.size(); ++i) {
      benchmark::DoNotOptimize(prove(corpus().bench[i].root(), uniform, {}, i));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().bench.size()));
}
BENCHMARK(BM_SearchUniform)->Unit(benchmark::kMillisecond);

void BM_GrpoLoss(benchmark::State& state) {
  const auto root = corpus().train.front().root();
  SoftmaxPolicy policy(PolicyParams::zeros());
  Group g;
  g.state = root;
  for (const auto& c : policy.sample_state(root, 8, 1.0, 1)) {
    g.actions.push_back(*c.action);
    g.old_logprobs.push_back(*c.logprob);
  }
  g.advantages = {1, -1, 1, -1, 1, -1, 1, -1};
  const GrpoConfig config;
  const auto params = PolicyParams::zeros();
  for (auto _ : state) benchmark::DoNotOptimize(grpo_loss(params, params, g, config));
}
BENCHMARK(BM_GrpoLoss);

void BM_RlEpoch(benchmark::State& state) {
  const auto records = reinforce_records();
  GrpoConfig config;
  config.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(rl_train(PolicyParams::zeros(), PolicyParams::zeros(), records, config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(records.size()));
}
BENCHMARK(BM_RlEpoch)->Unit(benchmark::kMillisecond);

void BM_SftEpoch(benchmark::State& state) {
  const auto records = reinforce_records();
  SftConfig config;
  config.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_sft(PolicyParams::zeros(), records, config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(records.size()));
}
BENCHMARK(BM_SftEpoch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
