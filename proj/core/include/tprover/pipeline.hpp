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
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "tprover/chat_client.hpp"
#include "tprover/dataset.hpp"
#include "tprover/grpo.hpp"
#include "tprover/lean_backend.hpp"
#include "tprover/search.hpp"
#include "tprover/sft.hpp"

namespace tprover {

// Everything a command needs, serialised next to its outputs so a run can be
// replayed from the file alone.
struct RunConfig {
  std::filesystem::path out = "run";
  std::uint64_t seed = 7;
  std::size_t corpus_train = 300;
  std::size_t corpus_bench = 30;
  SftConfig sft;
  GrpoConfig grpo;
  SearchBudget budget;
  double search_temperature = 1.0;
  EndpointConfig endpoint;
  std::string thoughts = "stub";  // stub | remote
  std::string backend = "kernel";  // kernel | stub | external
  std::vector<std::string> backend_command;
  std::string backend_address;
  std::chrono::milliseconds backend_timeout{10000};
  bool eval_train = false;

  // Checks enumerations and numeric ranges; throws ConfigError.
  void validate() const;
};

std::string to_json_text(const RunConfig& config);
// Strict: unknown keys are rejected.
RunConfig run_config_from_json_text(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// Output layout below RunConfig::out.
struct RunLayout {
  std::filesystem::path root;

  std::filesystem::path manifest() const { return root / "corpus" / "manifest.jsonl"; }
  std::filesystem::path adaption() const { return root / "datasets" / "adaption.jsonl"; }
  std::filesystem::path reinforce() const { return root / "datasets" / "reinforce.jsonl"; }
  std::filesystem::path sft_params() const { return root / "params" / "policy-sft.json"; }
  std::filesystem::path rl_params() const { return root / "params" / "policy-rl.json"; }
  std::filesystem::path sft_log() const { return root / "logs" / "sft_loss.jsonl"; }
  std::filesystem::path rl_log() const { return root / "logs" / "grpo_train.jsonl"; }
  std::filesystem::path reports() const { return root / "reports"; }
  std::filesystem::path config_for(const std::string& command) const { return root / "configs" / (command + ".json"); }
};

struct PrepareSummary {
  std::size_t train_theorems = 0;
  std::size_t bench_theorems = 0;
  std::size_t adaption_records = 0;
  std::size_t reinforce_records = 0;
};

PrepareSummary cmd_prepare_data(const RunConfig& config);

struct SftSummary {
  std::size_t steps = 0;
  double first_epoch_loss = 0.0;
  double final_epoch_loss = 0.0;
};

SftSummary cmd_train_sft(const RunConfig& config);

struct RlSummary {
  std::size_t steps = 0;
  double first_epoch_accuracy = 0.0;
  double final_epoch_accuracy = 0.0;
};

RlSummary cmd_train_rl(const RunConfig& config);

// Resolves a policy name: "uniform", "sft", "rl", "exhaustive", "remote", or
// a path to a parameter file.
std::unique_ptr<Policy> make_policy(const RunConfig& config, const std::string& choice);

struct ProveReport {
  std::string statement;
  SearchResult result;
  std::string text;  // human-readable trace
};

// `target` is a benchmark/train theorem name from the manifest or a statement
// such as "⊢ P -> P".
ProveReport cmd_prove(const RunConfig& config, const std::string& target, const std::string& policy_choice);

// Proves one root under the configured backend.
SearchResult prove_with_backend(const RunConfig& config, const ProofState& root, Policy& policy,
                                std::uint64_t seed);

struct EvalRow {
  std::string policy;
  std::string split;
  std::string name;
  SearchStatus status = SearchStatus::Exhausted;
  std::size_t proof_length = 0;
  std::size_t expansions = 0;
};

struct PolicyScore {
  std::string policy;
  std::string split;
  std::size_t proved_count = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
};

struct EvalReport {
  std::vector<PolicyScore> scores;
  std::vector<EvalRow> rows;

  const PolicyScore* find(const std::string& policy, const std::string& split = "bench") const;
};

// Runs every policy over the benchmark (and the train split when
// eval_train is set) under one budget and seed; writes reports/eval.json and
// reports/eval.txt.
EvalReport cmd_eval(const RunConfig& config, const std::vector<std::string>& policies = {"uniform", "sft", "rl"});

std::string render_eval_table(const EvalReport& report);

}  // namespace tprover
