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

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tprover/errors.hpp"
#include "tprover/pipeline.hpp"

namespace {

using tprover::RunConfig;

// Command-line and environment overrides. Unset fields leave the value from
// the config file (or the built-in default) untouched.
struct Overrides {
  std::optional<std::string> config_file;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> corpus_train;
  std::optional<std::size_t> corpus_bench;
  std::optional<std::size_t> group_size;
  std::optional<double> clip_eps;
  std::optional<double> kl_coeff;
  std::optional<std::size_t> iterations;
  std::optional<double> w_format;
  std::optional<double> w_acc;
  std::optional<std::size_t> budget_expansions;
  std::optional<std::size_t> candidates_per_node;
  std::optional<std::size_t> max_depth;
  std::optional<double> search_temperature;
  std::optional<std::string> endpoint_url;
  std::optional<std::string> endpoint_model;
  std::optional<std::string> backend;
  std::optional<std::vector<std::string>> backend_command;
  std::optional<std::string> backend_address;
  std::optional<std::int64_t> backend_timeout_ms;
  std::optional<std::string> thoughts;
  std::optional<bool> eval_train;
  std::optional<double> sft_lr;
  std::optional<std::size_t> sft_epochs;
  std::optional<std::size_t> sft_batch;
  std::optional<double> rl_lr;
  std::optional<std::size_t> rl_epochs;
};

template <typename T, typename U>
void apply(const std::optional<T>& value, U& target) {
  if (value) target = *value;
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_file ? tprover::load_run_config(*o.config_file) : RunConfig{};
  apply(o.out, c.out);
  apply(o.seed, c.seed);
  apply(o.corpus_train, c.corpus_train);
  apply(o.corpus_bench, c.corpus_bench);
  apply(o.group_size, c.grpo.group_size);
  apply(o.clip_eps, c.grpo.clip_eps);
  apply(o.kl_coeff, c.grpo.kl_coeff);
  apply(o.iterations, c.grpo.iterations);
  apply(o.w_format, c.grpo.reward.format);
  apply(o.w_acc, c.grpo.reward.accuracy);
  apply(o.budget_expansions, c.budget.max_expansions);
  apply(o.candidates_per_node, c.budget.candidates_per_node);
  apply(o.max_depth, c.budget.max_depth);
  apply(o.search_temperature, c.search_temperature);
  apply(o.endpoint_url, c.endpoint.url);
  apply(o.endpoint_model, c.endpoint.model);
  apply(o.backend, c.backend);
  apply(o.backend_command, c.backend_command);
  apply(o.backend_address, c.backend_address);
  if (o.backend_timeout_ms) c.backend_timeout = std::chrono::milliseconds(*o.backend_timeout_ms);
  apply(o.thoughts, c.thoughts);
  apply(o.eval_train, c.eval_train);
  apply(o.sft_lr, c.sft.learning_rate);
  apply(o.sft_epochs, c.sft.epochs);
  apply(o.sft_batch, c.sft.batch_size);
  apply(o.rl_lr, c.grpo.learning_rate);
  apply(o.rl_epochs, c.grpo.epochs);
  if (const char* key = std::getenv("TPROVER_API_KEY")) c.endpoint.api_key = key;
  return c;
}

void print_prepare(const tprover::PrepareSummary& s) {
  std::cout << "corpus: " << s.train_theorems << " train, " << s.bench_theorems << " bench theorems\n"
            << "datasets: " << s.adaption_records << " adaption, " << s.reinforce_records << " reinforce records\n";
}

void print_sft(const tprover::SftSummary& s) {
  std::cout << "sft: " << s.steps << " steps, epoch loss " << s.first_epoch_loss << " -> " << s.final_epoch_loss
            << "\n";
}

void print_rl(const tprover::RlSummary& s) {
  std::cout << "rl: " << s.steps << " steps, epoch accuracy " << s.first_epoch_accuracy << " -> "
            << s.final_epoch_accuracy << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toy neural theorem prover: data preparation, SFT, GRPO, proof search and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  const std::string env = "TPROVER_";
  app.add_option("--config", o.config_file, "RunConfig JSON file (lowest precedence)")->envname(env + "CONFIG");
  app.add_option("--out", o.out, "Output directory")->envname(env + "OUT");
  app.add_option("--seed", o.seed, "Master seed")->envname(env + "SEED");
  app.add_option("--corpus-train", o.corpus_train, "Number of train theorems")->envname(env + "CORPUS_TRAIN");
  app.add_option("--corpus-bench", o.corpus_bench, "Number of benchmark theorems")->envname(env + "CORPUS_BENCH");
  app.add_option("--group-size", o.group_size, "GRPO group size")->envname(env + "GROUP_SIZE");
  app.add_option("--clip-eps", o.clip_eps, "GRPO clip range")->envname(env + "CLIP_EPS");
  app.add_option("--kl-coeff", o.kl_coeff, "GRPO KL coefficient")->envname(env + "KL_COEFF");
  app.add_option("--iterations", o.iterations, "GRPO groups per epoch (0: one pass)")->envname(env + "ITERATIONS");
  app.add_option("--w-format", o.w_format, "Format reward weight")->envname(env + "W_FORMAT");
  app.add_option("--w-acc", o.w_acc, "Accuracy reward weight")->envname(env + "W_ACC");
  app.add_option("--budget-expansions", o.budget_expansions, "Search expansion limit")
      ->envname(env + "BUDGET_EXPANSIONS");
  app.add_option("--candidates-per-node", o.candidates_per_node, "Completions sampled per node")
      ->envname(env + "CANDIDATES_PER_NODE");
  app.add_option("--max-depth", o.max_depth, "Search depth limit")->envname(env + "MAX_DEPTH");
  app.add_option("--search-temperature", o.search_temperature, "Sampling temperature during search")
      ->envname(env + "SEARCH_TEMPERATURE");
  app.add_option("--endpoint-url", o.endpoint_url, "Chat-completions URL")->envname(env + "ENDPOINT_URL");
  app.add_option("--endpoint-model", o.endpoint_model, "Model name sent to the endpoint")
      ->envname(env + "ENDPOINT_MODEL");
  app.add_option("--backend", o.backend, "Proof backend")
      ->check(CLI::IsMember({"kernel", "stub", "external"}))
      ->envname(env + "BACKEND");
  app.add_option("--backend-command", o.backend_command, "argv of an external prover process")
      ->envname(env + "BACKEND_COMMAND")
      ->delimiter(',');
  app.add_option("--backend-address", o.backend_address, "tcp://host:port of an external prover")
      ->envname(env + "BACKEND_ADDRESS");
  app.add_option("--backend-timeout-ms", o.backend_timeout_ms, "Per-request backend timeout")
      ->envname(env + "BACKEND_TIMEOUT_MS");
  app.add_option("--thoughts", o.thoughts, "Thought generator")
      ->check(CLI::IsMember({"stub", "remote"}))
      ->envname(env + "THOUGHTS");
  app.add_option("--eval-train", o.eval_train, "Also evaluate the train split")->envname(env + "EVAL_TRAIN");

  auto* prepare = app.add_subcommand("prepare-data", "Generate the corpus and the two datasets");

  auto* sft = app.add_subcommand("train-sft", "Supervised adaption of the policy");
  sft->add_option("--lr", o.sft_lr, "Learning rate")->envname(env + "SFT_LR");
  sft->add_option("--epochs", o.sft_epochs, "Epochs")->envname(env + "SFT_EPOCHS");
  sft->add_option("--batch-size", o.sft_batch, "Mini-batch size")->envname(env + "SFT_BATCH_SIZE");

  auto* rl = app.add_subcommand("train-rl", "GRPO fine-tuning starting from the SFT policy");
  rl->add_option("--lr", o.rl_lr, "Learning rate")->envname(env + "RL_LR");
  rl->add_option("--epochs", o.rl_epochs, "Epochs")->envname(env + "RL_EPOCHS");

  std::string target;
  std::string policy = "sft";
  auto* prove = app.add_subcommand("prove", "Search for a proof of one theorem");
  prove->add_option("theorem", target, "Theorem name from the manifest or a statement such as '⊢ P -> P'")
      ->required();
  prove->add_option("--policy", policy, "uniform | sft | rl | exhaustive | remote | path to params");

  std::vector<std::string> policies{"uniform", "sft", "rl"};
  auto* eval = app.add_subcommand("eval", "Benchmark every policy under one budget and seed");
  eval->add_option("--policies", policies, "Policies to compare")->delimiter(',');

  auto* all = app.add_subcommand("pipeline", "prepare-data, train-sft, train-rl and eval in sequence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const RunConfig config = resolve(o);
    if (*prepare) {
      print_prepare(tprover::cmd_prepare_data(config));
    } else if (*sft) {
      print_sft(tprover::cmd_train_sft(config));
    } else if (*rl) {
      print_rl(tprover::cmd_train_rl(config));
    } else if (*prove) {
      const auto report = tprover::cmd_prove(config, target, policy);
      std::cout << report.text;
      return report.result.proof ? 0 : 1;
    } else if (*eval) {
      const auto report = tprover::cmd_eval(config, policies);
      std::cout << tprover::render_eval_table(report);
    } else if (*all) {
      const auto t0 = std::chrono::steady_clock::now();
      print_prepare(tprover::cmd_prepare_data(config));
      print_sft(tprover::cmd_train_sft(config));
      print_rl(tprover::cmd_train_rl(config));
      std::cout << tprover::render_eval_table(tprover::cmd_eval(config, policies));
      const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cout << "pipeline wall time: " << secs << " s\n";
    }
  } catch (const tprover::DegenerateGroup& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const tprover::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const tprover::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const tprover::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
