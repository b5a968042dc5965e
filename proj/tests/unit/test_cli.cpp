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
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <nlohmann/json.hpp>
#include <sstream>

#include "test_util.hpp"
#include "tprover/errors.hpp"
#include "tprover/pipeline.hpp"

using namespace tprover;
using namespace tprover::testing;
namespace fs = std::filesystem;

namespace {

const std::string kCli = TPROVER_CLI_PATH;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell, capturing stdout and the exit code.
Run cli(const std::string& args, const std::string& env = "") {
  Run r;
  FILE* pipe = ::popen((env + " " + kCli + " " + args + " 2>/dev/null").c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

RunConfig config_in(const fs::path& out) {
  RunConfig c;
  c.out = out;
  return c;
}

// Runs the full default pipeline once into `out`.
void run_pipeline(const RunConfig& c) {
  cmd_prepare_data(c);
  cmd_train_sft(c);
  cmd_train_rl(c);
  cmd_eval(c);
}

// Every artifact a run produces, relative path -> bytes; persisted configs
// are left out because they name their own output directory.
std::map<std::string, std::string> artifacts(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), root).generic_string();
    if (rel.rfind("configs/", 0) == 0) continue;
    out[rel] = slurp(entry.path());
  }
  return out;
}

}  // namespace

TEST_CASE("run configuration round-trips through JSON") {
  RunConfig c;
  c.out = "somewhere";
  c.seed = 99;
  c.grpo.clip_eps = std::numeric_limits<double>::infinity();
  c.grpo.kl_coeff = 0.0;
  c.sft.batch_size = 5;
  c.budget.max_depth = 4;
  c.backend = "external";
  c.backend_command = {"prover", "--quiet"};
  c.endpoint.url = "http://localhost:1/v1/chat/completions";
  c.endpoint.api_key = "secret";
  const auto text = to_json_text(c);
  CHECK(text.find("secret") == std::string::npos);
  const auto back = run_config_from_json_text(text);
  CHECK(back.out == c.out);
  CHECK(back.seed == 99);
  CHECK(std::isinf(back.grpo.clip_eps));
  CHECK(back.sft.batch_size == 5);
  CHECK(back.budget.max_depth == 4);
  CHECK(back.backend_command == c.backend_command);
  CHECK(back.endpoint.api_key.empty());
  CHECK(to_json_text(back) == text);

  CHECK_THROWS_AS(run_config_from_json_text(R"({"seeed": 3})"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json_text(R"({"sft": {"lr": 3}})"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json_text("{"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json_text(R"({"backend": "lean"})").validate(), ConfigError);
}

TEST_CASE("prepare-data writes one record per reference step, reproducibly") {
  TempDir dir("prepare");
  const auto c = config_in(dir.path() / "a");
  const auto summary = cmd_prepare_data(c);
  const RunLayout layout{c.out};
  const auto corpus = read_manifest(layout.manifest());
  std::size_t steps = 0;
  for (const auto& th : corpus.train) steps += th.reference_proof.size();
  CHECK(corpus.train.size() == 300);
  CHECK(corpus.bench.size() == 30);
  CHECK(summary.adaption_records == steps);
  CHECK(read_jsonl(layout.adaption(), DatasetKind::Adaption).size() == steps);
  CHECK(read_jsonl(layout.reinforce(), DatasetKind::Reinforce).size() == steps);
  CHECK(fs::exists(layout.config_for("prepare-data")));

  const auto c2 = config_in(dir.path() / "b");
  cmd_prepare_data(c2);
  CHECK(artifacts(c.out) == artifacts(c2.out));
}

TEST_CASE("remote thoughts without an endpoint fail before generating anything") {
  TempDir dir("remote");
  auto c = config_in(dir.path() / "run");
  c.thoughts = "remote";
  CHECK_THROWS_AS(cmd_prepare_data(c), ConfigError);
  CHECK_FALSE(fs::exists(RunLayout{c.out}.adaption()));
  CHECK_FALSE(fs::exists(RunLayout{c.out}.manifest()));
}

TEST_CASE("missing inputs are reported by path") {
  TempDir dir("missing");
  const auto c = config_in(dir.path() / "run");
  try {
    cmd_train_sft(c);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(RunLayout{c.out}.adaption().string()) != std::string::npos);
  }
  CHECK_THROWS_AS(cmd_train_rl(c), IoError);
  CHECK_THROWS_AS(make_policy(c, "sft"), ConfigError);
  CHECK_THROWS_AS(make_policy(c, "remote"), ConfigError);
  CHECK(make_policy(c, "uniform") != nullptr);
}

TEST_CASE("full pipeline: reports, orderings, and byte-identical reruns from persisted configs") {
  TempDir dir("pipeline");
  const auto c = config_in(dir.path() / "a");
  run_pipeline(c);
  const RunLayout layout{c.out};

  const auto sft_report = nlohmann::json::parse(slurp(layout.reports() / "sft.json"));
  CHECK(sft_report["final_epoch_loss"].get<double>() < 0.35);

  // The step log has reward columns for every step.
  std::ifstream log(layout.rl_log());
  std::string line;
  std::size_t steps = 0;
  while (std::getline(log, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("mean_format_reward"));
    CHECK(j.contains("mean_accuracy_reward"));
    ++steps;
  }
  CHECK(steps == 3 * read_jsonl(layout.reinforce(), DatasetKind::Reinforce).size());

  const auto eval = nlohmann::json::parse(slurp(layout.reports() / "eval.json"));
  std::set<std::string> policies;
  for (const auto& s : eval["policies"]) {
    policies.insert(s["policy"].get<std::string>());
    CHECK(s["accuracy"].get<double>() ==
          doctest::Approx(s["proved_count"].get<double>() / s["total"].get<double>()));
    CHECK(s["total"] == 30);
  }
  CHECK(policies == std::set<std::string>{"uniform", "sft", "rl"});
  CHECK(eval["rows"].size() == 90);
  const auto table = slurp(layout.reports() / "eval.txt");
  CHECK(table.find("uniform") != std::string::npos);

  // Rerun each command from the configuration it persisted, into a fresh directory.
  const fs::path other = dir.path() / "b";
  for (const char* cmd : {"prepare-data", "train-sft", "train-rl", "eval"}) {
    auto again = load_run_config(layout.config_for(cmd));
    CHECK(again.out == c.out);
    again.out = other;
    const std::string name = cmd;
    if (name == "prepare-data") cmd_prepare_data(again);
    if (name == "train-sft") cmd_train_sft(again);
    if (name == "train-rl") cmd_train_rl(again);
    if (name == "eval") cmd_eval(again);
  }
  CHECK(artifacts(c.out) == artifacts(other));
}

TEST_CASE("prove: identity with the fine-tuned policy, every backend agrees") {
  TempDir dir("prove");
  auto c = config_in(dir.path() / "run");
  cmd_prepare_data(c);
  cmd_train_sft(c);

  const auto kernel = cmd_prove(c, "⊢ P -> P", "sft");
  CHECK(kernel.result.status == SearchStatus::Proved);
  REQUIRE(kernel.result.proof);
  CHECK(kernel.result.proof->size() == 2);
  CHECK(kernel.text.find("proved in 2 step(s)") != std::string::npos);

  c.backend = "stub";
  CHECK(cmd_prove(c, "⊢ P -> P", "sft").result == kernel.result);
  c.backend = "external";
  c.backend_command = {TPROVER_STUB_BACKEND_PATH};
  CHECK(cmd_prove(c, "⊢ P -> P", "sft").result == kernel.result);

  c.backend = "kernel";
  const auto named = cmd_prove(c, "bench_0000", "sft");
  const auto manifest = read_manifest(RunLayout{c.out}.manifest());
  CHECK(named.statement.find(render(manifest.bench.front().statement)) != std::string::npos);

  CHECK(cmd_prove(c, "P", "sft").result.status != SearchStatus::Proved);
  CHECK_THROWS_AS(cmd_prove(c, "P ->", "sft"), ParseError);
}

TEST_CASE("training edge cases") {
  TempDir dir("edges");
  auto c = config_in(dir.path() / "run");
  c.corpus_train = 40;
  cmd_prepare_data(c);
  cmd_train_sft(c);
  c.grpo.kl_coeff = 0.0;
  CHECK(cmd_train_rl(c).steps > 0);
  c.grpo.group_size = 1;
  CHECK_THROWS_AS(cmd_train_rl(c), DegenerateGroup);
}

TEST_CASE("command line: exit codes") {
  TempDir dir("exit");
  const std::string out = "--out " + (dir.path() / "run").string();
  CHECK(cli("--no-such-flag prepare-data").code == 2);
  CHECK(cli("").code == 2);
  CHECK(cli(out + " --backend lean prove 'P -> P' --policy uniform").code == 2);
  CHECK(cli(out + " --thoughts remote prepare-data").code == 2);
  CHECK(cli(out + " train-sft").code == 1);

  CHECK(cli(out + " --corpus-train 40 prepare-data").code == 0);
  CHECK(cli(out + " train-sft").code == 0);
  CHECK(cli(out + " --group-size 1 train-rl").code == 1);

  const auto proved = cli(out + " prove '⊢ P -> P' --policy sft");
  CHECK(proved.code == 0);
  CHECK(proved.out.find("proved in 2 step(s)") != std::string::npos);
  CHECK(cli(out + " prove 'P' --policy sft").code == 1);
  CHECK(cli(out + " prove 'P -> ' --policy sft").code == 2);
  CHECK(cli(out + " --backend stub prove '⊢ P -> P' --policy sft").code == 0);
}

TEST_CASE("command line: config file < environment < flag") {
  TempDir dir("precedence");
  const fs::path run = dir.path() / "run";
  const fs::path file = dir.path() / "base.json";
  RunConfig base = config_in(run);
  base.seed = 3;
  base.budget.max_expansions = 17;
  {
    std::ofstream(file) << to_json_text(base);
  }
  const std::string args = "--config " + file.string() + " prove 'P -> P' --policy exhaustive";
  const auto persisted = [&] { return load_run_config(RunLayout{run}.config_for("prove")); };

  REQUIRE(cli(args).code == 0);
  CHECK(persisted().seed == 3);
  CHECK(persisted().budget.max_expansions == 17);

  REQUIRE(cli(args, "TPROVER_SEED=4").code == 0);
  CHECK(persisted().seed == 4);
  CHECK(persisted().budget.max_expansions == 17);

  REQUIRE(cli("--seed 5 " + args, "TPROVER_SEED=4 TPROVER_BUDGET_EXPANSIONS=23").code == 0);
  CHECK(persisted().seed == 5);
  CHECK(persisted().budget.max_expansions == 23);
}
