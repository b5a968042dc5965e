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

#include "tprover/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "tprover/errors.hpp"
#include "tprover/io.hpp"
#include "tprover/rng.hpp"

namespace tprover {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Stream ids for seeds derived from RunConfig::seed.
constexpr std::uint64_t kSftStream = 1;
constexpr std::uint64_t kGrpoStream = 2;
constexpr std::uint64_t kTrainEvalStream = 3;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!names.count(item.key())) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

void read_ms(const json& obj, const char* key, std::chrono::milliseconds& target) {
  if (obj.contains(key)) target = std::chrono::milliseconds(obj.at(key).get<std::int64_t>());
}

ordered_json config_body(const RunConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["corpus"] = {{"train", c.corpus_train}, {"bench", c.corpus_bench}};
  j["sft"] = {{"learning_rate", c.sft.learning_rate}, {"epochs", c.sft.epochs}, {"batch_size", c.sft.batch_size}};
  ordered_json g;
  g["group_size"] = c.grpo.group_size;
  // JSON has no infinity; null stands for "clipping disabled".
  g["clip_eps"] = std::isinf(c.grpo.clip_eps) ? ordered_json(nullptr) : ordered_json(c.grpo.clip_eps);
  g["kl_coeff"] = c.grpo.kl_coeff;
  g["learning_rate"] = c.grpo.learning_rate;
  g["temperature"] = c.grpo.temperature;
  g["iterations"] = c.grpo.iterations;
  g["epochs"] = c.grpo.epochs;
  g["std_guard"] = c.grpo.std_guard;
  j["grpo"] = g;
  j["reward"] = {{"accuracy", c.grpo.reward.accuracy}, {"format", c.grpo.reward.format}};
  j["budget"] = {{"max_expansions", c.budget.max_expansions},
                 {"candidates_per_node", c.budget.candidates_per_node},
                 {"max_depth", c.budget.max_depth}};
  j["search_temperature"] = c.search_temperature;
  // The API key is deliberately not persisted.
  j["endpoint"] = {{"url", c.endpoint.url},
                   {"model", c.endpoint.model},
                   {"timeout_ms", c.endpoint.timeout.count()},
                   {"max_retries", c.endpoint.max_retries},
                   {"max_tokens", c.endpoint.max_tokens}};
  j["thoughts"] = c.thoughts;
  j["backend"] = c.backend;
  j["backend_command"] = c.backend_command;
  j["backend_address"] = c.backend_address;
  j["backend_timeout_ms"] = c.backend_timeout.count();
  j["eval_train"] = c.eval_train;
  return j;
}

void persist_config(const RunConfig& config, const std::string& command) {
  write_text_file(RunLayout{config.out}.config_for(command), to_json_text(config));
}

void require_file(const std::filesystem::path& path, const std::string& what) {
  if (!std::filesystem::exists(path)) {
    throw IoError(what + " not found: " + path.string());
  }
}

std::string dump_report(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

void RunConfig::validate() const {
  if (thoughts != "stub" && thoughts != "remote") throw ConfigError("thoughts must be 'stub' or 'remote'");
  if (backend != "kernel" && backend != "stub" && backend != "external") {
    throw ConfigError("backend must be 'kernel', 'stub' or 'external'");
  }
  if (backend == "external" && backend_command.empty() && backend_address.empty()) {
    throw ConfigError("external backend needs a command or an address");
  }
  if (corpus_bench == 0) throw ConfigError("corpus bench size must be positive");
  if (!(search_temperature > 0.0) || !std::isfinite(search_temperature)) {
    throw ConfigError("search temperature must be positive");
  }
  if (backend_timeout.count() <= 0) throw ConfigError("backend timeout must be positive");
  sft.validate();
  grpo.validate();
  budget.validate();
  if (grpo.reward.accuracy < 0.0 || grpo.reward.format < 0.0) throw ConfigError("reward weights must be >= 0");
}

std::string to_json_text(const RunConfig& config) {
  ordered_json j;
  j["out"] = config.out.string();
  const ordered_json body = config_body(config);
  for (const auto& item : body.items()) j[item.key()] = item.value();
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json_text(const std::string& text) {
  RunConfig c;
  try {
    const json j = json::parse(text);
    reject_unknown(j,
                   {"out", "seed", "corpus", "sft", "grpo", "reward", "budget", "search_temperature", "endpoint",
                    "thoughts", "backend", "backend_command", "backend_address", "backend_timeout_ms", "eval_train"},
                   "config");
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    read_opt(j, "seed", c.seed);
    if (j.contains("corpus")) {
      const auto& o = j["corpus"];
      reject_unknown(o, {"train", "bench"}, "corpus");
      read_opt(o, "train", c.corpus_train);
      read_opt(o, "bench", c.corpus_bench);
    }
    if (j.contains("sft")) {
      const auto& o = j["sft"];
      reject_unknown(o, {"learning_rate", "epochs", "batch_size"}, "sft");
      read_opt(o, "learning_rate", c.sft.learning_rate);
      read_opt(o, "epochs", c.sft.epochs);
      read_opt(o, "batch_size", c.sft.batch_size);
    }
    if (j.contains("grpo")) {
      const auto& o = j["grpo"];
      reject_unknown(o,
                     {"group_size", "clip_eps", "kl_coeff", "learning_rate", "temperature", "iterations", "epochs",
                      "std_guard"},
                     "grpo");
      read_opt(o, "group_size", c.grpo.group_size);
      if (o.contains("clip_eps")) {
        c.grpo.clip_eps =
            o["clip_eps"].is_null() ? std::numeric_limits<double>::infinity() : o["clip_eps"].get<double>();
      }
      read_opt(o, "kl_coeff", c.grpo.kl_coeff);
      read_opt(o, "learning_rate", c.grpo.learning_rate);
      read_opt(o, "temperature", c.grpo.temperature);
      read_opt(o, "iterations", c.grpo.iterations);
      read_opt(o, "epochs", c.grpo.epochs);
      read_opt(o, "std_guard", c.grpo.std_guard);
    }
    if (j.contains("reward")) {
      const auto& o = j["reward"];
      reject_unknown(o, {"accuracy", "format"}, "reward");
      read_opt(o, "accuracy", c.grpo.reward.accuracy);
      read_opt(o, "format", c.grpo.reward.format);
    }
    if (j.contains("budget")) {
      const auto& o = j["budget"];
      reject_unknown(o, {"max_expansions", "candidates_per_node", "max_depth"}, "budget");
      read_opt(o, "max_expansions", c.budget.max_expansions);
      read_opt(o, "candidates_per_node", c.budget.candidates_per_node);
      read_opt(o, "max_depth", c.budget.max_depth);
    }
    read_opt(j, "search_temperature", c.search_temperature);
    if (j.contains("endpoint")) {
      const auto& o = j["endpoint"];
      reject_unknown(o, {"url", "model", "timeout_ms", "max_retries", "max_tokens"}, "endpoint");
      read_opt(o, "url", c.endpoint.url);
      read_opt(o, "model", c.endpoint.model);
      read_ms(o, "timeout_ms", c.endpoint.timeout);
      read_opt(o, "max_retries", c.endpoint.max_retries);
      read_opt(o, "max_tokens", c.endpoint.max_tokens);
    }
    read_opt(j, "thoughts", c.thoughts);
    read_opt(j, "backend", c.backend);
    read_opt(j, "backend_command", c.backend_command);
    read_opt(j, "backend_address", c.backend_address);
    read_ms(j, "backend_timeout_ms", c.backend_timeout);
    read_opt(j, "eval_train", c.eval_train);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  require_file(path, "config file");
  return run_config_from_json_text(read_text_file(path));
}

PrepareSummary cmd_prepare_data(const RunConfig& config) {
  config.validate();
  std::unique_ptr<ThoughtGenerator> thoughts;
  if (config.thoughts == "remote") {
    if (config.endpoint.url.empty() || config.endpoint.model.empty()) {
      throw ConfigError("--thoughts remote needs --endpoint-url and --endpoint-model");
    }
    thoughts = std::make_unique<RemoteThoughtGenerator>(config.endpoint);
  } else {
    thoughts = std::make_unique<StubThoughtGenerator>();
  }
  persist_config(config, "prepare-data");

  const RunLayout layout{config.out};
  const ToyCorpus corpus = gen_toy_corpus(config.seed, config.corpus_train, config.corpus_bench);
  write_manifest(corpus, layout.manifest());

  std::vector<std::pair<ProofState, Tactic>> pairs;
  for (const auto& theorem : corpus.train) {
    auto steps = extract_pairs(theorem);
    pairs.insert(pairs.end(), steps.begin(), steps.end());
  }
  std::vector<std::string> texts;
  texts.reserve(pairs.size());
  for (const auto& [state, tactic] : pairs) texts.push_back(generate_thought(state, tactic, *thoughts));

  const auto adaption = build_records(pairs, texts, DatasetKind::Adaption);
  const auto reinforce = build_records(pairs, texts, DatasetKind::Reinforce);
  write_jsonl(adaption, DatasetKind::Adaption, layout.adaption());
  write_jsonl(reinforce, DatasetKind::Reinforce, layout.reinforce());
  return {corpus.train.size(), corpus.bench.size(), adaption.size(), reinforce.size()};
}

SftSummary cmd_train_sft(const RunConfig& config) {
  config.validate();
  const RunLayout layout{config.out};
  require_file(layout.adaption(), "adaption dataset");
  persist_config(config, "train-sft");

  const auto records = read_jsonl(layout.adaption(), DatasetKind::Adaption);
  SftConfig sft = config.sft;
  sft.seed = mix_seed(config.seed, kSftStream);
  const SftResult result = train_sft(PolicyParams::zeros(), records, sft);

  save_params(result.params, layout.sft_params());
  write_sft_curve(result.curve, layout.sft_log());

  SftSummary s;
  s.steps = result.curve.size();
  s.first_epoch_loss = epoch_mean_loss(result.curve, 0);
  s.final_epoch_loss = epoch_mean_loss(result.curve, sft.epochs - 1);
  ordered_json report;
  report["examples"] = records.size();
  report["steps"] = s.steps;
  report["initial_loss"] = result.curve.empty() ? 0.0 : result.curve.front().loss;
  report["first_epoch_loss"] = s.first_epoch_loss;
  report["final_epoch_loss"] = s.final_epoch_loss;
  write_text_file(layout.reports() / "sft.json", dump_report(report));
  return s;
}

RlSummary cmd_train_rl(const RunConfig& config) {
  config.validate();
  const RunLayout layout{config.out};
  require_file(layout.reinforce(), "reinforce dataset");
  require_file(layout.sft_params(), "SFT parameters");
  persist_config(config, "train-rl");

  const auto records = read_jsonl(layout.reinforce(), DatasetKind::Reinforce);
  const PolicyParams sft = load_params(layout.sft_params());
  GrpoConfig grpo = config.grpo;
  grpo.seed = mix_seed(config.seed, kGrpoStream);
  const RlResult result = rl_train(sft, sft, records, grpo);

  save_params(result.params, layout.rl_params());
  write_train_log(result.log, layout.rl_log());

  RlSummary s;
  s.steps = result.log.size();
  s.first_epoch_accuracy = epoch_mean_accuracy(result.log, 0);
  s.final_epoch_accuracy = epoch_mean_accuracy(result.log, grpo.epochs - 1);
  std::size_t degenerate = 0;
  for (const auto& r : result.log) degenerate += r.degenerate ? 1 : 0;
  ordered_json report;
  report["records"] = records.size();
  report["steps"] = s.steps;
  report["degenerate_groups"] = degenerate;
  ordered_json per_epoch = ordered_json::array();
  for (std::size_t e = 0; e < grpo.epochs; ++e) per_epoch.push_back(epoch_mean_accuracy(result.log, e));
  report["epoch_mean_accuracy"] = per_epoch;
  report["first_epoch_accuracy"] = s.first_epoch_accuracy;
  report["final_epoch_accuracy"] = s.final_epoch_accuracy;
  write_text_file(layout.reports() / "rl.json", dump_report(report));
  return s;
}

std::unique_ptr<Policy> make_policy(const RunConfig& config, const std::string& choice) {
  const RunLayout layout{config.out};
  if (choice == "uniform") return std::make_unique<SoftmaxPolicy>(PolicyParams::zeros());
  if (choice == "exhaustive") return std::make_unique<ExhaustivePolicy>(std::numeric_limits<std::size_t>::max());
  if (choice == "remote") {
    if (config.endpoint.url.empty() || config.endpoint.model.empty()) {
      throw ConfigError("remote policy needs --endpoint-url and --endpoint-model");
    }
    return std::make_unique<RemotePolicy>(config.endpoint);
  }
  std::filesystem::path path;
  if (choice == "sft") {
    path = layout.sft_params();
  } else if (choice == "rl") {
    path = layout.rl_params();
  } else {
    path = choice;
  }
  if (!std::filesystem::exists(path)) {
    throw ConfigError("policy '" + choice + "': parameter file not found: " + path.string());
  }
  return std::make_unique<SoftmaxPolicy>(load_params(path));
}

SearchResult prove_with_backend(const RunConfig& config, const ProofState& root, Policy& policy,
                                std::uint64_t seed) {
  SearchOptions options;
  options.temperature = config.search_temperature;
  if (config.backend == "kernel") return prove(root, policy, config.budget, seed, options);
  if (root.finished()) throw std::invalid_argument("prove: root state has no goals");

  const std::string source = render_state(root);
  BackendSession session = [&] {
    if (config.backend == "stub") {
      return BackendSession::open(source, std::make_unique<LoopbackTransport>(), config.backend_timeout);
    }
    return BackendSession::open(source, BackendConfig{config.backend_command, config.backend_address,
                                                      config.backend_timeout});
  }();
  BackendEnvironment env(std::move(session));
  return prove(env, policy, config.budget, seed, options);
}

ProveReport cmd_prove(const RunConfig& config, const std::string& target, const std::string& policy_choice) {
  config.validate();
  persist_config(config, "prove");
  auto policy = make_policy(config, policy_choice);

  ProveReport report;
  ProofState root;
  bool named = false;
  const RunLayout layout{config.out};
  if (std::filesystem::exists(layout.manifest())) {
    const ToyCorpus corpus = read_manifest(layout.manifest());
    for (const auto* split : {&corpus.bench, &corpus.train}) {
      for (const auto& t : *split) {
        if (t.name == target) {
          root = t.root();
          report.statement = render(t.statement);
          named = true;
        }
      }
    }
  }
  if (!named) {
    root = parse_state(target);
    if (root.finished()) throw ConfigError("statement has no goal");
    report.statement = render_state(root);
  }

  report.result = prove_with_backend(config, root, *policy, config.seed);

  std::ostringstream out;
  out << "theorem: " << report.statement << "\n";
  if (report.result.proof) {
    out << "proved in " << report.result.proof->size() << " step(s):\n";
    for (const auto& t : *report.result.proof) out << "  " << render(t) << "\n";
  } else {
    out << "not proved (" << to_string(report.result.status) << ")\n";
  }
  const auto& st = report.result.stats;
  out << "expansions=" << st.expansions << " tactic_calls=" << st.tactic_calls
      << " grammar_errors=" << st.grammar_errors << " inapplicable=" << st.inapplicable
      << " duplicates_pruned=" << st.duplicates_pruned << " enqueued=" << st.enqueued << "\n";
  report.text = out.str();
  return report;
}

const PolicyScore* EvalReport::find(const std::string& policy, const std::string& split) const {
  for (const auto& s : scores) {
    if (s.policy == policy && s.split == split) return &s;
  }
  return nullptr;
}

std::string render_eval_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "policy" << std::setw(8) << "split" << std::right << std::setw(8) << "proved"
      << std::setw(8) << "total" << std::setw(11) << "accuracy" << "\n";
  for (const auto& s : report.scores) {
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.1f%%", 100.0 * s.accuracy);
    out << std::left << std::setw(14) << s.policy << std::setw(8) << s.split << std::right << std::setw(8)
        << s.proved_count << std::setw(8) << s.total << std::setw(11) << acc << "\n";
  }
  out << "\nNote: the train-split accuracy is the proved rate on training theorems under the same budget.\n"
         "It could also be read as a next-tactic match rate; that reading is not reported here.\n";
  return out.str();
}

EvalReport cmd_eval(const RunConfig& config, const std::vector<std::string>& policies) {
  config.validate();
  const RunLayout layout{config.out};
  require_file(layout.manifest(), "corpus manifest");
  persist_config(config, "eval");
  const ToyCorpus corpus = read_manifest(layout.manifest());

  std::vector<std::unique_ptr<Policy>> resolved;
  for (const auto& name : policies) resolved.push_back(make_policy(config, name));

  EvalReport report;
  auto run_split = [&](const std::string& policy_name, Policy& policy, const std::vector<ToyTheorem>& theorems,
                       const std::string& split, std::uint64_t split_seed) {
    PolicyScore score{policy_name, split, 0, theorems.size(), 0.0};
    for (std::size_t i = 0; i < theorems.size(); ++i) {
      const SearchResult r = prove_with_backend(config, theorems[i].root(), policy, mix_seed(split_seed, i));
      EvalRow row{policy_name, split, theorems[i].name, r.status, r.proof ? r.proof->size() : 0,
                  r.stats.expansions};
      if (r.status == SearchStatus::Proved) ++score.proved_count;
      report.rows.push_back(std::move(row));
    }
    score.accuracy = score.total == 0 ? 0.0 : static_cast<double>(score.proved_count) / score.total;
    report.scores.push_back(score);
  };

  for (std::size_t p = 0; p < policies.size(); ++p) {
    run_split(policies[p], *resolved[p], corpus.bench, "bench", config.seed);
    if (config.eval_train) {
      run_split(policies[p], *resolved[p], corpus.train, "train", mix_seed(config.seed, kTrainEvalStream));
    }
  }

  ordered_json j;
  j["config"] = config_body(config);
  ordered_json scores = ordered_json::array();
  for (const auto& s : report.scores) {
    scores.push_back({{"policy", s.policy},
                      {"split", s.split},
                      {"proved_count", s.proved_count},
                      {"total", s.total},
                      {"accuracy", s.accuracy}});
  }
  j["policies"] = scores;
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"policy", r.policy},
                    {"split", r.split},
                    {"name", r.name},
                    {"status", to_string(r.status)},
                    {"proof_length", r.proof_length},
                    {"expansions", r.expansions}});
  }
  j["rows"] = rows;
  j["note"] = "train-split accuracy is the proved rate on training theorems, not a next-tactic match rate";
  write_text_file(layout.reports() / "eval.json", dump_report(j));
  write_text_file(layout.reports() / "eval.txt", render_eval_table(report));
  return report;
}

}  // namespace tprover
