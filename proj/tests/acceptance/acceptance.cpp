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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance [WORKDIR]
//
// WORKDIR receives two full pipeline runs (default seed and config) used by
// the end-to-end, training-curve, and reproducibility checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "tprover/errors.hpp"
#include "tprover/pipeline.hpp"
#include "tprover/io.hpp"
#include "tprover/reward.hpp"
#include "tprover/rng.hpp"

using namespace tprover;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ||a - b|| / max(||b||, 1e-8), Frobenius norms.
double matrix_rel_error(const WeightMatrix& a, const WeightMatrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-8);
}

template <typename Loss>
WeightMatrix finite_difference(const PolicyParams& params, Loss&& loss) {
  constexpr double h = 1e-5;
  WeightMatrix fd;
  for (int r = 0; r < kFeatureDim; ++r) {
    for (int c = 0; c < kActionDim; ++c) {
      PolicyParams up = params, down = params;
      up.weights(r, c) += h;
      down.weights(r, c) -= h;
      fd(r, c) = (loss(up) - loss(down)) / (2 * h);
    }
  }
  return fd;
}

PolicyParams random_params(Rng& rng, double scale) {
  PolicyParams p;
  for (int r = 0; r < kFeatureDim; ++r)
    for (int c = 0; c < kActionDim; ++c) p.weights(r, c) = scale * (2.0 * rng.uniform() - 1.0);
  return p;
}

std::vector<ProofState> corpus_states(const ToyCorpus& corpus) {
  std::vector<ProofState> out;
  for (const auto& th : corpus.train) out.push_back(th.root());
  for (const auto& th : corpus.bench) out.push_back(th.root());
  return out;
}

const std::vector<std::string> kUnprovable{
    "P",
    "P -> Q",
    "P ∧ Q",
    "P ∨ Q",
    "(P -> Q) -> Q",
    "(P -> Q) -> P",
    "a = b",
    "a + 0 = a",
    "a + 1 = 1 + a",
    "P -> Q ∧ P",
    "Q -> P ∨ R",
    "(P ∧ Q) -> P",
    "(P ∨ Q) -> P",
    "((P -> Q) -> P) -> P",
    "P -> (P -> Q) -> R",
    "(P -> P) -> Q",
    "a = a -> b = c",
    "P ∧ (Q -> Q)",
    "(Q -> R) -> (P -> Q) -> R",
    "P -> Q -> R -> S",
};

// ---------------------------------------------------------------------------

Outcome kernel_oracle(const ToyCorpus& corpus) {
  std::size_t found = 0, replayed = 0, total = 0;
  for (const auto& root : corpus_states(corpus)) {
    ++total;
    const auto proof = brute_force_provable(root, 6);
    if (!proof) continue;
    ++found;
    replayed += replays_to_finished(root, *proof);
  }
  return {found == total && replayed == total && total == 330,
          std::to_string(found) + "/" + std::to_string(total) + " found, " + std::to_string(replayed) + " replay"};
}

Outcome search_correctness(const ToyCorpus& corpus) {
  ExhaustivePolicy exhaustive;
  SoftmaxPolicy uniform(PolicyParams::zeros());
  const SearchBudget wide{2000, 16, 6};
  std::size_t agree = 0, total = 0, monotone_runs = 0, monotone_ok = 0;
  auto check = [&](const ProofState& root) {
    ++total;
    const bool oracle = brute_force_provable(root, wide.max_depth).has_value();
    const auto result = prove(root, exhaustive, wide, 0);
    const bool sound = !result.proof || replays_to_finished(root, *result.proof);
    agree += sound && ((result.status == SearchStatus::Proved) == oracle);

    // Single-candidate runs expand nodes in non-decreasing depth.
    for (Policy* policy : {static_cast<Policy*>(&uniform), static_cast<Policy*>(&exhaustive)}) {
      std::vector<std::size_t> depths;
      SearchOptions opts;
      opts.on_expand = [&](const SearchNode& n) { depths.push_back(n.depth); };
      prove(root, *policy, {100, 1, 10}, total, opts);
      ++monotone_runs;
      monotone_ok += std::is_sorted(depths.begin(), depths.end());
    }
  };
  for (const auto& root : corpus_states(corpus)) check(root);
  std::size_t crafted_unprovable = 0;
  for (const auto& s : kUnprovable) {
    const auto root = parse_state(s);
    crafted_unprovable += !brute_force_provable(root, wide.max_depth);
    check(root);
  }
  return {agree == total && monotone_ok == monotone_runs && crafted_unprovable == kUnprovable.size(),
          std::to_string(agree) + "/" + std::to_string(total) + " verdicts agree, " + std::to_string(monotone_ok) +
              "/" + std::to_string(monotone_runs) + " BFS runs depth-monotone"};
}

Outcome gradient_checks(const ToyCorpus& corpus) {
  Rng rng(kSeed);
  const auto states = corpus_states(corpus);
  const auto examples = sft_examples(testing::records_for(corpus.train, DatasetKind::Adaption));
  constexpr int kInstances = 100;
  double worst_logprob = 0, worst_sft = 0, worst_grpo = 0;

  for (int i = 0; i < kInstances; ++i) {
    const auto params = random_params(rng, 1.0);
    const auto x = featurize(states[rng.below(states.size())]);
    const int a = static_cast<int>(rng.below(kActionDim));
    const double t = 0.5 + rng.uniform();
    const auto fd = finite_difference(params, [&](const PolicyParams& p) { return logprob(p, x, a, t); });
    worst_logprob = std::max(worst_logprob, matrix_rel_error(grad_logprob(params, x, a, t), fd));
  }
  for (int i = 0; i < kInstances; ++i) {
    const auto params = random_params(rng, 1.0);
    const std::size_t n = 1 + rng.below(16);
    const std::size_t start = rng.below(examples.size() - n);
    const std::span<const SftExample> batch(examples.data() + start, n);
    const auto fd = finite_difference(params, [&](const PolicyParams& p) { return sft_loss(p, batch).loss; });
    worst_sft = std::max(worst_sft, matrix_rel_error(sft_loss(params, batch).gradient, fd));
  }
  for (int i = 0; i < kInstances; ++i) {
    GrpoConfig config;
    config.kl_coeff = rng.uniform();
    config.clip_eps = 0.05 + 0.3 * rng.uniform();
    const auto old = random_params(rng, 1.0);
    auto params = old;
    params.weights += random_params(rng, 0.3).weights;
    const auto ref = random_params(rng, 1.0);
    Group g;
    g.state = states[rng.below(states.size())];
    const auto x = featurize(g.state);
    const std::size_t size = 2 + rng.below(7);
    for (std::size_t k = 0; k < size; ++k) {
      g.actions.push_back(static_cast<int>(rng.below(kActionDim)));
      g.old_logprobs.push_back(logprob(old, x, g.actions.back(), config.temperature));
      g.rewards.push_back(k == 0 ? 1.5 : static_cast<double>(rng.below(2)));
    }
    g.advantages = compute_advantages(g.rewards, config.std_guard);
    const auto fd = finite_difference(params, [&](const PolicyParams& p) { return grpo_loss(p, ref, g, config).loss; });
    worst_grpo = std::max(worst_grpo, matrix_rel_error(grpo_loss(params, ref, g, config).gradient, fd));
  }
  const bool ok = worst_logprob < 1e-5 && worst_sft < 1e-5 && worst_grpo < 1e-5;
  return {ok, std::to_string(kInstances) + " instances each, worst rel err logprob " + fmt(worst_logprob, 2) +
                  ", sft " + fmt(worst_sft, 2) + ", grpo " + fmt(worst_grpo, 2)};
}

Outcome advantage_contract() {
  Rng rng(kSeed);
  double worst_mean = 0, worst_std = 0;
  std::size_t equal_ok = 0;
  constexpr int kGroups = 1000;
  for (int i = 0; i < kGroups; ++i) {
    std::vector<double> r(2 + rng.below(15));
    for (auto& x : r) x = 3.0 * rng.uniform() - 1.0;
    const auto a = compute_advantages(r, 0.0);
    double m = 0, v = 0;
    for (double x : a) m += x;
    m /= static_cast<double>(a.size());
    for (double x : a) v += (x - m) * (x - m);
    worst_mean = std::max(worst_mean, std::abs(m));
    worst_std = std::max(worst_std, std::abs(std::sqrt(v / static_cast<double>(a.size())) - 1.0));

    const std::vector<double> same(r.size(), r.front());
    const auto z = compute_advantages(same, 1e-6);
    equal_ok += std::all_of(z.begin(), z.end(), [](double x) { return x == 0.0; });
  }
  return {worst_mean < 1e-9 && worst_std < 1e-6 && equal_ok == kGroups,
          "max |mean| " + fmt(worst_mean, 2) + ", max |std-1| " + fmt(worst_std, 2) + ", " +
              std::to_string(equal_ok) + "/" + std::to_string(kGroups) + " equal groups all zero"};
}

Outcome reward_suite(const fs::path& run) {
  const Goal goal{{{"h1", parse_formula("P")}}, parse_formula("P")};
  std::size_t templates = 0;
  for (int a = 0; a < kActionDim; ++a) {
    templates += format_reward(wrap_completion("The target is an atom.", render_action(a, goal))) == 1.0;
  }
  std::size_t malformed_zero = 0;
  const auto malformed = testing::malformed_completions();
  for (const auto& m : malformed) malformed_zero += format_reward(m) == 0.0;

  const auto records = read_jsonl(RunLayout{run}.adaption(), DatasetKind::Adaption);
  std::size_t consistent = 0;
  for (const auto& r : records) {
    consistent += format_reward(r.completion) == 1.0 && accuracy_reward(r.completion, r.groundtruth) == 1.0;
  }
  return {templates == kActionDim && malformed.size() == 20 && malformed_zero == 20 && consistent == records.size() &&
              !records.empty(),
          std::to_string(templates) + "/13 templates, " + std::to_string(malformed_zero) + "/" +
              std::to_string(malformed.size()) + " malformed rejected, " + std::to_string(consistent) + "/" +
              std::to_string(records.size()) + " records consistent"};
}

Outcome end_to_end(const fs::path& run, double pipeline_seconds) {
  const auto report = nlohmann::json::parse(slurp(RunLayout{run}.reports() / "eval.json"));
  std::map<std::string, std::size_t> proved;
  for (const auto& s : report["policies"]) {
    if (s["split"] == "bench") proved[s["policy"].get<std::string>()] = s["proved_count"].get<std::size_t>();
  }
  const auto u = proved["uniform"], s = proved["sft"], r = proved["rl"];
  const bool ok = proved.size() == 3 && r >= s && s > u && pipeline_seconds < 15 * 60;
  return {ok, "proved/30: uniform " + std::to_string(u) + ", sft " + std::to_string(s) + ", rl " + std::to_string(r) +
                  "; pipeline " + fmt(pipeline_seconds, 3) + " s"};
}

Outcome training_curves(const fs::path& run) {
  const RunLayout layout{run};
  std::vector<std::pair<std::size_t, double>> sft;
  {
    std::ifstream in(layout.sft_log());
    std::string line;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      sft.emplace_back(j["epoch"].get<std::size_t>(), j["loss"].get<double>());
    }
  }
  if (sft.empty()) return {false, "empty SFT log"};
  const double step0 = sft.front().second;
  const std::size_t last_epoch = sft.back().first;
  double final_sum = 0;
  std::size_t final_n = 0;
  for (const auto& [epoch, loss] : sft) {
    if (epoch == last_epoch) {
      final_sum += loss;
      ++final_n;
    }
  }
  const double final_loss = final_sum / static_cast<double>(final_n);

  const auto rl = nlohmann::json::parse(slurp(layout.reports() / "rl.json"));
  const double first = rl["first_epoch_accuracy"].get<double>();
  const double final = rl["final_epoch_accuracy"].get<double>();
  const bool ok = std::abs(step0 - std::log(13.0)) < 1e-9 && final_loss < 0.35 && final > first;
  return {ok, "SFT NLL " + fmt(step0) + " -> " + fmt(final_loss) + "; GRPO accuracy " + fmt(first) + " -> " +
                  fmt(final)};
}

Outcome backend_agnosticism(const ToyCorpus& corpus, const fs::path& run) {
  SoftmaxPolicy tuned(load_params(RunLayout{run}.sft_params()));
  ExhaustivePolicy exhaustive;
  std::size_t agree = 0, total = 0;
  const auto states = corpus_states(corpus);
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (Policy* policy : {static_cast<Policy*>(&tuned), static_cast<Policy*>(&exhaustive)}) {
      const auto kernel = prove(states[i], *policy, {}, i);
      BackendEnvironment loop(
          BackendSession::open(render_state(states[i]), std::make_unique<LoopbackTransport>(), std::chrono::seconds(5)));
      BackendConfig child;
      child.command = {TPROVER_STUB_BACKEND_PATH};
      child.timeout = std::chrono::seconds(5);
      BackendEnvironment process(open_session(render_state(states[i]), child));
      const auto via_loop = prove(loop, *policy, {}, i);
      const auto via_process = prove(process, *policy, {}, i);
      const auto same = [&](const SearchResult& r) { return r.status == kernel.status && r.proof == kernel.proof; };
      agree += same(via_loop) && same(via_process);
      ++total;
    }
  }
  return {agree == total && total == 2 * 330,
          std::to_string(agree) + "/" + std::to_string(total) + " (theorem, policy) pairs agree over loopback and process"};
}

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

Outcome reproducibility(const fs::path& run, const fs::path& rerun) {
  const RunLayout layout{run};
  fs::remove_all(rerun);
  for (const std::string cmd : {"prepare-data", "train-sft", "train-rl", "eval"}) {
    auto config = load_run_config(layout.config_for(cmd));
    config.out = rerun;
    if (cmd == "prepare-data") cmd_prepare_data(config);
    if (cmd == "train-sft") cmd_train_sft(config);
    if (cmd == "train-rl") cmd_train_rl(config);
    if (cmd == "eval") cmd_eval(config);
  }
  const auto a = artifacts(run), b = artifacts(rerun);
  std::size_t identical = 0;
  for (const auto& [path, bytes] : a) {
    const auto it = b.find(path);
    identical += it != b.end() && it->second == bytes;
  }
  return {identical == a.size() && a.size() == b.size() && !a.empty(),
          std::to_string(identical) + "/" + std::to_string(a.size()) + " artifacts byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "tprover-acceptance";
  const fs::path run = work / "run";
  fs::remove_all(run);
  fs::create_directories(work);

  RunConfig config;
  config.out = run;
  config.seed = kSeed;
  const auto pipeline_start = Clock::now();
  try {
    cmd_prepare_data(config);
    cmd_train_sft(config);
    cmd_train_rl(config);
    cmd_eval(config);
  } catch (const std::exception& e) {
    std::cerr << "pipeline failed: " << e.what() << "\n";
  }
  const double pipeline_seconds = seconds_since(pipeline_start);
  const ToyCorpus corpus = gen_toy_corpus(kSeed, config.corpus_train, config.corpus_bench);

  struct Criterion {
    int id;
    std::string name;
    double limit_s;  // 0 means no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "kernel oracle equivalence", 10, [&] { return kernel_oracle(corpus); }},
      {2, "search correctness", 30, [&] { return search_correctness(corpus); }},
      {3, "gradient checks", 10, [&] { return gradient_checks(corpus); }},
      {4, "advantage contract", 0, [&] { return advantage_contract(); }},
      {5, "reward and format suite", 0, [&] { return reward_suite(run); }},
      {6, "end-to-end benchmark ordering", 0, [&] { return end_to_end(run, pipeline_seconds); }},
      {7, "training curves", 0, [&] { return training_curves(run); }},
      {8, "backend agnosticism", 0, [&] { return backend_agnosticism(corpus, run); }},
      {9, "reproducibility", 0, [&] { return reproducibility(run, work / "rerun"); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double s = seconds_since(start);
    if (c.limit_s > 0 && s >= c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + fmt(c.limit_s) + " s limit";
    }
    failures += !o.pass;
    std::printf("%s %d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(), s);
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
