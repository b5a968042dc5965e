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

#include "tprover/dataset.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <unordered_set>

#include "tprover/errors.hpp"
#include "tprover/reward.hpp"
#include "tprover/rng.hpp"
#include "tprover/search.hpp"

namespace tprover {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxIntros = 4;

class StatementSampler {
 public:
  StatementSampler(Rng& rng, const CorpusShape& shape) : rng_(rng), shape_(shape) {}

  Formula sample() {
    const auto premise_count = static_cast<std::size_t>(rng_.below(shape_.max_premises + 1));
    std::vector<Formula> premises;
    std::vector<Formula> reachable;
    for (std::size_t i = 0; i < premise_count; ++i) {
      if (rng_.uniform() < 0.55) {
        premises.push_back(atom());
        reachable.push_back(premises.back());
      } else {
        Formula rhs = atom();
        premises.push_back(Formula::imp(atom(), rhs));
        reachable.push_back(rhs);
      }
    }
    std::size_t intros = premise_count;
    Formula conclusion = conclusion_formula(reachable, intros);
    for (auto it = premises.rbegin(); it != premises.rend(); ++it) conclusion = Formula::imp(*it, conclusion);
    return conclusion;
  }

 private:
  Formula atom() {
    static constexpr const char* kNames[] = {"P", "Q", "R", "S", "T", "U", "V", "W"};
    const std::size_t n = std::min<std::size_t>(shape_.atoms, std::size(kNames));
    return Formula::atom(kNames[rng_.below(n)]);
  }

  Term term() {
    static constexpr const char* kVars[] = {"a", "b", "c"};
    const double r = rng_.uniform();
    if (r < 0.4) return Term::var(kVars[rng_.below(3)]);
    if (r < 0.6) return Term::nat(rng_.below(3));
    return Term::add(Term::var(kVars[rng_.below(3)]), Term::nat(rng_.below(3)));
  }

  Formula equation() {
    Term lhs = term();
    if (rng_.uniform() < 0.75) return Formula::eq(lhs, lhs);
    return Formula::eq(lhs, term());
  }

  // Biased towards formulas the premises can discharge.
  Formula leaf(const std::vector<Formula>& reachable) {
    const double r = rng_.uniform();
    if (!reachable.empty() && r < 0.6) return reachable[rng_.below(reachable.size())];
    if (r < 0.8) return equation();
    return atom();
  }

  Formula conclusion_formula(const std::vector<Formula>& reachable, std::size_t& intros) {
    const double r = rng_.uniform();
    if (r < 0.30) return leaf(reachable);
    if (r < 0.45) return Formula::conj(leaf(reachable), leaf(reachable));
    if (r < 0.62) return Formula::disj(leaf(reachable), leaf(reachable));
    if (r < 0.77) return equation();
    if (intros < kMaxIntros) {
      // Inner implication: its premise becomes reachable after one more intro.
      ++intros;
      Formula premise = atom();
      auto extended = reachable;
      extended.push_back(premise);
      return Formula::imp(premise, leaf(extended));
    }
    return leaf(reachable);
  }

  Rng& rng_;
  const CorpusShape& shape_;
};

std::string connective_phrase(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      return "an atomic proposition";
    case Formula::Kind::Imp:
      return "an implication";
    case Formula::Kind::And:
      return "a conjunction";
    case Formula::Kind::Or:
      return "a disjunction";
    case Formula::Kind::Eq:
      return "an equation";
  }
  return "a proposition";
}

json prompt_to_json(const Prompt& prompt) {
  json messages = json::array();
  for (const auto& m : prompt.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  return messages;
}

Prompt prompt_from_json(const json& j, std::size_t line) {
  if (!j.is_array()) throw SchemaError("prompt must be an array of messages", line);
  Prompt p;
  for (const auto& m : j) {
    if (!m.is_object() || m.size() != 2 || !m.contains("role") || !m.contains("content") ||
        !m["role"].is_string() || !m["content"].is_string()) {
      throw SchemaError("malformed prompt message", line);
    }
    p.messages.push_back({m["role"].get<std::string>(), m["content"].get<std::string>()});
  }
  if (p.messages.empty() || p.messages.front().role != "system") {
    throw SchemaError("prompt must start with a system message", line);
  }
  return p;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

// Calls `fn(json, line_number)` for each line; a missing final newline is
// tolerated, malformed JSON is a SchemaError for that line.
template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  auto in = open_for_read(path);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) throw SchemaError("empty line", number);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what(), number);
    }
    if (!j.is_object()) throw SchemaError("record must be a JSON object", number);
    fn(j, number);
  }
}

void require_fields(const json& j, std::initializer_list<const char*> fields, std::size_t line) {
  for (const char* f : fields) {
    if (!j.contains(f)) throw SchemaError(std::string("missing field '") + f + "'", line);
  }
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* f : fields) known = known || key == f;
    if (!known) throw SchemaError("unknown field '" + key + "'", line);
  }
}

std::string string_field(const json& j, const char* field, std::size_t line) {
  if (!j[field].is_string()) throw SchemaError(std::string("field '") + field + "' must be a string", line);
  return j[field].get<std::string>();
}

}  // namespace

const char* to_string(DatasetKind kind) { return kind == DatasetKind::Adaption ? "adaption" : "reinforce"; }

ToyCorpus gen_toy_corpus(std::uint64_t seed, std::size_t n_train, std::size_t n_bench, const CorpusShape& shape) {
  if (n_train == 0 || n_bench == 0) throw ConfigError("corpus sizes must be at least 1");
  if (shape.atoms == 0) throw ConfigError("corpus shape needs at least one atom");
  const std::size_t total = n_train + n_bench;
  Rng rng(mix_seed(seed, 0xC0));
  StatementSampler sampler(rng, shape);

  std::vector<ToyTheorem> pool;
  std::unordered_set<std::string> seen;
  std::size_t stale = 0;
  while (pool.size() < total) {
    if (stale >= shape.max_stale_attempts) {
      throw GenerationExhausted("generator produced only " + std::to_string(pool.size()) + " of " +
                                std::to_string(total) + " distinct theorems");
    }
    Formula statement = sampler.sample();
    std::string key = render(statement);
    if (seen.count(key)) {
      ++stale;
      continue;
    }
    seen.insert(key);
    const ProofState root = ProofState::from_statement(statement);
    auto proof = brute_force_provable(root, shape.max_proof_depth, kMaxIntros);
    if (!proof || !replays_to_finished(root, *proof)) {
      ++stale;
      continue;
    }
    stale = 0;
    pool.push_back({{}, std::move(statement), std::move(*proof)});
  }

  Rng split_rng(mix_seed(seed, 0x5B));
  split_rng.shuffle(pool);
  ToyCorpus corpus;
  auto name = [](const char* prefix, std::size_t i) {
    std::string digits = std::to_string(i);
    return std::string(prefix) + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') + digits;
  };
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (i < n_bench) {
      pool[i].name = name("bench_", corpus.bench.size());
      corpus.bench.push_back(std::move(pool[i]));
    } else {
      pool[i].name = name("train_", corpus.train.size());
      corpus.train.push_back(std::move(pool[i]));
    }
  }
  return corpus;
}

std::vector<std::pair<ProofState, Tactic>> extract_pairs(const ToyTheorem& theorem) {
  std::vector<std::pair<ProofState, Tactic>> pairs;
  ProofState state = theorem.root();
  const auto& proof = theorem.reference_proof;
  for (std::size_t i = 0; i < proof.size(); ++i) {
    pairs.emplace_back(state, proof[i]);
    auto outcome = apply_tactic(state, proof[i]);
    if (std::holds_alternative<ProofFinished>(outcome)) {
      if (i + 1 != proof.size()) throw InvalidProof(theorem.name + ": proof finishes early at step " + std::to_string(i + 1));
      return pairs;
    }
    auto* next = std::get_if<NewState>(&outcome);
    if (!next) {
      throw InvalidProof(theorem.name + ": step " + std::to_string(i + 1) + " (" + render(proof[i]) +
                         ") fails: " + std::get<TacticError>(outcome).message);
    }
    state = std::move(next->state);
  }
  throw InvalidProof(theorem.name + ": proof leaves open goals");
}

std::string StubThoughtGenerator::generate(const ProofState& state, const Tactic& groundtruth) {
  const std::string target = state.goals.empty() ? "closed" : connective_phrase(state.goals.front().target);
  return "The target is " + target + "; applying " + render(groundtruth) + " progresses the goal.";
}

std::string RemoteThoughtGenerator::request_text(const ProofState& state, const Tactic& groundtruth) {
  std::string text(kThoughtPrompt);
  text += "\n\n";
  text += kStateHeader;
  text += "\n";
  text += render_state(state);
  text += "\n\nReference next tactic:\n";
  text += render(groundtruth);
  return text;
}

std::string RemoteThoughtGenerator::generate(const ProofState& state, const Tactic& groundtruth) {
  auto replies = client_.complete({{"user", request_text(state, groundtruth)}}, 1, 1.0);
  return std::move(replies.front());
}

std::string generate_thought(const ProofState& state, const Tactic& groundtruth, ThoughtGenerator& generator) {
  return generator.generate(state, groundtruth);
}

std::vector<SampleRecord> build_records(const std::vector<std::pair<ProofState, Tactic>>& pairs,
                                        const std::vector<std::string>& thoughts, DatasetKind kind) {
  if (kind == DatasetKind::Adaption && thoughts.size() != pairs.size()) {
    throw std::invalid_argument("build_records: pairs and thoughts are not aligned");
  }
  std::vector<SampleRecord> records;
  records.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [state, tactic] = pairs[i];
    SampleRecord r;
    r.prompt = build_prompt(state);
    r.groundtruth = render(tactic);
    r.state_key = canonical_key(state);
    if (kind == DatasetKind::Adaption) r.completion = wrap_completion(thoughts[i], r.groundtruth);
    records.push_back(std::move(r));
  }
  return records;
}

void write_jsonl(const std::vector<SampleRecord>& records, DatasetKind kind, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const auto& r : records) {
    json j{{"prompt", prompt_to_json(r.prompt)}, {"state_key", r.state_key}};
    if (kind == DatasetKind::Adaption) {
      j["completion"] = r.completion;
    } else {
      j["groundtruth"] = r.groundtruth;
    }
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<SampleRecord> read_jsonl(const std::filesystem::path& path, DatasetKind kind) {
  std::vector<SampleRecord> records;
  for_each_json_line(path, [&](const json& j, std::size_t line) {
    SampleRecord r;
    if (kind == DatasetKind::Adaption) {
      require_fields(j, {"prompt", "completion", "state_key"}, line);
      r.completion = string_field(j, "completion", line);
      if (auto parsed = try_parse_completion(r.completion)) r.groundtruth = parsed->answer_tactic;
    } else {
      require_fields(j, {"prompt", "groundtruth", "state_key"}, line);
      r.groundtruth = string_field(j, "groundtruth", line);
    }
    r.prompt = prompt_from_json(j["prompt"], line);
    r.state_key = string_field(j, "state_key", line);
    records.push_back(std::move(r));
  });
  return records;
}

void write_manifest(const ToyCorpus& corpus, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  auto emit = [&out](const char* split, const ToyTheorem& t) {
    json proof = json::array();
    for (const auto& tac : t.reference_proof) proof.push_back(render(tac));
    json j{{"split", split},
           {"name", t.name},
           {"statement", render(t.statement)},
           {"proof", proof},
           {"proof_length", t.reference_proof.size()}};
    out << j.dump() << '\n';
  };
  for (const auto& t : corpus.train) emit("train", t);
  for (const auto& t : corpus.bench) emit("bench", t);
  if (!out) throw IoError("failed writing " + path.string());
}

ToyCorpus read_manifest(const std::filesystem::path& path) {
  ToyCorpus corpus;
  for_each_json_line(path, [&](const json& j, std::size_t line) {
    require_fields(j, {"split", "name", "statement", "proof", "proof_length"}, line);
    ToyTheorem t{string_field(j, "name", line), Formula::atom("_"), {}};
    try {
      t.statement = parse_formula(string_field(j, "statement", line));
      for (const auto& step : j["proof"]) t.reference_proof.push_back(parse_tactic(step.get<std::string>()));
    } catch (const Error& e) {
      throw SchemaError(e.what(), line);
    } catch (const json::exception& e) {
      throw SchemaError(e.what(), line);
    }
    const std::string split = string_field(j, "split", line);
    if (split == "train") {
      corpus.train.push_back(std::move(t));
    } else if (split == "bench") {
      corpus.bench.push_back(std::move(t));
    } else {
      throw SchemaError("unknown split '" + split + "'", line);
    }
  });
  return corpus;
}

}  // namespace tprover
