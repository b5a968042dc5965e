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
#include <utility>
#include <vector>

#include "tprover/chat_client.hpp"
#include "tprover/kernel.hpp"
#include "tprover/prompt.hpp"

namespace tprover {

enum class DatasetKind { Adaption, Reinforce };

const char* to_string(DatasetKind kind);

// One training sample. Adaption records carry a completion (thought plus the
// answer-wrapped tactic); reinforce records leave it empty. The groundtruth is
// always the canonical rendering of the next tactic.
struct SampleRecord {
  Prompt prompt;
  std::string completion;
  std::string groundtruth;
  std::string state_key;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct ToyTheorem {
  std::string name;
  Formula statement;
  std::vector<Tactic> reference_proof;

  ProofState root() const { return ProofState::from_statement(statement); }
};

struct ToyCorpus {
  std::vector<ToyTheorem> train;
  std::vector<ToyTheorem> bench;
};

// Shape space of the generator. The defaults give a space far larger than the
// standard 300 + 30 split; tests shrink it to exercise exhaustion.
struct CorpusShape {
  std::size_t atoms = 6;
  std::size_t max_premises = 4;
  std::size_t max_proof_depth = 6;
  std::size_t max_stale_attempts = 20000;
};

// Deterministic generator of theorems the kernel proves within
// `max_proof_depth` steps using at most four hypotheses. Train and bench are
// disjoint by rendered statement and every reference proof is a shortest
// proof found by brute_force_provable and verified by replay. Throws
// GenerationExhausted when the shape space cannot supply the counts.
ToyCorpus gen_toy_corpus(std::uint64_t seed, std::size_t n_train, std::size_t n_bench,
                         const CorpusShape& shape = {});

// (state before step, tactic) for every step of the reference proof.
// Throws InvalidProof if the replay fails part way.
std::vector<std::pair<ProofState, Tactic>> extract_pairs(const ToyTheorem& theorem);

// Produces the thought paragraph for a (state, next tactic) pair.
class ThoughtGenerator {
 public:
  virtual ~ThoughtGenerator() = default;
  virtual std::string generate(const ProofState& state, const Tactic& groundtruth) = 0;
};

// Offline template: "The target is <connective>; applying <tactic> progresses the goal."
class StubThoughtGenerator final : public ThoughtGenerator {
 public:
  std::string generate(const ProofState& state, const Tactic& groundtruth) override;
};

// Sends the thought instruction, the rendered state, and the reference tactic
// to a chat endpoint and returns the raw reply.
class RemoteThoughtGenerator final : public ThoughtGenerator {
 public:
  explicit RemoteThoughtGenerator(EndpointConfig config) : client_(std::move(config)) {}
  std::string generate(const ProofState& state, const Tactic& groundtruth) override;

  // The single user message sent for a pair.
  static std::string request_text(const ProofState& state, const Tactic& groundtruth);

 private:
  ChatClient client_;
};

std::string generate_thought(const ProofState& state, const Tactic& groundtruth, ThoughtGenerator& generator);

// completion = "<think>" + thought + "</think>\n<answer>```lean\n" + tactic + "\n```</answer>".
// Reinforce records keep only prompt, groundtruth, and state key.
std::vector<SampleRecord> build_records(const std::vector<std::pair<ProofState, Tactic>>& pairs,
                                        const std::vector<std::string>& thoughts, DatasetKind kind);

// One JSON object per line. Adaption lines hold {prompt, completion,
// state_key}; reinforce lines hold {prompt, groundtruth, state_key}.
void write_jsonl(const std::vector<SampleRecord>& records, DatasetKind kind, const std::filesystem::path& path);

// Rejects unknown or missing fields with SchemaError naming the line. For
// adaption records the groundtruth is recovered from the completion.
std::vector<SampleRecord> read_jsonl(const std::filesystem::path& path, DatasetKind kind);

// Corpus manifest: one line per theorem with split, name, statement, proof
// and proof length.
void write_manifest(const ToyCorpus& corpus, const std::filesystem::path& path);
ToyCorpus read_manifest(const std::filesystem::path& path);

}  // namespace tprover
