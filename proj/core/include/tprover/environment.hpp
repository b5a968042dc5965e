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

#include <cstdint>
#include <string>
#include <vector>

#include "tprover/kernel.hpp"

namespace tprover {

using StateId = std::uint64_t;

enum class StepStatus { Proved, NewState, Error };

// Outcome of run_tac against an environment; the environment-level mirror of
// TacticOutcome with states referred to by id.
struct StepResult {
  StepStatus status = StepStatus::Error;
  StateId state = 0;  // NewState only
  ErrorKind error = ErrorKind::InapplicableTactic;
  std::string message;
};

// Something that can run tactic text against registered proof states: the
// in-process kernel or an external prover session.
class ProofEnvironment {
 public:
  virtual ~ProofEnvironment() = default;

  virtual StateId root() const = 0;
  virtual const std::string& state_text(StateId id) const = 0;
  // Novelty key: states with equal keys are treated as the same search node.
  virtual std::string state_key(StateId id) const = 0;
  virtual StepResult run_tac(StateId id, const std::string& tactic) = 0;
};

class KernelEnvironment final : public ProofEnvironment {
 public:
  explicit KernelEnvironment(ProofState root);

  StateId root() const override { return 0; }
  const std::string& state_text(StateId id) const override { return texts_.at(id); }
  std::string state_key(StateId id) const override;
  StepResult run_tac(StateId id, const std::string& tactic) override;

  const ProofState& state(StateId id) const { return states_.at(id); }

 private:
  StateId add(ProofState state);

  std::vector<ProofState> states_;
  std::vector<std::string> texts_;
};

}  // namespace tprover
