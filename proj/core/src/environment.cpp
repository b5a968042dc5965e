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

#include "tprover/environment.hpp"

#include <variant>

namespace tprover {

KernelEnvironment::KernelEnvironment(ProofState root) { add(std::move(root)); }

StateId KernelEnvironment::add(ProofState state) {
  texts_.push_back(render_state(state));
  states_.push_back(std::move(state));
  return states_.size() - 1;
}

std::string KernelEnvironment::state_key(StateId id) const { return canonical_key(states_.at(id)); }

StepResult KernelEnvironment::run_tac(StateId id, const std::string& tactic_text) {
  StepResult r;
  std::string error;
  const auto tactic = try_parse_tactic(tactic_text, &error);
  if (!tactic) {
    r.error = ErrorKind::GrammarError;
    r.message = std::move(error);
    return r;
  }
  auto outcome = apply_tactic(states_.at(id), *tactic);
  if (std::holds_alternative<ProofFinished>(outcome)) {
    r.status = StepStatus::Proved;
  } else if (auto* next = std::get_if<NewState>(&outcome)) {
    r.status = StepStatus::NewState;
    r.state = add(std::move(next->state));
  } else {
    auto& err = std::get<TacticError>(outcome);
    r.error = err.kind;
    r.message = std::move(err.message);
  }
  return r;
}

}  // namespace tprover
