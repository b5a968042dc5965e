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

#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tprover/environment.hpp"
#include "tprover/kernel.hpp"

namespace tprover {

// Client for an external prover driven over a line-delimited JSON protocol.
//
//   request  {"id":N,"cmd":"open","theorem":TEXT}
//            {"id":N,"cmd":"run_tac","state_id":S,"tactic":TEXT}
//   reply    {"id":N,"status":"proved"|"state"|"error",
//             "state_id":S?,"state_text":TEXT?,"message":TEXT?}
//
// `open` registers the theorem's root state as state 0. Error messages that
// start with "grammar" are reported as grammar errors, all others as
// inapplicable tactics.
struct BackendConfig {
  // argv of a process speaking the protocol on stdin/stdout ...
  std::vector<std::string> command;
  // ... or a "tcp://host:port" address. Exactly one must be set.
  std::string address;
  std::chrono::milliseconds timeout{10000};
};

class BackendTransport {
 public:
  virtual ~BackendTransport() = default;
  virtual void send_line(const std::string& line) = 0;
  // Throws TimeoutError at the deadline, ProtocolError on EOF.
  virtual std::string read_line(std::chrono::steady_clock::time_point deadline) = 0;
};

// One prover session. At most one request is in flight; every request gets a
// reply or a TimeoutError. Not thread-safe; distinct sessions are independent.
class BackendSession {
 public:
  // Spawns/connects and opens `theorem_source`. Throws SpawnError or
  // HandshakeTimeout.
  static BackendSession open(const std::string& theorem_source, const BackendConfig& config);

  // Adopts an already connected transport (used by tests).
  static BackendSession open(const std::string& theorem_source, std::unique_ptr<BackendTransport> transport,
                             std::chrono::milliseconds timeout);

  BackendSession(BackendSession&&) noexcept;
  BackendSession& operator=(BackendSession&&) noexcept;
  ~BackendSession();

  StateId root() const noexcept { return 0; }
  const std::string& state_text(StateId id) const;

  // Throws ProtocolError for malformed replies and TimeoutError.
  StepResult run_tac(StateId id, const std::string& tactic);

 private:
  BackendSession() = default;
  struct Reply;
  Reply request(const std::string& payload, std::uint64_t id, bool handshake);

  std::unique_ptr<BackendTransport> transport_;
  std::chrono::milliseconds timeout_{10000};
  std::map<StateId, std::string> states_;
  std::uint64_t next_request_ = 0;
};

inline BackendSession open_session(const std::string& theorem_source, const BackendConfig& config) {
  return BackendSession::open(theorem_source, config);
}

// ProofEnvironment over a session. State keys are canonical keys when the
// reported text parses as a kernel state and the raw text otherwise.
class BackendEnvironment final : public ProofEnvironment {
 public:
  explicit BackendEnvironment(BackendSession session) : session_(std::move(session)) {}

  StateId root() const override { return session_.root(); }
  const std::string& state_text(StateId id) const override { return session_.state_text(id); }
  std::string state_key(StateId id) const override;
  StepResult run_tac(StateId id, const std::string& tactic) override { return session_.run_tac(id, tactic); }

 private:
  BackendSession session_;
};

// Server side of the protocol backed by the in-process kernel. `handle` maps
// one request line to one reply line.
class StubBackend {
 public:
  std::string handle(const std::string& request_line);

 private:
  std::map<StateId, ProofState> states_;
  StateId next_state_ = 0;
};

// In-process transport that feeds every request line to a StubBackend.
class LoopbackTransport final : public BackendTransport {
 public:
  void send_line(const std::string& line) override;
  std::string read_line(std::chrono::steady_clock::time_point deadline) override;

 private:
  StubBackend server_;
  std::deque<std::string> pending_;
};

}  // namespace tprover
