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

#include "tprover/lean_backend.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <nlohmann/json.hpp>
#include <thread>

#include "tprover/errors.hpp"

extern char** environ;

namespace tprover {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left <= 0 ? 0 : static_cast<int>(std::min<long long>(left, 1 << 30));
}

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("backend write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

// Buffered newline-delimited reader over a file descriptor with deadlines.
class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  std::string read_line(Clock::time_point deadline) {
    for (;;) {
      if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      pollfd pfd{fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, remaining_ms(deadline));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("poll failed: ") + std::strerror(errno));
      }
      if (rc == 0) throw TimeoutError("backend did not reply before the deadline");
      char chunk[4096];
      const ssize_t n = ::read(fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw ProtocolError(std::string("backend read failed: ") + std::strerror(errno));
      }
      if (n == 0) throw ProtocolError("backend closed the connection");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buffer_;
};

class ChildProcessTransport final : public BackendTransport {
 public:
  explicit ChildProcessTransport(const std::vector<std::string>& argv) {
    if (argv.empty()) throw SpawnError("backend command is empty");
    ::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) throw SpawnError("pipe failed");
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw SpawnError("pipe failed");
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    const int rc = ::posix_spawnp(&pid_, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(to_child[0]);
    ::close(from_child[1]);
    if (rc != 0) {
      ::close(to_child[1]);
      ::close(from_child[0]);
      pid_ = -1;
      throw SpawnError("cannot start backend '" + argv.front() + "': " + std::strerror(rc));
    }
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
    reader_ = std::make_unique<LineReader>(out_fd_);
  }

  ~ChildProcessTransport() override {
    if (in_fd_ >= 0) ::close(in_fd_);
    if (out_fd_ >= 0) ::close(out_fd_);
    if (pid_ > 0) {
      int status = 0;
      // Closing stdin asks the backend to exit; give it a moment, then kill.
      for (int i = 0; i < 20; ++i) {
        if (::waitpid(pid_, &status, WNOHANG) == pid_) return;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
  }

  void send_line(const std::string& line) override { write_all(in_fd_, line + "\n"); }
  std::string read_line(Clock::time_point deadline) override { return reader_->read_line(deadline); }

 private:
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::unique_ptr<LineReader> reader_;
};

class TcpTransport final : public BackendTransport {
 public:
  TcpTransport(const std::string& address, Clock::time_point deadline) {
    constexpr std::string_view kScheme = "tcp://";
    if (address.rfind(kScheme, 0) != 0) throw SpawnError("backend address must look like tcp://host:port");
    const std::string hostport = address.substr(kScheme.size());
    const auto colon = hostport.rfind(':');
    if (colon == std::string::npos) throw SpawnError("backend address is missing a port");
    const std::string host = hostport.substr(0, colon);
    const std::string port = hostport.substr(colon + 1);
    ::signal(SIGPIPE, SIG_IGN);

    // Refused connections are retried until the handshake deadline.
    while (fd_ < 0) {
      fd_ = try_connect(host, port, deadline);
      if (fd_ >= 0) break;
      if (Clock::now() >= deadline) throw HandshakeTimeout("cannot reach backend at " + address);
      std::this_thread::sleep_for(std::chrono::milliseconds(std::min(50, remaining_ms(deadline))));
    }
    reader_ = std::make_unique<LineReader>(fd_);
  }

  ~TcpTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send_line(const std::string& line) override { write_all(fd_, line + "\n"); }
  std::string read_line(Clock::time_point deadline) override { return reader_->read_line(deadline); }

 private:
  static int try_connect(const std::string& host, const std::string& port, Clock::time_point deadline) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0) return -1;
    int connected = -1;
    for (addrinfo* ai = res; ai && connected < 0; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC | SOCK_NONBLOCK, ai->ai_protocol);
      if (fd < 0) continue;
      int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
      if (rc != 0 && errno == EINPROGRESS) {
        pollfd pfd{fd, POLLOUT, 0};
        if (::poll(&pfd, 1, remaining_ms(deadline)) == 1) {
          int err = 0;
          socklen_t len = sizeof err;
          ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
          rc = err == 0 ? 0 : -1;
        }
      }
      if (rc == 0) {
        ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) & ~O_NONBLOCK);
        connected = fd;
      } else {
        ::close(fd);
      }
    }
    ::freeaddrinfo(res);
    return connected;
  }

  int fd_ = -1;
  std::unique_ptr<LineReader> reader_;
};

std::string error_reply(const json& id, const std::string& message) {
  return json{{"id", id}, {"status", "error"}, {"message", message}}.dump();
}

}  // namespace

struct BackendSession::Reply {
  std::string status;
  std::optional<StateId> state_id;
  std::optional<std::string> state_text;
  std::string message;
};

BackendSession::BackendSession(BackendSession&&) noexcept = default;
BackendSession& BackendSession::operator=(BackendSession&&) noexcept = default;
BackendSession::~BackendSession() = default;

BackendSession BackendSession::open(const std::string& theorem_source, const BackendConfig& config) {
  const auto deadline = Clock::now() + config.timeout;
  std::unique_ptr<BackendTransport> transport;
  if (!config.command.empty() && !config.address.empty()) {
    throw ConfigError("backend: set either a command or an address, not both");
  }
  if (!config.command.empty()) {
    transport = std::make_unique<ChildProcessTransport>(config.command);
  } else if (!config.address.empty()) {
    transport = std::make_unique<TcpTransport>(config.address, deadline);
  } else {
    throw ConfigError("backend: no command or address configured");
  }
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return open(theorem_source, std::move(transport), std::max(left, std::chrono::milliseconds(1)));
}

BackendSession BackendSession::open(const std::string& theorem_source, std::unique_ptr<BackendTransport> transport,
                                    std::chrono::milliseconds timeout) {
  BackendSession s;
  s.transport_ = std::move(transport);
  s.timeout_ = timeout;
  const std::uint64_t id = s.next_request_++;
  const Reply reply = s.request(json{{"id", id}, {"cmd", "open"}, {"theorem", theorem_source}}.dump(), id, true);
  if (reply.status != "state" || !reply.state_id || !reply.state_text) {
    throw ProtocolError("backend rejected theorem: " + (reply.message.empty() ? reply.status : reply.message));
  }
  if (*reply.state_id != 0) throw ProtocolError("backend must register the root state as state 0");
  s.states_[0] = *reply.state_text;
  return s;
}

const std::string& BackendSession::state_text(StateId id) const {
  const auto it = states_.find(id);
  if (it == states_.end()) throw std::out_of_range("unknown backend state " + std::to_string(id));
  return it->second;
}

BackendSession::Reply BackendSession::request(const std::string& payload, std::uint64_t id, bool handshake) {
  const auto deadline = Clock::now() + timeout_;
  std::string line;
  try {
    transport_->send_line(payload);
    line = transport_->read_line(deadline);
  } catch (const TimeoutError& e) {
    if (handshake) throw HandshakeTimeout(std::string("handshake: ") + e.what());
    throw;
  } catch (const ProtocolError& e) {
    if (handshake) throw SpawnError(std::string("backend failed during handshake: ") + e.what());
    throw;
  }

  Reply r;
  try {
    const json j = json::parse(line);
    if (!j.is_object()) throw ProtocolError("reply is not an object");
    if (!j.contains("id") || !j["id"].is_number_unsigned() || j["id"].get<std::uint64_t>() != id) {
      throw ProtocolError("reply id does not match request " + std::to_string(id));
    }
    r.status = j.at("status").get<std::string>();
    if (j.contains("state_id")) r.state_id = j["state_id"].get<StateId>();
    if (j.contains("state_text")) r.state_text = j["state_text"].get<std::string>();
    if (j.contains("message")) r.message = j["message"].get<std::string>();
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed backend reply: ") + e.what());
  }
  if (r.status != "proved" && r.status != "state" && r.status != "error") {
    throw ProtocolError("unknown reply status '" + r.status + "'");
  }
  return r;
}

StepResult BackendSession::run_tac(StateId id, const std::string& tactic) {
  if (!states_.count(id)) throw std::out_of_range("unknown backend state " + std::to_string(id));
  const std::uint64_t rid = next_request_++;
  const Reply reply =
      request(json{{"id", rid}, {"cmd", "run_tac"}, {"state_id", id}, {"tactic", tactic}}.dump(), rid, false);
  StepResult out;
  if (reply.status == "proved") {
    out.status = StepStatus::Proved;
  } else if (reply.status == "state") {
    if (!reply.state_id || !reply.state_text) throw ProtocolError("state reply without state_id/state_text");
    out.status = StepStatus::NewState;
    out.state = *reply.state_id;
    states_[out.state] = *reply.state_text;
  } else {
    out.status = StepStatus::Error;
    out.error = reply.message.rfind("grammar", 0) == 0 ? ErrorKind::GrammarError : ErrorKind::InapplicableTactic;
    out.message = reply.message;
  }
  return out;
}

std::string BackendEnvironment::state_key(StateId id) const {
  const std::string& text = session_.state_text(id);
  try {
    return canonical_key(parse_state(text));
  } catch (const ParseError&) {
    return text;
  }
}

std::string StubBackend::handle(const std::string& request_line) {
  json req;
  try {
    req = json::parse(request_line);
  } catch (const json::parse_error&) {
    return error_reply(nullptr, "protocol: malformed request");
  }
  const json id = req.contains("id") ? req["id"] : json(nullptr);
  const std::string cmd = req.value("cmd", "");
  try {
    if (cmd == "open") {
      states_.clear();
      next_state_ = 0;
      ProofState root = parse_state(req.at("theorem").get<std::string>());
      if (root.finished()) return error_reply(id, "theorem has no goals");
      const std::string text = render_state(root);
      states_.emplace(next_state_, std::move(root));
      return json{{"id", id}, {"status", "state"}, {"state_id", next_state_++}, {"state_text", text}}.dump();
    }
    if (cmd == "run_tac") {
      const auto sid = req.at("state_id").get<StateId>();
      const auto it = states_.find(sid);
      if (it == states_.end()) return error_reply(id, "unknown state " + std::to_string(sid));
      std::string error;
      const auto tactic = try_parse_tactic(req.at("tactic").get<std::string>(), &error);
      if (!tactic) return error_reply(id, "grammar error: " + error);
      auto outcome = apply_tactic(it->second, *tactic);
      if (std::holds_alternative<ProofFinished>(outcome)) return json{{"id", id}, {"status", "proved"}}.dump();
      if (auto* next = std::get_if<NewState>(&outcome)) {
        const std::string text = render_state(next->state);
        states_.emplace(next_state_, std::move(next->state));
        return json{{"id", id}, {"status", "state"}, {"state_id", next_state_++}, {"state_text", text}}.dump();
      }
      const auto& err = std::get<TacticError>(outcome);
      return error_reply(id, (err.kind == ErrorKind::GrammarError ? "grammar error: " : "inapplicable: ") + err.message);
    }
    return error_reply(id, "protocol: unknown command '" + cmd + "'");
  } catch (const ParseError& e) {
    return error_reply(id, std::string("parse error: ") + e.what());
  } catch (const json::exception& e) {
    return error_reply(id, std::string("protocol: ") + e.what());
  }
}

void LoopbackTransport::send_line(const std::string& line) { pending_.push_back(server_.handle(line)); }

std::string LoopbackTransport::read_line(std::chrono::steady_clock::time_point /*deadline*/) {
  if (pending_.empty()) throw ProtocolError("loopback: no reply pending");
  std::string line = std::move(pending_.front());
  pending_.pop_front();
  return line;
}

}  // namespace tprover
