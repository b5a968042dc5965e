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

// Serves the in-process kernel over the line protocol, on stdin/stdout or on
// a TCP port (one session per connection, connections handled in turn).

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>

#include "tprover/lean_backend.hpp"

namespace {

int serve_stdio() {
  tprover::StubBackend backend;
  std::string line;
  while (std::getline(std::cin, line)) {
    std::cout << backend.handle(line) << '\n' << std::flush;
  }
  return 0;
}

void serve_connection(int fd) {
  tprover::StubBackend backend;
  std::string buffer;
  char chunk[4096];
  for (;;) {
    const ssize_t n = ::read(fd, chunk, sizeof chunk);
    if (n <= 0) return;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t nl;
    while ((nl = buffer.find('\n')) != std::string::npos) {
      const std::string reply = backend.handle(buffer.substr(0, nl)) + "\n";
      buffer.erase(0, nl + 1);
      std::size_t sent = 0;
      while (sent < reply.size()) {
        const ssize_t w = ::write(fd, reply.data() + sent, reply.size() - sent);
        if (w <= 0) return;
        sent += static_cast<std::size_t>(w);
      }
    }
  }
}

int serve_tcp(int port) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) {
    std::perror("socket");
    return 1;
  }
  const int yes = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listener, 8) != 0) {
    std::perror("bind/listen");
    return 1;
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  // The bound port goes to stdout so callers passing port 0 can find it.
  std::cout << ntohs(addr.sin_port) << std::endl;
  for (;;) {
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) continue;
    serve_connection(fd);
    ::close(fd);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel-backed prover speaking the tprover backend protocol"};
  int port = -1;
  app.add_option("--listen", port, "Serve on 127.0.0.1:PORT instead of stdin/stdout (0 picks a free port)")
      ->check(CLI::Range(0, 65535));
  CLI11_PARSE(app, argc, argv);
  return port >= 0 ? serve_tcp(port) : serve_stdio();
}
