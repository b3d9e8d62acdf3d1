// Copyright 2026 The PAC Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP + WebSocket front end for SessionManager, on a single port.
// GET /sessions/{id}/stream?from=N upgrades to a WebSocket carrying the
// session's events from seq N on; client messages on that socket are
// handled by handle_client_message.

#ifndef PAC_TEACH_NET_HPP_
#define PAC_TEACH_NET_HPP_

#include <cstdint>
#include <memory>
#include <string>

#include "pac/teach_service.hpp"

namespace pac {

class TeachServer {
 public:
  // Binds immediately; port 0 picks a free port. Throws std::runtime_error
  // when the address cannot be bound.
  TeachServer(SessionManager& manager, const std::string& address, std::uint16_t port);
  ~TeachServer();
  TeachServer(const TeachServer&) = delete;
  TeachServer& operator=(const TeachServer&) = delete;

  std::uint16_t port() const;

  // Serves on a background thread until stop().
  void start();
  // Serves on the calling thread until stop() from elsewhere.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pac

#endif  // PAC_TEACH_NET_HPP_
