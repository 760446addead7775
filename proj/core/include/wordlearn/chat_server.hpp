#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "wordlearn/chat.hpp"

namespace wordlearn::chat {

// Serves one port. A connection whose first bytes are "GET " is upgraded to a
// web socket (one JSON message per text frame); anything else is read as
// newline-delimited JSON.
class Server {
 public:
  Server(Hub& hub, std::string address, std::uint16_t port, std::size_t threads = 1);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts serving on background threads. Throws on bind failure.
  void start();
  // Bound port; useful when constructed with port 0.
  std::uint16_t port() const;
  void stop();
  // SIGINT and SIGTERM release wait().
  void stop_on_signals();
  // Blocks until stop() is called from another thread or a handled signal.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wordlearn::chat
