#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "collision_ik/server/session.hpp"

namespace cik::server {

struct ServerOptions {
  std::string address = "0.0.0.0";
  unsigned short port = 8765;  // 0 picks a free port
  double rate_hz = 100.0;
  std::size_t queue_limit = 64;          // droppable frames per client
  std::size_t hard_queue_limit = 65536;  // beyond this the client is disconnected
  std::size_t max_frame_bytes = 1 << 20;
};

struct ServerStats {
  std::uint64_t ticks = 0;
  std::uint64_t frames_in = 0;
  std::uint64_t errors_out = 0;
  std::uint64_t dropped = 0;
  std::size_t clients = 0;
  bool loop_running = false;
};

/// WebSocket front end for a Session. One network thread runs every client
/// handler; one loop thread ticks the session at the configured rate and
/// hands frames back to the network thread for fan-out.
class StreamServer {
 public:
  /// Binds immediately. Throws Error when the address cannot be bound.
  StreamServer(Session& session, ServerOptions options);
  ~StreamServer();
  StreamServer(const StreamServer&) = delete;
  StreamServer& operator=(const StreamServer&) = delete;

  unsigned short port() const;
  void start();
  /// Idempotent; joins both threads.
  void stop();
  ServerStats stats() const;

  /// Called on the loop thread after every tick, for logging.
  void on_tick(std::function<void(const TickOutput&)> hook);

  struct Impl;  // opaque; public so the handlers in the source file can name it

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace cik::server
