#pragma once

#include <memory>
#include <string>

#include "balloonscope/teleop/live_loop.hpp"

namespace balloonscope::teleop {

struct ServerOptions {
  std::string address = "127.0.0.1";
  /// 0 picks a free port; see TeleopServer::port().
  unsigned short port = 8080;
  double command_rate_hz = 50.0;
  /// Plain HTTP GETs are served from here when set (e.g. a console bundle).
  std::string static_dir;
};

/// WebSocket endpoint for live operation. Any HTTP upgrade request on any
/// path opens a session; other GET requests are answered from `static_dir`.
/// Runs its own network thread. Client disconnects never stop the loop: the
/// last command is held.
class TeleopServer {
 public:
  TeleopServer(LiveLoop& loop, ServerOptions options);
  ~TeleopServer();

  TeleopServer(const TeleopServer&) = delete;
  TeleopServer& operator=(const TeleopServer&) = delete;

  /// Binds and starts serving. Throws Error when the address is unavailable.
  void start();
  void stop();
  unsigned short port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace balloonscope::teleop
