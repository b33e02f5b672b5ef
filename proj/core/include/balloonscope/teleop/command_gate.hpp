#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "balloonscope/control/command.hpp"
#include "balloonscope/teleop/protocol.hpp"

namespace balloonscope::teleop {

using ClientId = std::uint64_t;

/// Reply to a client message before the session stamps seq and time.
struct Reply {
  MessageKind kind = MessageKind::Ack;
  nlohmann::json payload = nlohmann::json::object();
};

/// Session bookkeeping for command intake. Exactly one client may hold
/// command authority; it is granted on hello to the first client that asks
/// while nobody holds it, and released on disconnect. Every inbound message
/// gets exactly one reply. Not thread-safe; the server calls it from its
/// network thread only.
class CommandGate {
 public:
  explicit CommandGate(double command_rate_hz = 50.0);

  struct Outcome {
    Reply reply;
    /// Set when a command was accepted and should be forwarded to the loop.
    std::optional<control::ControlCommand> command;
  };

  /// Processes one inbound text message received at `now_s`.
  Outcome handle_text(ClientId client, std::string_view text, double now_s);
  Outcome handle(ClientId client, const WireMessage& msg, double now_s);

  void disconnect(ClientId client);

  std::optional<ClientId> authority() const { return authority_; }
  std::size_t client_count() const { return clients_.size(); }
  double command_rate_hz() const { return rate_hz_; }

 private:
  struct Client {
    std::optional<std::uint64_t> last_seq;
    std::optional<double> last_set_angle_s;
  };

  Outcome handle_hello(ClientId client, const WireMessage& msg);
  Outcome handle_command(ClientId client, Client& state, const WireMessage& msg, double now_s);

  double rate_hz_;
  std::map<ClientId, Client> clients_;
  std::optional<ClientId> authority_;
};

Reply fault_reply(std::string_view code, const std::string& message, std::optional<std::uint64_t> ref_seq);

}  // namespace balloonscope::teleop
