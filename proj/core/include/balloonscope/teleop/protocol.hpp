#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "balloonscope/control/command.hpp"
#include "balloonscope/control/executor.hpp"
#include "balloonscope/control/trace.hpp"
#include "balloonscope/errors.hpp"
#include "balloonscope/imaging/frame.hpp"

namespace balloonscope::teleop {

inline constexpr int kProtocolVersion = 1;

enum class MessageKind { Hello, State, Frame, Command, Fault, Ack };

std::string_view to_string(MessageKind kind);
std::optional<MessageKind> parse_message_kind(std::string_view name);

/// One JSON text frame on the socket:
/// {"kind": "...", "seq": n, "timestamp_ms": t, "payload": {...}}
struct WireMessage {
  MessageKind kind = MessageKind::Hello;
  std::uint64_t seq = 0;
  std::int64_t timestamp_ms = 0;
  nlohmann::json payload = nlohmann::json::object();
};

/// Fault codes sent back to clients.
namespace fault {
inline constexpr std::string_view kMalformed = "malformed";
inline constexpr std::string_view kUnknownKind = "unknown_kind";
inline constexpr std::string_view kBadSequence = "bad_sequence";
inline constexpr std::string_view kNoHello = "no_hello";
inline constexpr std::string_view kUnauthorized = "unauthorized";
inline constexpr std::string_view kBadCommand = "bad_command";
inline constexpr std::string_view kRateLimited = "rate_limited";
inline constexpr std::string_view kUnexpectedKind = "unexpected_kind";
}  // namespace fault

class ProtocolError : public Error {
 public:
  ProtocolError(std::string_view code, const std::string& what) : Error(what), code_(code) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

std::string encode_message(const WireMessage& msg);
/// Throws ProtocolError: kMalformed for bad JSON or envelope fields,
/// kUnknownKind for an unrecognised kind.
WireMessage decode_message(std::string_view text);

nlohmann::json record_to_json(const control::TraceRecord& rec);
/// Inverse of record_to_json; null numbers become NaN.
control::TraceRecord record_from_json(const nlohmann::json& j);

/// {"width", "height", "format": "png", "data": base64}
nlohmann::json frame_to_json(const imaging::Frame& frame);
imaging::Frame frame_from_json(const nlohmann::json& j);

std::string base64_encode(std::string_view bytes);
/// Throws ProtocolError(kMalformed) on invalid input.
std::string base64_decode(std::string_view text);

/// Command payload: {"command": "set_angle", "value": 60}. `value` is
/// required for set_angle and ignored otherwise. Throws
/// ProtocolError(kBadCommand).
struct CommandRequest {
  control::CommandKind kind = control::CommandKind::SetAngle;
  double value = 0.0;
};
CommandRequest parse_command_payload(const nlohmann::json& payload);
nlohmann::json command_payload(control::CommandKind kind, double value = 0.0);

std::string_view to_string(control::DeployPhase phase);

}  // namespace balloonscope::teleop
