#include "balloonscope/teleop/command_gate.hpp"

namespace balloonscope::teleop {
namespace {

using nlohmann::json;

/// Half a millisecond of slack so a client pacing at exactly the rate limit
/// is not rejected by timer jitter.
constexpr double kRateSlackS = 5e-4;

}  // namespace

Reply fault_reply(std::string_view code, const std::string& message, std::optional<std::uint64_t> ref_seq) {
  return {MessageKind::Fault,
          {{"code", std::string(code)}, {"message", message}, {"ref_seq", ref_seq ? json(*ref_seq) : json(nullptr)}}};
}

CommandGate::CommandGate(double command_rate_hz) : rate_hz_(command_rate_hz) {
  if (!(command_rate_hz > 0.0)) throw ConfigError("service.command_rate_hz must be > 0");
}

CommandGate::Outcome CommandGate::handle_text(ClientId client, std::string_view text, double now_s) {
  WireMessage msg;
  try {
    msg = decode_message(text);
  } catch (const ProtocolError& e) {
    return {fault_reply(e.code(), e.what(), std::nullopt), std::nullopt};
  }
  return handle(client, msg, now_s);
}

CommandGate::Outcome CommandGate::handle(ClientId client, const WireMessage& msg, double now_s) {
  const auto it = clients_.find(client);
  if (msg.kind == MessageKind::Hello) {
    if (it != clients_.end() && it->second.last_seq && msg.seq <= *it->second.last_seq)
      return {fault_reply(fault::kBadSequence, "sequence numbers must increase", msg.seq), std::nullopt};
    return handle_hello(client, msg);
  }
  if (it == clients_.end()) return {fault_reply(fault::kNoHello, "send hello first", msg.seq), std::nullopt};
  Client& state = it->second;
  if (state.last_seq && msg.seq <= *state.last_seq)
    return {fault_reply(fault::kBadSequence,
                        "seq " + std::to_string(msg.seq) + " not above " + std::to_string(*state.last_seq), msg.seq),
            std::nullopt};
  state.last_seq = msg.seq;
  if (msg.kind != MessageKind::Command)
    return {fault_reply(fault::kUnexpectedKind,
                        "clients may send hello and command, not " + std::string(to_string(msg.kind)), msg.seq),
            std::nullopt};
  return handle_command(client, state, msg, now_s);
}

CommandGate::Outcome CommandGate::handle_hello(ClientId client, const WireMessage& msg) {
  Client& state = clients_[client];
  state.last_seq = msg.seq;
  bool want = true;
  if (const auto w = msg.payload.find("want_authority"); w != msg.payload.end() && w->is_boolean()) want = w->get<bool>();
  if (want && !authority_) authority_ = client;
  Reply reply{MessageKind::Hello,
              {{"server", "balloonscope"},
               {"protocol", kProtocolVersion},
               {"client_id", client},
               {"authority", authority_ == client},
               {"command_rate_hz", rate_hz_},
               {"ref_seq", msg.seq}}};
  return {reply, std::nullopt};
}

CommandGate::Outcome CommandGate::handle_command(ClientId client, Client& state, const WireMessage& msg,
                                                 double now_s) {
  if (authority_ != client)
    return {fault_reply(fault::kUnauthorized, "another client holds command authority", msg.seq), std::nullopt};
  CommandRequest req;
  try {
    req = parse_command_payload(msg.payload);
  } catch (const ProtocolError& e) {
    return {fault_reply(e.code(), e.what(), msg.seq), std::nullopt};
  }
  // Only knob updates are throttled; safety and discrete commands always pass.
  if (req.kind == control::CommandKind::SetAngle) {
    if (state.last_set_angle_s && now_s - *state.last_set_angle_s < 1.0 / rate_hz_ - kRateSlackS)
      return {fault_reply(fault::kRateLimited, "set_angle faster than the command rate", msg.seq), std::nullopt};
    state.last_set_angle_s = now_s;
  }
  json ack{{"ref_seq", msg.seq}, {"command", std::string(control::to_string(req.kind))}};
  control::ControlCommand cmd{0.0, req.kind, 0.0};
  if (req.kind == control::CommandKind::SetAngle) {
    cmd.value = control::clamp_command_angle(req.value);
    ack["requested"] = req.value;
    ack["value"] = cmd.value;
    ack["clamped"] = cmd.value != req.value;
  }
  return {Reply{MessageKind::Ack, ack}, cmd};
}

void CommandGate::disconnect(ClientId client) {
  clients_.erase(client);
  if (authority_ == client) authority_.reset();
}

}  // namespace balloonscope::teleop
