#include "balloonscope/teleop/protocol.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <boost/beast/core/detail/base64.hpp>

#include "balloonscope/imaging/png_codec.hpp"

namespace balloonscope::teleop {
namespace {

namespace b64 = boost::beast::detail::base64;
using nlohmann::json;

constexpr std::array<std::pair<MessageKind, std::string_view>, 6> kKinds{{
    {MessageKind::Hello, "hello"},
    {MessageKind::State, "state"},
    {MessageKind::Frame, "frame"},
    {MessageKind::Command, "command"},
    {MessageKind::Fault, "fault"},
    {MessageKind::Ack, "ack"},
}};

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(fault::kMalformed, std::string("missing field '") + key + "'");
  if (it->is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!it->is_number()) throw ProtocolError(fault::kMalformed, std::string("field '") + key + "' is not a number");
  return it->get<double>();
}

bool read_bool(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_boolean())
    throw ProtocolError(fault::kMalformed, std::string("field '") + key + "' must be a boolean");
  return it->get<bool>();
}

}  // namespace

std::string_view to_string(MessageKind kind) {
  for (const auto& [k, name] : kKinds)
    if (k == kind) return name;
  return "unknown";
}

std::optional<MessageKind> parse_message_kind(std::string_view name) {
  for (const auto& [k, n] : kKinds)
    if (n == name) return k;
  return std::nullopt;
}

std::string encode_message(const WireMessage& msg) {
  json j;
  j["kind"] = std::string(to_string(msg.kind));
  j["seq"] = msg.seq;
  j["timestamp_ms"] = msg.timestamp_ms;
  j["payload"] = msg.payload;
  return j.dump();
}

WireMessage decode_message(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ProtocolError(fault::kMalformed, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError(fault::kMalformed, "message must be a JSON object");
  const auto kind = j.find("kind");
  if (kind == j.end() || !kind->is_string()) throw ProtocolError(fault::kMalformed, "missing string field 'kind'");
  WireMessage msg;
  const auto parsed = parse_message_kind(kind->get<std::string>());
  if (!parsed) throw ProtocolError(fault::kUnknownKind, "unknown message kind '" + kind->get<std::string>() + "'");
  msg.kind = *parsed;
  const auto seq = j.find("seq");
  if (seq == j.end() || !seq->is_number_unsigned())
    throw ProtocolError(fault::kMalformed, "'seq' must be a non-negative integer");
  msg.seq = seq->get<std::uint64_t>();
  const auto ts = j.find("timestamp_ms");
  if (ts == j.end() || !ts->is_number_integer()) throw ProtocolError(fault::kMalformed, "'timestamp_ms' must be an integer");
  msg.timestamp_ms = ts->get<std::int64_t>();
  const auto payload = j.find("payload");
  if (payload != j.end()) {
    if (!payload->is_object()) throw ProtocolError(fault::kMalformed, "'payload' must be an object");
    msg.payload = *payload;
  }
  return msg;
}

json record_to_json(const control::TraceRecord& rec) {
  return {{"time_s", number(rec.time_s)},
          {"alpha_cmd_deg", number(rec.alpha_cmd_deg)},
          {"p_target", number(rec.p_target)},
          {"p_measured", number(rec.p_measured)},
          {"delta_p", number(rec.delta_p)},
          {"omega_rpm", number(rec.omega_rpm)},
          {"volume_ml", number(rec.volume_ml)},
          {"alpha_true_deg", number(rec.alpha_true_deg)},
          {"alpha_est_deg", number(rec.alpha_est_deg)},
          {"face_diameter_mm", number(rec.face_diameter_mm)},
          {"tool_inserted", rec.tool_inserted},
          {"fault", rec.fault}};
}

control::TraceRecord record_from_json(const json& j) {
  if (!j.is_object()) throw ProtocolError(fault::kMalformed, "record must be an object");
  control::TraceRecord rec;
  rec.time_s = read_number(j, "time_s");
  rec.alpha_cmd_deg = read_number(j, "alpha_cmd_deg");
  rec.p_target = read_number(j, "p_target");
  rec.p_measured = read_number(j, "p_measured");
  rec.delta_p = read_number(j, "delta_p");
  rec.omega_rpm = read_number(j, "omega_rpm");
  rec.volume_ml = read_number(j, "volume_ml");
  rec.alpha_true_deg = read_number(j, "alpha_true_deg");
  rec.alpha_est_deg = read_number(j, "alpha_est_deg");
  rec.face_diameter_mm = read_number(j, "face_diameter_mm");
  rec.tool_inserted = read_bool(j, "tool_inserted");
  rec.fault = read_bool(j, "fault");
  return rec;
}

std::string base64_encode(std::string_view bytes) {
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ProtocolError(fault::kMalformed, "base64 length is not a multiple of 4");
  std::string out(b64::decoded_size(text.size()), '\0');
  const auto [written, consumed] = b64::decode(out.data(), text.data(), text.size());
  const auto rest = text.substr(consumed);
  if (rest.size() > 2 || rest.find_first_not_of('=') != std::string_view::npos)
    throw ProtocolError(fault::kMalformed, "invalid base64 data");
  out.resize(written);
  return out;
}

json frame_to_json(const imaging::Frame& frame) {
  const auto png = imaging::encode_png(frame);
  return {{"width", frame.width()},
          {"height", frame.height()},
          {"format", "png"},
          {"data", base64_encode(std::string_view(reinterpret_cast<const char*>(png.data()), png.size()))}};
}

imaging::Frame frame_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != "png" || !j.contains("data") || !j["data"].is_string())
    throw ProtocolError(fault::kMalformed, "frame payload needs format 'png' and string 'data'");
  const std::string bytes = base64_decode(j["data"].get<std::string>());
  try {
    return imaging::decode_png(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
  } catch (const Error& e) {
    throw ProtocolError(fault::kMalformed, e.what());
  }
}

CommandRequest parse_command_payload(const json& payload) {
  const auto name = payload.find("command");
  if (name == payload.end() || !name->is_string()) throw ProtocolError(fault::kBadCommand, "missing string 'command'");
  const auto kind = control::parse_command_kind(name->get<std::string>());
  if (!kind) throw ProtocolError(fault::kBadCommand, "unknown command '" + name->get<std::string>() + "'");
  CommandRequest req{*kind, 0.0};
  if (*kind == control::CommandKind::SetAngle) {
    const auto v = payload.find("value");
    if (v == payload.end() || !v->is_number() || !std::isfinite(v->get<double>()))
      throw ProtocolError(fault::kBadCommand, "set_angle needs a finite numeric 'value'");
    req.value = v->get<double>();
  }
  return req;
}

json command_payload(control::CommandKind kind, double value) {
  json j{{"command", std::string(control::to_string(kind))}};
  if (kind == control::CommandKind::SetAngle) j["value"] = value;
  return j;
}

std::string_view to_string(control::DeployPhase phase) {
  switch (phase) {
    case control::DeployPhase::Collapsed: return "collapsed";
    case control::DeployPhase::Inflating: return "inflating";
    case control::DeployPhase::Deployed: return "deployed";
  }
  return "collapsed";
}

}  // namespace balloonscope::teleop
