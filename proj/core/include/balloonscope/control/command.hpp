#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace balloonscope::control {

enum class CommandKind { SetAngle, Inflate, InsertTool, RemoveTool, EStop, Reset };

inline constexpr double kMinCommandAngleDeg = 0.0;
inline constexpr double kMaxCommandAngleDeg = 100.0;

struct ControlCommand {
  double time_s = 0.0;
  CommandKind kind = CommandKind::SetAngle;
  double value = 0.0;  // degrees for SetAngle, unused otherwise

  static ControlCommand set_angle(double t, double deg) { return {t, CommandKind::SetAngle, deg}; }
  static ControlCommand inflate(double t) { return {t, CommandKind::Inflate, 0.0}; }
  static ControlCommand insert_tool(double t) { return {t, CommandKind::InsertTool, 0.0}; }
  static ControlCommand remove_tool(double t) { return {t, CommandKind::RemoveTool, 0.0}; }
};

double clamp_command_angle(double deg);

std::string_view to_string(CommandKind kind);
std::optional<CommandKind> parse_command_kind(std::string_view name);

/// Command script: one `time_s,command[,value]` row per line, `#` comments,
/// rows in non-decreasing time order. Throws ConfigError with file and line.
std::vector<ControlCommand> parse_script(std::istream& in, std::string_view source_name = "<script>");
std::vector<ControlCommand> load_script(const std::filesystem::path& path);

/// Operator knob recording: `time_s,alpha_cmd_deg` rows, optional header
/// line. Throws ConfigError when empty or malformed.
std::vector<ControlCommand> parse_knob_trace(std::istream& in, std::string_view source_name = "<knob>");
std::vector<ControlCommand> load_knob_trace(const std::filesystem::path& path);

}  // namespace balloonscope::control
