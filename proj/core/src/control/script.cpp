#include <algorithm>
#include <fstream>
#include <istream>
#include <string>

#include "../common/numbers.hpp"
#include "balloonscope/control/command.hpp"
#include "balloonscope/errors.hpp"

namespace balloonscope::control {
namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(detail::trim(line.substr(start)));
      return cells;
    }
    cells.push_back(detail::trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return detail::trim(hash == std::string_view::npos ? line : line.substr(0, hash));
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  return in;
}

}  // namespace

double clamp_command_angle(double deg) { return std::clamp(deg, kMinCommandAngleDeg, kMaxCommandAngleDeg); }

std::string_view to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::SetAngle: return "set_angle";
    case CommandKind::Inflate: return "inflate";
    case CommandKind::InsertTool: return "insert_tool";
    case CommandKind::RemoveTool: return "remove_tool";
    case CommandKind::EStop: return "estop";
    case CommandKind::Reset: return "reset";
  }
  return "unknown";
}

std::optional<CommandKind> parse_command_kind(std::string_view name) {
  for (auto k : {CommandKind::SetAngle, CommandKind::Inflate, CommandKind::InsertTool, CommandKind::RemoveTool,
                 CommandKind::EStop, CommandKind::Reset}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::vector<ControlCommand> parse_script(std::istream& in, std::string_view source_name) {
  const std::string source(source_name);
  std::vector<ControlCommand> script;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_comment(raw);
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() < 2 || cells.size() > 3) throw ConfigError(source, line_no, "expected time_s,command[,value]");
    const auto t = detail::parse_double(cells[0]);
    if (!t || !std::isfinite(*t) || *t < 0.0) throw ConfigError(source, line_no, "bad time '" + std::string(cells[0]) + "'");
    const auto kind = parse_command_kind(cells[1]);
    if (!kind) throw ConfigError(source, line_no, "unknown command '" + std::string(cells[1]) + "'");
    ControlCommand cmd{*t, *kind, 0.0};
    if (*kind == CommandKind::SetAngle) {
      const auto v = cells.size() == 3 ? detail::parse_double(cells[2]) : std::nullopt;
      if (!v || !std::isfinite(*v)) throw ConfigError(source, line_no, "set_angle needs a numeric value");
      cmd.value = *v;
    } else if (cells.size() == 3 && !cells[2].empty()) {
      throw ConfigError(source, line_no, std::string(cells[1]) + " takes no value");
    }
    if (!script.empty() && cmd.time_s < script.back().time_s)
      throw ConfigError(source, line_no, "script rows must be in time order");
    script.push_back(cmd);
  }
  return script;
}

std::vector<ControlCommand> load_script(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_script(in, path.string());
}

std::vector<ControlCommand> parse_knob_trace(std::istream& in, std::string_view source_name) {
  const std::string source(source_name);
  std::vector<ControlCommand> out;
  std::string raw;
  int line_no = 0;
  bool first_row = true;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_comment(raw);
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (first_row && cells.size() == 2 && !detail::parse_double(cells[0])) {
      first_row = false;  // header
      continue;
    }
    first_row = false;
    if (cells.size() != 2) throw ConfigError(source, line_no, "expected time_s,alpha_cmd_deg");
    const auto t = detail::parse_double(cells[0]);
    const auto a = detail::parse_double(cells[1]);
    if (!t || !a || !std::isfinite(*t) || !std::isfinite(*a) || *t < 0.0)
      throw ConfigError(source, line_no, "bad knob row");
    if (!out.empty() && *t < out.back().time_s) throw ConfigError(source, line_no, "knob rows must be in time order");
    out.push_back(ControlCommand::set_angle(*t, *a));
  }
  if (out.empty()) throw ConfigError(source, line_no, "knob trace has no samples");
  return out;
}

std::vector<ControlCommand> load_knob_trace(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_knob_trace(in, path.string());
}

}  // namespace balloonscope::control
