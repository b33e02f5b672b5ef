#include <gtest/gtest.h>

#include <sstream>

#include "balloonscope/control/command.hpp"
#include "balloonscope/errors.hpp"

using namespace balloonscope;
using namespace balloonscope::control;

namespace {

int error_line(const std::string& text, bool knob = false) {
  std::istringstream in(text);
  try {
    if (knob) {
      parse_knob_trace(in, "t.csv");
    } else {
      parse_script(in, "t.csv");
    }
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.file(), "t.csv");
    return e.line();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return -1;
}

}  // namespace

TEST(Script, ParsesAllCommands) {
  std::istringstream in(
      "# warm-up\n"
      "0,inflate\n"
      "0, set_angle, 60   # go\n"
      "\n"
      "8,insert_tool\n"
      "16,remove_tool,\n"
      "20,estop\n"
      "21,reset\n");
  const auto s = parse_script(in);
  ASSERT_EQ(s.size(), 6u);
  EXPECT_EQ(s[0].kind, CommandKind::Inflate);
  EXPECT_EQ(s[1].kind, CommandKind::SetAngle);
  EXPECT_DOUBLE_EQ(s[1].value, 60.0);
  EXPECT_EQ(s[2].kind, CommandKind::InsertTool);
  EXPECT_DOUBLE_EQ(s[2].time_s, 8.0);
  EXPECT_EQ(s[3].kind, CommandKind::RemoveTool);
  EXPECT_EQ(s[4].kind, CommandKind::EStop);
  EXPECT_EQ(s[5].kind, CommandKind::Reset);
}

TEST(Script, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("0,inflate\n1,wiggle\n"), 2);
  EXPECT_EQ(error_line("0,inflate\n\n# c\nabc,set_angle,4\n"), 4);
  EXPECT_EQ(error_line("0,set_angle\n"), 1);
  EXPECT_EQ(error_line("0,inflate,3\n"), 1);
  EXPECT_EQ(error_line("5,inflate\n4,set_angle,1\n"), 2);
  EXPECT_EQ(error_line("-1,inflate\n"), 1);
  EXPECT_EQ(error_line("1\n"), 1);
  EXPECT_EQ(error_line("1,set_angle,nan\n"), 1);
}

TEST(Script, CommandNamesRoundTrip) {
  for (auto k : {CommandKind::SetAngle, CommandKind::Inflate, CommandKind::InsertTool, CommandKind::RemoveTool,
                 CommandKind::EStop, CommandKind::Reset}) {
    EXPECT_EQ(parse_command_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_command_kind("SET_ANGLE").has_value());
}

TEST(Script, ClampCommandAngle) {
  EXPECT_DOUBLE_EQ(clamp_command_angle(-5.0), 0.0);
  EXPECT_DOUBLE_EQ(clamp_command_angle(150.0), 100.0);
  EXPECT_DOUBLE_EQ(clamp_command_angle(42.5), 42.5);
}

TEST(Knob, ParsesWithAndWithoutHeader) {
  std::istringstream with("time_s,alpha_cmd_deg\n0,20\n8.5,50\n");
  const auto a = parse_knob_trace(with);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[1].kind, CommandKind::SetAngle);
  EXPECT_DOUBLE_EQ(a[1].time_s, 8.5);
  EXPECT_DOUBLE_EQ(a[1].value, 50.0);
  std::istringstream without("0,20\n8.5,50\n");
  EXPECT_EQ(parse_knob_trace(without).size(), 2u);
}

TEST(Knob, EmptyFileIsAnError) {
  std::istringstream empty("");
  EXPECT_THROW(parse_knob_trace(empty), ConfigError);
  std::istringstream header_only("time_s,alpha_cmd_deg\n# nothing\n");
  EXPECT_THROW(parse_knob_trace(header_only), ConfigError);
}

TEST(Knob, MalformedRows) {
  EXPECT_EQ(error_line("0,20\n1,20,3\n", true), 2);
  EXPECT_EQ(error_line("0,20\n1,abc\n", true), 2);
  EXPECT_EQ(error_line("time_s,alpha_cmd_deg\n2,20\n1,30\n", true), 3);
}

TEST(Script, MissingFileIsConfigError) {
  EXPECT_THROW(load_script("/nonexistent/knob.csv"), ConfigError);
  EXPECT_THROW(load_knob_trace("/nonexistent/knob.csv"), ConfigError);
}
