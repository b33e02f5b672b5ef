#include <gtest/gtest.h>

#include <cmath>

#include "balloonscope/errors.hpp"
#include "balloonscope/plant/plant.hpp"

using namespace balloonscope;
using namespace balloonscope::plant;

TEST(Tool, OffsetScalesWithFreeAngle) {
  ToolModel tool;
  tool.inserted = true;
  EXPECT_DOUBLE_EQ(apply_tool(100.0, tool), 87.0);
  EXPECT_DOUBLE_EQ(apply_tool(50.0, tool), 43.5);
  EXPECT_DOUBLE_EQ(apply_tool(0.0, tool), 0.0);
  tool.inserted = false;
  EXPECT_DOUBLE_EQ(apply_tool(50.0, tool), 50.0);
}

TEST(Tool, OffsetNeverExceedsMaximum) {
  ToolModel tool;
  tool.inserted = true;
  for (int i = 0; i <= 1000; ++i) {
    const double free = i * 0.1;
    const double deficit = free - apply_tool(free, tool);
    EXPECT_GE(deficit, 0.0);
    EXPECT_LE(deficit, 13.0 + 1e-12);
  }
}

TEST(Tip, ConstantCurvaturePose) {
  const BalloonGeometry g;
  const auto straight = tip_pose(0.0, 0.0, g);
  EXPECT_DOUBLE_EQ(straight.x_mm, 0.0);
  EXPECT_DOUBLE_EQ(straight.z_mm, 15.0);
  // radius 15 / (pi/2) = 9.5493
  const auto right = tip_pose(90.0, 0.0, g);
  EXPECT_NEAR(right.x_mm, 9.549296585513721, 1e-12);
  EXPECT_NEAR(right.y_mm, 0.0, 1e-12);
  EXPECT_NEAR(right.z_mm, 9.549296585513721, 1e-12);
  const auto rolled = tip_pose(90.0, 90.0, g);
  EXPECT_NEAR(rolled.x_mm, 0.0, 1e-12);
  EXPECT_NEAR(rolled.y_mm, 9.549296585513721, 1e-12);
}

TEST(Tip, ArcChordNeverExceedsLength) {
  const BalloonGeometry g;
  for (int a = 0; a <= 100; ++a) {
    const auto p = tip_pose(a, 0.0, g);
    EXPECT_LE(std::hypot(p.x_mm, p.z_mm), g.steer_length_mm + 1e-12);
  }
}

TEST(Plant, InitialStateIsQuantisedAndSettled) {
  const PlantModel m;
  const auto s = initial_state(m, 2.4);
  EXPECT_EQ(s.pump.microstep_count, 38400);
  EXPECT_DOUBLE_EQ(s.volume_ml, 2.4);
  EXPECT_DOUBLE_EQ(s.free_angle_deg, 60.0);
  EXPECT_DOUBLE_EQ(s.angle_deg, 60.0);
  const auto odd = initial_state(m, 1.00003);
  EXPECT_DOUBLE_EQ(odd.volume_ml, m.pump.volume_of(odd.pump.microstep_count));
}

TEST(Plant, WithToolTogglesLoadedAngle) {
  const PlantModel m;
  auto s = initial_state(m, 2.4);
  s = with_tool(s, true);
  EXPECT_NEAR(s.angle_deg, 60.0 - 13.0 * 0.6, 1e-12);
  s = with_tool(s, false);
  EXPECT_DOUBLE_EQ(s.angle_deg, 60.0);
}

TEST(Plant, StepTracksCurveWithoutLag) {
  const PlantModel m;
  auto s = initial_state(m, 0.0);
  for (int i = 0; i < 1000; ++i) s = plant_step(m, s, 100.0, 0.001);
  EXPECT_NEAR(s.time_s, 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(s.volume_ml, m.pump.volume_of(s.pump.microstep_count));
  const auto expect = m.curve.at(s.volume_ml);
  EXPECT_DOUBLE_EQ(s.face_diameter_mm, expect.face_diameter_mm);
  EXPECT_DOUBLE_EQ(s.angle_deg, expect.free_angle_deg);
}

TEST(Plant, LagSettlesTowardCurve) {
  PlantModel m;
  m.lag.enabled = true;
  m.lag.tau_s = 0.2;
  auto s = initial_state(m, 2.0);
  s.pump.microstep_count = m.pump.microsteps_for(3.2);
  auto prev = s.free_angle_deg;
  for (int i = 0; i < 4000; ++i) {
    s = plant_step(m, s, 0.0, 0.001);
    EXPECT_GE(s.free_angle_deg, prev - 1e-12);
    prev = s.free_angle_deg;
  }
  EXPECT_NEAR(s.free_angle_deg, m.curve.at(3.2).free_angle_deg, 1e-3);
}

TEST(Plant, DeterministicForSameInputs) {
  const PlantModel m;
  auto a = initial_state(m, 1.0);
  auto b = a;
  for (int i = 0; i < 500; ++i) {
    a = plant_step(m, a, 25.0, 0.001);
    b = plant_step(m, b, 25.0, 0.001);
  }
  EXPECT_EQ(a.pump.microstep_count, b.pump.microstep_count);
  EXPECT_EQ(a.angle_deg, b.angle_deg);
}

TEST(Plant, ValidateRejectsBadTool) {
  PlantModel m;
  m.tool.max_offset_deg = -1.0;
  EXPECT_THROW(m.validate(), ConfigError);
}
