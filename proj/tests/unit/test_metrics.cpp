#include <gtest/gtest.h>

#include <cmath>

#include "balloonscope/errors.hpp"
#include "balloonscope/harness/metrics.hpp"

using namespace balloonscope;
using namespace balloonscope::harness;
using control::Trace;
using control::TraceRecord;

namespace {

Trace ramp(const std::vector<double>& alphas, double dt = 0.1) {
  Trace t;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    TraceRecord r;
    r.time_s = i * dt;
    r.alpha_true_deg = alphas[i];
    t.push_back(r);
  }
  return t;
}

}  // namespace

TEST(StepMetrics, SettleIsEntryWithoutLaterExit) {
  // enters the band at 0.3, leaves at 0.5, re-enters at 0.6 for good
  const auto t = ramp({0, 30, 50, 59, 61, 63, 61, 60, 60, 60, 60, 60});
  const auto m = step_metrics(t, 60.0, 2.0);
  ASSERT_TRUE(m.first_entry_s);
  EXPECT_NEAR(*m.first_entry_s, 0.3, 1e-12);
  ASSERT_TRUE(m.settle_time_s);
  EXPECT_NEAR(*m.settle_time_s, 0.6, 1e-12);
  EXPECT_NEAR(m.overshoot_deg, 3.0, 1e-12);
  ASSERT_TRUE(m.mean_rate_deg_per_s);
  EXPECT_NEAR(*m.mean_rate_deg_per_s, 60.0 / 0.6, 1e-9);
  EXPECT_DOUBLE_EQ(m.magnitude_deg, 60.0);
  EXPECT_NEAR(m.steady_state_error_deg, 10.0, 1e-12);  // final second is (0.1, 1.1], so the 50 at 0.2 s counts
}

TEST(StepMetrics, DownwardStepOvershootIsDirectional) {
  const auto t = ramp({60, 40, 20, 19, 18, 20, 20, 20});
  const auto m = step_metrics(t, 20.0, 2.0);
  EXPECT_NEAR(m.overshoot_deg, 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(m.magnitude_deg, 40.0);
  ASSERT_TRUE(m.settle_time_s);
  EXPECT_NEAR(*m.settle_time_s, 0.2, 1e-12);
}

TEST(StepMetrics, NoOvershootIsZeroNotNegative) {
  const auto m = step_metrics(ramp({0, 20, 40, 59, 59.5, 59.5}), 60.0, 2.0);
  EXPECT_EQ(m.overshoot_deg, 0.0);
}

TEST(StepMetrics, NeverSettling) {
  const auto m = step_metrics(ramp({0, 10, 20, 30}), 60.0, 2.0);
  EXPECT_FALSE(m.settle_time_s);
  EXPECT_FALSE(m.first_entry_s);
  EXPECT_FALSE(m.mean_rate_deg_per_s);
}

TEST(StepMetrics, ZeroMagnitudeStep) {
  const auto m = step_metrics(ramp({60, 60, 60, 60}), 60.0, 2.0);
  ASSERT_TRUE(m.settle_time_s);
  EXPECT_EQ(*m.settle_time_s, 0.0);
  EXPECT_FALSE(m.mean_rate_deg_per_s);
  EXPECT_EQ(m.magnitude_deg, 0.0);
}

TEST(StepMetrics, StepTimeOffsetsEverything) {
  const auto t = ramp({0, 0, 0, 20, 40, 60, 60, 60});
  const auto m = step_metrics(t, 60.0, 2.0, 0.2);
  ASSERT_TRUE(m.settle_time_s);
  EXPECT_NEAR(*m.settle_time_s, 0.3, 1e-12);
  EXPECT_THROW(step_metrics(t, 60.0, 2.0, 5.0), Error);
}

TEST(StepMetrics, SteadyStateUsesFinalWindow) {
  std::vector<double> a(40, 60.0);
  a[0] = 0.0;
  a[20] = 64.0;  // t = 2.0, outside the last second
  a[35] = 61.5;  // t = 3.5, inside
  const auto m = step_metrics(ramp(a), 60.0, 2.0);
  EXPECT_NEAR(m.steady_state_error_deg, 1.5, 1e-12);
}

TEST(SettleAfter, WindowedByEvent) {
  const auto t = ramp({60, 60, 52, 55, 59, 60, 60, 60, 70});
  const auto s = settle_after(t, 60.0, 2.0, 0.2, 0.8);
  ASSERT_TRUE(s);
  EXPECT_NEAR(*s, 0.2, 1e-12);
  EXPECT_NEAR(max_abs_error(t, 60.0, 0.2, 0.8), 8.0, 1e-12);
  EXPECT_FALSE(settle_after(t, 60.0, 2.0, 5.0, 6.0));
}

TEST(Report, VerdictsAndJson) {
  MetricsReport r("unit", 3);
  EXPECT_TRUE(r.passed());
  for (const auto& row : r.requirements) EXPECT_EQ(row.verdict, Verdict::NotEvaluated);
  r.judge(Requirement::TipRate, true, 12.5, "ok");
  EXPECT_TRUE(r.passed());
  r.judge(Requirement::AngleHold, false, 2.5);
  EXPECT_FALSE(r.passed());
  r.add_value("extra", 1.25);
  const auto j = r.to_json();
  EXPECT_EQ(j["scenario"], "unit");
  EXPECT_EQ(j["seed"], 3);
  EXPECT_TRUE(j["settle_time_s"].is_null());
  EXPECT_EQ(j["requirements"].size(), 7u);
  EXPECT_EQ(j["requirements"][5]["row"], 6);
  EXPECT_EQ(j["requirements"][5]["verdict"], "PASS");
  EXPECT_EQ(j["requirements"][6]["verdict"], "FAIL");
  EXPECT_EQ(j["requirements"][0]["verdict"], "NOT_EVALUATED");
  EXPECT_EQ(to_string(Verdict::Fail), "FAIL");
}

TEST(Report, GeometryAndDecouplingRows) {
  MetricsReport r;
  judge_geometry(r, plant::BalloonGeometry{});
  judge_decoupling(r, plant::check_decoupling(plant::ResponseCurve::standard()));
  for (auto row : {Requirement::CollapsedDiameter, Requirement::FaceDiameter, Requirement::MaxAngle,
                   Requirement::ChannelDiameter, Requirement::Decoupling})
    EXPECT_EQ(r.requirement(row).verdict, Verdict::Pass) << static_cast<int>(row);
  EXPECT_EQ(r.decoupling_pass, true);

  plant::BalloonGeometry wide;
  wide.collapsed_od_mm = 5.4;
  MetricsReport bad;
  judge_geometry(bad, wide);
  EXPECT_EQ(bad.requirement(Requirement::CollapsedDiameter).verdict, Verdict::Fail);
}

TEST(Report, JudgeStepsNeedsEveryRepeat) {
  StepMetrics good;
  good.magnitude_deg = 60.0;
  good.settle_time_s = 3.5;
  good.mean_rate_deg_per_s = 17.0;
  good.steady_state_error_deg = 0.4;
  StepMetrics slow = good;
  slow.settle_time_s = 7.0;
  slow.mean_rate_deg_per_s = 60.0 / 7.0;
  std::vector<StepMetrics> reps{good, good};
  MetricsReport r;
  judge_steps(r, reps, 6.0, 10.0, 2.0, 2.0);
  EXPECT_EQ(r.requirement(Requirement::TipRate).verdict, Verdict::Pass);
  EXPECT_EQ(r.requirement(Requirement::AngleHold).verdict, Verdict::Pass);
  reps.push_back(slow);
  MetricsReport r2;
  judge_steps(r2, reps, 6.0, 10.0, 2.0, 2.0);
  EXPECT_EQ(r2.requirement(Requirement::TipRate).verdict, Verdict::Fail);
  StepMetrics wobbly = good;
  wobbly.overshoot_deg = 2.5;
  MetricsReport r3;
  judge_steps(r3, std::vector<StepMetrics>{wobbly}, 6.0, 10.0, 2.0, 2.0);
  EXPECT_EQ(r3.requirement(Requirement::AngleHold).verdict, Verdict::Fail);
}
