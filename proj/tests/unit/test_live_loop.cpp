#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "../support/fixtures.hpp"
#include "balloonscope/teleop/live_loop.hpp"
#include "balloonscope/teleop/protocol.hpp"

using namespace balloonscope;
using namespace balloonscope::teleop;

namespace {

std::unique_ptr<LiveLoop> make_loop(double volume_ml = 0.8, LiveSettings settings = {}) {
  const auto cfg = harness::default_config();
  auto setup = harness::noisy_setup(cfg);
  return std::make_unique<LiveLoop>(setup, fixtures::default_calibration(),
                                    plant::initial_state(setup.plant, volume_ml), 1, settings);
}

}  // namespace

TEST(Subscription, StateQueueDropsOldest) {
  TelemetrySubscription sub(3);
  for (int i = 0; i < 5; ++i) {
    StateSnapshot s;
    s.tick = i;
    sub.push_state(s);
  }
  const auto got = sub.take_states();
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got.front().tick, 2);
  EXPECT_EQ(sub.dropped_states(), 2u);
  EXPECT_TRUE(sub.take_states().empty());
}

TEST(Subscription, FramesAreLatestWins) {
  TelemetrySubscription sub(8);
  EXPECT_FALSE(sub.take_frame());
  sub.push_frame({0.1, 3, nullptr});
  sub.push_frame({0.2, 6, nullptr});
  const auto f = sub.take_frame();
  ASSERT_TRUE(f);
  EXPECT_EQ(f->tick, 6);
  EXPECT_EQ(sub.dropped_frames(), 1u);
  EXPECT_FALSE(sub.take_frame());
}

TEST(LiveLoop, PublishesAtConfiguredRates) {
  auto loop = make_loop();
  auto sub = loop->subscribe();
  std::size_t states = 0;
  std::size_t frames = 0;
  // drain every tick so latest-wins does not hide frames
  for (int i = 0; i < 30; ++i) {
    loop->run_for(1.0 / 30.0);
    states += sub->take_states().size();
    if (sub->take_frame()) ++frames;
  }
  EXPECT_NEAR(static_cast<double>(states), 15.0, 1.0);
  EXPECT_NEAR(static_cast<double>(frames), 10.0, 1.0);
  EXPECT_EQ(loop->ticks(), 30);
}

TEST(LiveLoop, FrameDecodesToCameraSize) {
  auto loop = make_loop();
  auto sub = loop->subscribe();
  loop->run_for(0.2);
  const auto f = sub->take_frame();
  ASSERT_TRUE(f && f->frame);
  const auto j = frame_to_json(*f->frame);
  const auto back = frame_from_json(j);
  EXPECT_EQ(back.width(), 400);
  EXPECT_EQ(back.height(), 400);
}

TEST(LiveLoop, PostedCommandsTakeEffect) {
  auto loop = make_loop();
  loop->post(control::ControlCommand::set_angle(0.0, 40.0));
  loop->run_for(5.0);
  const auto s = loop->latest();
  EXPECT_EQ(s.record.alpha_cmd_deg, 40.0);
  EXPECT_NEAR(s.record.alpha_true_deg, 40.0, 2.0);
  EXPECT_EQ(s.phase, control::DeployPhase::Deployed);
}

TEST(LiveLoop, UnsubscribedClientsGetNothing) {
  auto loop = make_loop();
  auto sub = loop->subscribe();
  loop->unsubscribe(sub);
  loop->run_for(0.5);
  EXPECT_TRUE(sub->take_states().empty());
  EXPECT_FALSE(sub->take_frame());
}

TEST(LiveLoop, SyringeLimitLatchesEStop) {
  const auto cfg = harness::default_config();
  auto setup = harness::noisy_setup(cfg);
  auto start = plant::with_tool(plant::initial_state(setup.plant, 3.9), true);
  LiveLoop loop(setup, fixtures::default_calibration(), start, 1);
  loop.post(control::ControlCommand::set_angle(0.0, 100.0));
  loop.run_for(6.0);
  const auto s = loop.latest();
  EXPECT_TRUE(s.syringe_limit);
  EXPECT_TRUE(s.estopped);
  EXPECT_EQ(s.record.omega_rpm, 0.0);

  // Reset clears the latch; still driving into the stop latches it again.
  loop.post(control::ControlCommand{0.0, control::CommandKind::Reset, 0.0});
  loop.run_for(0.1);
  loop.run_for(1.0);
  const auto again = loop.latest();
  EXPECT_TRUE(again.syringe_limit);
  EXPECT_TRUE(again.estopped);
}

TEST(LiveLoop, RealTimeThreadAdvances) {
  auto loop = make_loop();
  loop->start();
  EXPECT_TRUE(loop->running());
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  loop->stop();
  EXPECT_FALSE(loop->running());
  const auto n = loop->ticks();
  EXPECT_GE(n, 3);
  EXPECT_LE(n, 12);
  EXPECT_THROW(
      {
        loop->start();
        loop->run_for(0.1);
      },
      Error);
  loop->stop();
}
