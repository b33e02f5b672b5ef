#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "balloonscope/control/executor.hpp"

namespace balloonscope::teleop {

struct StateSnapshot {
  control::TraceRecord record;
  control::DeployPhase phase = control::DeployPhase::Collapsed;
  bool estopped = false;
  /// The syringe hit a stop; the loop latched an EStop.
  bool syringe_limit = false;
  std::int64_t tick = 0;
};

struct FrameSnapshot {
  double time_s = 0.0;
  std::int64_t tick = 0;
  std::shared_ptr<const imaging::Frame> frame;
};

/// Per-client telemetry mailbox. States queue up to a limit (oldest dropped
/// beyond it); frames keep only the latest. Pushing never blocks on the
/// consumer.
class TelemetrySubscription {
 public:
  explicit TelemetrySubscription(std::size_t state_limit) : limit_(state_limit) {}

  void push_state(StateSnapshot s);
  void push_frame(FrameSnapshot f);

  std::vector<StateSnapshot> take_states();
  std::optional<FrameSnapshot> take_frame();

  std::size_t dropped_states() const;
  std::size_t dropped_frames() const;

 private:
  mutable std::mutex mu_;
  std::size_t limit_;
  std::deque<StateSnapshot> states_;
  std::optional<FrameSnapshot> frame_;
  std::size_t dropped_states_ = 0;
  std::size_t dropped_frames_ = 0;
};

struct LiveSettings {
  double state_rate_hz = 15.0;
  double frame_rate_hz = 10.0;
  std::size_t state_queue_limit = 1024;
};

/// Closed loop driven either in real time on its own thread (start/stop) or
/// synchronously in simulated time (run_for), publishing state and frame
/// snapshots at the configured rates. Commands posted from any thread are
/// timestamped with the loop's current time and applied at the next tick.
/// The tick schedule never waits on subscribers.
class LiveLoop {
 public:
  LiveLoop(control::LoopSetup setup, estimation::Calibration cal, plant::PlantState initial, std::uint64_t seed,
           LiveSettings settings = {});
  ~LiveLoop();

  LiveLoop(const LiveLoop&) = delete;
  LiveLoop& operator=(const LiveLoop&) = delete;

  std::shared_ptr<TelemetrySubscription> subscribe();
  void unsubscribe(const std::shared_ptr<TelemetrySubscription>& sub);

  void post(const control::ControlCommand& cmd);

  /// Advances `sim_s` seconds of loop time on the calling thread. Must not
  /// be used while the real-time thread is running.
  void run_for(double sim_s);

  void start();
  void stop();
  bool running() const { return running_.load(); }

  StateSnapshot latest() const;
  std::int64_t ticks() const { return ticks_.load(); }
  const LiveSettings& settings() const { return settings_; }

 private:
  void tick();
  void publish(const StateSnapshot& snap);
  void thread_main();

  control::LoopExecutor exec_;
  LiveSettings settings_;

  std::mutex inbox_mu_;
  std::vector<control::ControlCommand> inbox_;

  std::mutex subs_mu_;
  std::vector<std::shared_ptr<TelemetrySubscription>> subs_;

  mutable std::mutex latest_mu_;
  StateSnapshot latest_;

  std::int64_t states_sent_ = 0;
  std::int64_t frames_sent_ = 0;
  /// Simulated time run_for has advanced to; kept apart from the plant clock,
  /// which rounds up to the next tick.
  double sim_end_s_ = 0.0;
  bool syringe_limit_ = false;
  std::atomic<std::int64_t> ticks_{0};

  std::atomic<bool> running_{false};
  std::mutex run_mu_;
  std::condition_variable run_cv_;
  bool stop_requested_ = false;
  std::thread thread_;
};

}  // namespace balloonscope::teleop
