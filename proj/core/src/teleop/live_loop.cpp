#include "balloonscope/teleop/live_loop.hpp"

#include <algorithm>
#include <chrono>

namespace balloonscope::teleop {
namespace {

constexpr double kTimeEpsilon = 1e-9;

}  // namespace

void TelemetrySubscription::push_state(StateSnapshot s) {
  std::lock_guard lock(mu_);
  states_.push_back(std::move(s));
  while (states_.size() > limit_) {
    states_.pop_front();
    ++dropped_states_;
  }
}

void TelemetrySubscription::push_frame(FrameSnapshot f) {
  std::lock_guard lock(mu_);
  if (frame_) ++dropped_frames_;
  frame_ = std::move(f);
}

std::vector<StateSnapshot> TelemetrySubscription::take_states() {
  std::lock_guard lock(mu_);
  std::vector<StateSnapshot> out(std::make_move_iterator(states_.begin()), std::make_move_iterator(states_.end()));
  states_.clear();
  return out;
}

std::optional<FrameSnapshot> TelemetrySubscription::take_frame() {
  std::lock_guard lock(mu_);
  auto out = std::move(frame_);
  frame_.reset();
  return out;
}

std::size_t TelemetrySubscription::dropped_states() const {
  std::lock_guard lock(mu_);
  return dropped_states_;
}

std::size_t TelemetrySubscription::dropped_frames() const {
  std::lock_guard lock(mu_);
  return dropped_frames_;
}

LiveLoop::LiveLoop(control::LoopSetup setup, estimation::Calibration cal, plant::PlantState initial,
                   std::uint64_t seed, LiveSettings settings)
    : exec_(std::move(setup), std::move(cal), std::move(initial), seed), settings_(settings) {
  if (!(settings_.state_rate_hz > 0.0) || !(settings_.frame_rate_hz > 0.0))
    throw ConfigError("telemetry rates must be > 0");
  if (settings_.state_queue_limit == 0) throw ConfigError("service.state_queue_limit must be > 0");
  latest_.record.volume_ml = exec_.state().volume_ml;
  latest_.record.face_diameter_mm = exec_.state().face_diameter_mm;
  latest_.record.alpha_true_deg = exec_.state().angle_deg;
  latest_.phase = exec_.phase();
}

LiveLoop::~LiveLoop() { stop(); }

std::shared_ptr<TelemetrySubscription> LiveLoop::subscribe() {
  auto sub = std::make_shared<TelemetrySubscription>(settings_.state_queue_limit);
  std::lock_guard lock(subs_mu_);
  subs_.push_back(sub);
  return sub;
}

void LiveLoop::unsubscribe(const std::shared_ptr<TelemetrySubscription>& sub) {
  std::lock_guard lock(subs_mu_);
  subs_.erase(std::remove(subs_.begin(), subs_.end(), sub), subs_.end());
}

void LiveLoop::post(const control::ControlCommand& cmd) {
  std::lock_guard lock(inbox_mu_);
  inbox_.push_back(cmd);
}

StateSnapshot LiveLoop::latest() const {
  std::lock_guard lock(latest_mu_);
  return latest_;
}

void LiveLoop::tick() {
  std::vector<control::ControlCommand> pending;
  {
    std::lock_guard lock(inbox_mu_);
    pending.swap(inbox_);
  }
  const double now = exec_.time_s();
  for (auto cmd : pending) {
    if (cmd.kind == control::CommandKind::Reset) syringe_limit_ = false;
    cmd.time_s = now;
    exec_.submit(cmd);
  }

  StateSnapshot snap;
  snap.tick = exec_.tick_index();
  snap.record = exec_.step();
  if (exec_.hit_syringe_limit() && !syringe_limit_) {
    syringe_limit_ = true;
    exec_.submit(control::ControlCommand{exec_.time_s(), control::CommandKind::EStop, 0.0});
  }
  snap.phase = exec_.phase();
  snap.estopped = exec_.estopped();
  snap.syringe_limit = syringe_limit_;
  {
    std::lock_guard lock(latest_mu_);
    latest_ = snap;
  }
  publish(snap);
  ticks_.fetch_add(1);
}

void LiveLoop::publish(const StateSnapshot& snap) {
  const double t = snap.record.time_s;
  const bool state_due = t + kTimeEpsilon >= static_cast<double>(states_sent_) / settings_.state_rate_hz;
  const bool frame_due = t + kTimeEpsilon >= static_cast<double>(frames_sent_) / settings_.frame_rate_hz;
  if (state_due) {
    while (static_cast<double>(states_sent_) / settings_.state_rate_hz <= t + kTimeEpsilon) ++states_sent_;
  }
  if (frame_due) {
    while (static_cast<double>(frames_sent_) / settings_.frame_rate_hz <= t + kTimeEpsilon) ++frames_sent_;
  }
  if (!state_due && !frame_due) return;

  std::vector<std::shared_ptr<TelemetrySubscription>> subs;
  {
    std::lock_guard lock(subs_mu_);
    subs = subs_;
  }
  if (subs.empty()) return;
  FrameSnapshot frame;
  if (frame_due) frame = {t, snap.tick, std::make_shared<const imaging::Frame>(exec_.last_frame())};
  for (const auto& sub : subs) {
    if (state_due) sub->push_state(snap);
    if (frame_due) sub->push_frame(frame);
  }
}

void LiveLoop::run_for(double sim_s) {
  if (running_) throw Error("run_for while the real-time loop is running");
  sim_end_s_ += sim_s;
  while (exec_.next_tick_time_s() < sim_end_s_ - kTimeEpsilon) tick();
}

void LiveLoop::start() {
  if (running_.exchange(true)) return;
  {
    std::lock_guard lock(run_mu_);
    stop_requested_ = false;
  }
  thread_ = std::thread([this] { thread_main(); });
}

void LiveLoop::stop() {
  {
    std::lock_guard lock(run_mu_);
    stop_requested_ = true;
  }
  run_cv_.notify_all();
  if (thread_.joinable()) {
    thread_.join();
    sim_end_s_ = exec_.time_s();
  }
  running_ = false;
}

void LiveLoop::thread_main() {
  using clock = std::chrono::steady_clock;
  auto origin = clock::now();
  double sim_origin = exec_.time_s();
  std::unique_lock lock(run_mu_);
  while (!stop_requested_) {
    lock.unlock();
    tick();
    lock.lock();
    const auto due = origin + std::chrono::duration_cast<clock::duration>(
                                  std::chrono::duration<double>(exec_.next_tick_time_s() - sim_origin));
    // Fell more than a second behind (debugger, overloaded host): resync
    // instead of bursting through the backlog.
    if (clock::now() - due > std::chrono::seconds(1)) {
      origin = clock::now();
      sim_origin = exec_.next_tick_time_s();
      continue;
    }
    run_cv_.wait_until(lock, due, [this] { return stop_requested_; });
  }
}

}  // namespace balloonscope::teleop
