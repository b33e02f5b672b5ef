#include "balloonscope/control/executor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace balloonscope::control {
namespace {

constexpr double kTimeEpsilon = 1e-9;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void LoopConfig::validate() const {
  if (!(camera_rate_hz > 0.0)) throw ConfigError("loop.camera_rate_hz must be > 0");
  if (!(plant_dt_s > 0.0)) throw ConfigError("loop.plant_dt_s must be > 0");
  if (plant_dt_s > 1.0 / camera_rate_hz) throw ConfigError("loop.plant_dt_s must not exceed the camera period");
  if (!(inflate_rpm > 0.0)) throw ConfigError("loop.inflate_rpm must be > 0");
  if (latency_ticks < 0) throw ConfigError("loop.latency_ticks must be >= 0");
  law.validate();
}

std::uint64_t frame_seed(std::uint64_t run_seed, std::uint64_t tick) { return splitmix64(run_seed ^ splitmix64(tick)); }

TickResult control_tick(const plant::PlantState& state, const estimation::Calibration& cal, double alpha_cmd_deg,
                        const imaging::Frame& frame, const imaging::SensingConfig& sensing, const BangBangLaw& law,
                        double time_s) {
  TickResult out;
  TraceRecord& rec = out.record;
  rec.time_s = time_s;
  rec.alpha_cmd_deg = alpha_cmd_deg;
  rec.p_target = cal.ratio_at(alpha_cmd_deg);
  rec.volume_ml = state.volume_ml;
  rec.alpha_true_deg = state.angle_deg;
  rec.face_diameter_mm = state.face_diameter_mm;
  rec.tool_inserted = state.tool.inserted;
  try {
    const imaging::PixelStats stats = imaging::sense(frame, sensing);
    rec.p_measured = stats.ratio;
    rec.delta_p = rec.p_target - rec.p_measured;
    rec.alpha_est_deg = estimation::estimate_angle(cal, rec.p_measured).angle_deg;
    out.omega_rpm = law.rpm(rec.delta_p);
  } catch (const ChannelLostError&) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.p_measured = nan;
    rec.delta_p = nan;
    rec.alpha_est_deg = nan;
    rec.fault = true;
    out.omega_rpm = 0.0;
  }
  rec.omega_rpm = out.omega_rpm;
  return out;
}

LoopExecutor::LoopExecutor(LoopSetup setup, estimation::Calibration cal, plant::PlantState initial, std::uint64_t seed)
    : setup_(std::move(setup)), cal_(std::move(cal)), state_(std::move(initial)), seed_(seed) {
  setup_.loop.validate();
  if (!cal_.usable_for_control()) throw Error("closed loop needs a monotone calibration");
  deploy_microsteps_ = setup_.plant.pump.microsteps_for(setup_.plant.curve.face_deploy_volume_ml());
  phase_ = state_.pump.microstep_count >= deploy_microsteps_ ? DeployPhase::Deployed : DeployPhase::Collapsed;
}

void LoopExecutor::submit(const ControlCommand& cmd) {
  const auto pos = std::upper_bound(inbox_.begin(), inbox_.end(), cmd.time_s,
                                    [](double t, const ControlCommand& c) { return t < c.time_s; });
  inbox_.insert(pos, cmd);
}

double LoopExecutor::time_s() const { return static_cast<double>(plant_step_) * setup_.loop.plant_dt_s; }

double LoopExecutor::next_tick_time_s() const {
  return static_cast<double>(plant_steps_at(tick_)) * setup_.loop.plant_dt_s;
}

std::int64_t LoopExecutor::plant_steps_at(std::int64_t tick) const {
  const double steps_per_tick = 1.0 / (setup_.loop.camera_rate_hz * setup_.loop.plant_dt_s);
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(tick) * steps_per_tick - kTimeEpsilon));
}

void LoopExecutor::apply(const ControlCommand& cmd) {
  switch (cmd.kind) {
    case CommandKind::SetAngle:
      alpha_cmd_ = clamp_command_angle(cmd.value);
      break;
    case CommandKind::Inflate:
      if (phase_ == DeployPhase::Collapsed) phase_ = DeployPhase::Inflating;
      break;
    case CommandKind::InsertTool:
      state_ = plant::with_tool(state_, true);
      break;
    case CommandKind::RemoveTool:
      state_ = plant::with_tool(state_, false);
      break;
    case CommandKind::EStop:
      estop_ = true;
      break;
    case CommandKind::Reset:
      estop_ = false;
      break;
  }
}

TraceRecord LoopExecutor::step() {
  const auto& cfg = setup_.loop;
  hit_limit_ = false;
  const double now = time_s();
  while (!inbox_.empty() && inbox_.front().time_s <= now + kTimeEpsilon) {
    apply(inbox_.front());
    inbox_.pop_front();
  }
  if (phase_ == DeployPhase::Inflating && state_.pump.microstep_count >= deploy_microsteps_) {
    phase_ = DeployPhase::Deployed;
  }

  history_.push_back(state_);
  while (history_.size() > static_cast<std::size_t>(cfg.latency_ticks) + 1) history_.pop_front();
  const plant::PlantState& seen = history_.front();

  frame_ = imaging::render_frame(seen, setup_.scene, frame_seed(seed_, static_cast<std::uint64_t>(tick_)));
  TickResult tick = control_tick(state_, cal_, alpha_cmd_, frame_, setup_.sensing, cfg.law, now);

  double omega = 0.0;
  plant::PumpLimits limits = plant::PumpLimits::full(setup_.plant.pump);
  switch (phase_) {
    case DeployPhase::Collapsed:
      break;
    case DeployPhase::Inflating:
      omega = cfg.inflate_rpm;
      limits.max_microsteps = deploy_microsteps_;
      break;
    case DeployPhase::Deployed:
      omega = tick.omega_rpm;
      limits.min_microsteps = deploy_microsteps_;
      break;
  }
  if (estop_) omega = 0.0;
  tick.record.omega_rpm = omega;

  const std::int64_t end = plant_steps_at(tick_ + 1);
  const std::int64_t capacity = setup_.plant.pump.capacity_microsteps();
  for (; plant_step_ < end; ++plant_step_) {
    state_ = plant::plant_step(setup_.plant, state_, omega, cfg.plant_dt_s, limits);
    if (state_.pump.saturated && phase_ == DeployPhase::Deployed) {
      const auto count = state_.pump.microstep_count;
      if ((omega > 0.0 && count >= capacity) || (omega < 0.0 && count <= 0)) hit_limit_ = true;
    }
  }
  ++tick_;
  return tick.record;
}

Trace run_closed_loop(const LoopSetup& setup, const estimation::Calibration& cal, const plant::PlantState& initial,
                      std::span<const ControlCommand> script, double duration_s, std::uint64_t seed) {
  LoopExecutor exec(setup, cal, initial, seed);
  for (const auto& cmd : script) exec.submit(cmd);
  Trace trace;
  while (exec.next_tick_time_s() < duration_s - kTimeEpsilon) {
    trace.push_back(exec.step());
    if (exec.hit_syringe_limit()) {
      const double t = trace.back().time_s;
      throw PumpSaturationError("syringe limit reached at t=" + std::to_string(t) + " s", std::move(trace));
    }
  }
  return trace;
}

}  // namespace balloonscope::control
