#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "balloonscope/control/bang_bang.hpp"
#include "balloonscope/control/command.hpp"
#include "balloonscope/control/trace.hpp"
#include "balloonscope/errors.hpp"
#include "balloonscope/estimation/calibration.hpp"
#include "balloonscope/imaging/scene.hpp"
#include "balloonscope/imaging/sensing.hpp"
#include "balloonscope/plant/plant.hpp"

namespace balloonscope::control {

struct LoopConfig {
  double camera_rate_hz = 30.0;
  double plant_dt_s = 0.001;
  BangBangLaw law;
  /// Pump speed used to deploy the optical face after an Inflate command.
  double inflate_rpm = 100.0;
  /// Frames the controller sees are this many ticks old.
  int latency_ticks = 0;

  void validate() const;
};

/// Everything the closed loop needs besides calibration and initial state.
struct LoopSetup {
  plant::PlantModel plant;
  imaging::SceneModel scene;
  imaging::SensingConfig sensing;
  LoopConfig loop;
};

struct TickResult {
  double omega_rpm = 0.0;
  TraceRecord record;
};

/// One sensing/control evaluation: dP = f(alpha_cmd) - P(frame) drives the
/// bang-bang law. A lost channel yields omega = 0 and a fault record.
TickResult control_tick(const plant::PlantState& state, const estimation::Calibration& cal, double alpha_cmd_deg,
                        const imaging::Frame& frame, const imaging::SensingConfig& sensing, const BangBangLaw& law,
                        double time_s);

enum class DeployPhase { Collapsed, Inflating, Deployed };

/// Pump ran into an empty or full syringe while the controller was driving it.
class PumpSaturationError : public Error {
 public:
  PumpSaturationError(const std::string& what, Trace partial) : Error(what), trace_(std::move(partial)) {}
  const Trace& trace() const noexcept { return trace_; }

 private:
  Trace trace_;
};

/// Fixed-step closed loop: the plant advances every `plant_dt_s`, sensing and
/// control run at the camera rate, and the pump command is held between
/// ticks. Single-threaded and deterministic for a fixed seed.
///
/// The optical face must be deployed before angle control engages. Starting
/// below the deployment volume, the loop idles until an Inflate command, then
/// infuses at `inflate_rpm` up to exactly the deployment volume. Once
/// deployed the controller never deflates below that volume.
class LoopExecutor {
 public:
  LoopExecutor(LoopSetup setup, estimation::Calibration cal, plant::PlantState initial, std::uint64_t seed);

  /// Queues a command; it is applied at the first tick whose time is >= its
  /// timestamp. Commands with equal timestamps keep submission order.
  void submit(const ControlCommand& cmd);

  /// Runs one control tick and the plant steps up to the next tick.
  TraceRecord step();

  double time_s() const;
  std::int64_t tick_index() const { return tick_; }
  double next_tick_time_s() const;
  const plant::PlantState& state() const { return state_; }
  const imaging::Frame& last_frame() const { return frame_; }
  const LoopSetup& setup() const { return setup_; }
  const estimation::Calibration& calibration() const { return cal_; }
  DeployPhase phase() const { return phase_; }
  bool estopped() const { return estop_; }
  double command_angle_deg() const { return alpha_cmd_; }
  /// Set when the last step() drove the pump into the empty or full stop.
  bool hit_syringe_limit() const { return hit_limit_; }

 private:
  std::int64_t plant_steps_at(std::int64_t tick) const;
  void apply(const ControlCommand& cmd);

  LoopSetup setup_;
  estimation::Calibration cal_;
  plant::PlantState state_;
  std::uint64_t seed_;
  std::int64_t tick_ = 0;
  std::int64_t plant_step_ = 0;
  std::deque<ControlCommand> inbox_;
  std::deque<plant::PlantState> history_;
  imaging::Frame frame_;
  DeployPhase phase_ = DeployPhase::Collapsed;
  std::int64_t deploy_microsteps_ = 0;
  double alpha_cmd_ = 0.0;
  bool estop_ = false;
  bool hit_limit_ = false;
};

/// Runs `script` for `duration_s` and returns one record per tick. Throws
/// PumpSaturationError (carrying the partial trace) if the syringe empties or
/// fills while under control.
Trace run_closed_loop(const LoopSetup& setup, const estimation::Calibration& cal, const plant::PlantState& initial,
                      std::span<const ControlCommand> script, double duration_s, std::uint64_t seed);

/// Mixes a run seed with a tick index into a per-frame render seed.
std::uint64_t frame_seed(std::uint64_t run_seed, std::uint64_t tick);

}  // namespace balloonscope::control
