#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "balloonscope/control/command.hpp"
#include "balloonscope/control/trace.hpp"
#include "balloonscope/estimation/calibration.hpp"
#include "balloonscope/harness/config.hpp"
#include "balloonscope/harness/metrics.hpp"
#include "balloonscope/plant/plant.hpp"

namespace balloonscope::harness {

/// One experiment invocation. When `out_dir` is empty nothing is written.
struct Scenario {
  std::string name;
  SimulationConfig config = default_config();
  /// Load this calibration instead of auto-calibrating.
  std::optional<std::filesystem::path> calibration_file;
  /// Command script for replay; other experiments build their own.
  std::vector<control::ControlCommand> script;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
};

// -- volume sweep -----------------------------------------------------------

struct SweepPoint {
  double volume_ml = 0.0;
  double face_diameter_mm = 0.0;
  double free_angle_deg = 0.0;
  double tool_angle_deg = 0.0;  // loaded angle with a tool in the channel
  plant::TipPosition tip;       // tool-free tip position
};

struct SweepResult {
  std::vector<SweepPoint> points;
  plant::DecouplingReport decoupling;
  double max_tool_deficit_deg = 0.0;
  double tool_deficit_at_max_volume_deg = 0.0;
  MetricsReport report;
};

/// Steps the pump from empty to `sweep.max_volume_ml` in `sweep.increment_ml`
/// increments, recording the response with and without a tool. Writes
/// sweep.csv and report.json.
SweepResult run_sweep(const Scenario& scenario);

inline constexpr const char* kSweepCsvHeader =
    "volume_ml,face_diameter_mm,free_angle_deg,tool_angle_deg,tip_x_mm,tip_y_mm,tip_z_mm";

// -- calibration ------------------------------------------------------------

struct CalibrationRun {
  estimation::Calibration calibration;
  /// Repeat-averaged samples the fit used.
  std::vector<estimation::CalibrationSample> samples;
  bool tool_inserted = false;
};

/// Steps the tip through the configured angle grid, senses the pixel ratio
/// `calibration.repeats` times per angle and fits the polynomial. Angles a
/// tool-loaded tip cannot reach are skipped. Writes calibration_samples.csv
/// (always, so a failed fit can be inspected), calibration.yaml and
/// report.json. Throws Error when the fit is not monotone.
CalibrationRun run_calibration(const Scenario& scenario, bool tool_inserted = false);

/// The scenario's calibration file if set, else a quiet tool-free
/// auto-calibration (nothing written).
estimation::Calibration obtain_calibration(const Scenario& scenario);

// -- step response ----------------------------------------------------------

struct StepRepeat {
  std::uint64_t seed = 0;
  control::Trace trace;
  /// Smoothed true angle for plotting; metrics use the raw trace.
  std::vector<double> smoothed_alpha_deg;
  StepMetrics metrics;
};

struct StepResult {
  std::vector<StepRepeat> repeats;
  MetricsReport report;
};

/// Repeats a deploy-and-step run `step.repeats` times with seeds seed, seed+1,
/// ... under sensor noise. Writes step_<i>.csv, step_<i>_smoothed.csv and
/// report.json.
StepResult run_step(const Scenario& scenario);

/// Script of a step run: inflate and set the target at t = 0.
std::vector<control::ControlCommand> step_script(const StepSettings& step);

// -- tool compensation ------------------------------------------------------

struct ToolEventMetrics {
  double event_time_s = 0.0;
  /// Signed extreme of alpha - target between this event and the next.
  double peak_deviation_deg = 0.0;
  std::optional<double> recovery_s;
  /// Largest |alpha - target| from event + recover_within to the next event.
  double steady_state_error_deg = 0.0;
};

struct ToolCompResult {
  control::Trace trace;
  std::vector<double> smoothed_alpha_deg;
  ToolEventMetrics insertion;
  ToolEventMetrics removal;
  MetricsReport report;
};

/// Holds the target, inserts a tool, then removes it. Writes toolcomp.csv,
/// toolcomp_smoothed.csv and report.json.
ToolCompResult run_tool_compensation(const Scenario& scenario);

std::vector<control::ControlCommand> toolcomp_script(const ToolCompSettings& settings);

// -- operator replay ----------------------------------------------------------

struct ReplaySegment {
  double start_s = 0.0;
  double end_s = 0.0;
  double target_deg = 0.0;
  std::optional<double> settle_s;
  /// Long enough that settling within the limit is required.
  bool judged = false;
};

struct ReplayResult {
  control::Trace trace;
  std::vector<ReplaySegment> segments;
  MetricsReport report;
};

/// Feeds the scenario's knob commands through the closed loop after an
/// initial inflate. Each change of commanded angle opens a segment; a segment
/// at least `replay.settle_limit_s` long must settle within that limit.
/// Writes replay.csv and report.json.
ReplayResult replay_operator(const Scenario& scenario);

// -- shared -----------------------------------------------------------------

/// Config setup with the step settings' noise applied to the scene.
control::LoopSetup noisy_setup(const SimulationConfig& config);

/// Smallest free angle whose tool-loaded angle reaches `loaded_deg`.
double free_angle_for_loaded(double loaded_deg, const plant::ToolModel& tool, double max_free_deg);

void write_report(const MetricsReport& report, const std::filesystem::path& path);
void write_trace_file(const control::Trace& trace, const std::filesystem::path& path);
/// time_s,alpha_true_deg,alpha_smoothed_deg
void write_smoothed_file(const control::Trace& trace, const std::vector<double>& smoothed,
                         const std::filesystem::path& path);

}  // namespace balloonscope::harness
