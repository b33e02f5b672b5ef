#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "balloonscope/control/trace.hpp"
#include "balloonscope/plant/geometry.hpp"
#include "balloonscope/plant/response_curve.hpp"

namespace balloonscope::harness {

enum class Verdict { Pass, Fail, NotEvaluated };

std::string_view to_string(Verdict v);

/// Numbered procedure requirements a run is judged against.
enum class Requirement {
  CollapsedDiameter = 1,  // D1 <= 5 mm
  FaceDiameter = 2,       // 8 <= D2 <= 11 mm
  MaxAngle = 3,           // alpha_max >= 60 deg
  ChannelDiameter = 4,    // D3 >= 0.5 mm
  Decoupling = 5,         // alpha > 0 => D2 >= 8 mm
  TipRate = 6,            // mean alpha rate >= 10 deg/s
  AngleHold = 7,          // |alpha - alpha_c| <= 2 deg
};

inline constexpr std::size_t kRequirementCount = 7;

struct RequirementVerdict {
  int row = 0;
  std::string metric;
  std::string target;
  Verdict verdict = Verdict::NotEvaluated;
  std::optional<double> measured;
  std::string detail;
};

/// Step-response figures computed from the true tip angle of a raw trace.
///
/// settle time: time from the step until the first sample after which the
/// angle never leaves the band again. overshoot: how far the angle passed the
/// target in the step direction, never negative. mean rate: magnitude over
/// settle time, absent for a zero-magnitude step. steady-state error: largest
/// |alpha - target| over the final `steady_window_s` of the trace.
struct StepMetrics {
  double start_deg = 0.0;
  double target_deg = 0.0;
  double magnitude_deg = 0.0;
  std::optional<double> first_entry_s;
  std::optional<double> settle_time_s;
  double overshoot_deg = 0.0;
  std::optional<double> mean_rate_deg_per_s;
  double steady_state_error_deg = 0.0;
};

/// Evaluates records with time >= step_time_s. The start angle is the true
/// angle of the first such record.
StepMetrics step_metrics(std::span<const control::TraceRecord> trace, double target_deg, double band_deg,
                         double step_time_s = 0.0, double steady_window_s = 1.0);

/// Settle time after `event_time_s`, using records in [event, until).
std::optional<double> settle_after(std::span<const control::TraceRecord> trace, double target_deg, double band_deg,
                                   double event_time_s, double until_s);

/// Largest |alpha_true - target| over records in [from, until).
double max_abs_error(std::span<const control::TraceRecord> trace, double target_deg, double from_s, double until_s);

struct MetricsReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::optional<double> settle_time_s;
  std::optional<double> overshoot_deg;
  std::optional<double> mean_rate_deg_per_s;
  std::optional<double> steady_state_error_deg;
  std::optional<bool> decoupling_pass;
  std::array<RequirementVerdict, kRequirementCount> requirements;
  /// Extra named results in insertion order.
  std::vector<std::pair<std::string, double>> values;

  explicit MetricsReport(std::string scenario_name = {}, std::uint64_t run_seed = 0);

  RequirementVerdict& requirement(Requirement r);
  const RequirementVerdict& requirement(Requirement r) const;
  void judge(Requirement r, bool pass, std::optional<double> measured, std::string detail = {});
  void add_value(std::string name, double v) { values.emplace_back(std::move(name), v); }

  /// False when any requirement failed. NotEvaluated rows do not count.
  bool passed() const;
  nlohmann::json to_json() const;
};

/// Rows 1 and 4 from static geometry.
void judge_geometry(MetricsReport& report, const plant::BalloonGeometry& geometry);
/// Rows 2, 3 and 5 from a dense response scan.
void judge_decoupling(MetricsReport& report, const plant::DecouplingReport& scan);
/// Rows 6 and 7 from one or more step repeats (every repeat must pass).
/// Also fills the aggregate step fields: mean settle time and rate, worst
/// overshoot and steady-state error.
void judge_steps(MetricsReport& report, std::span<const StepMetrics> repeats, double settle_limit_s,
                 double min_rate_deg_per_s, double max_overshoot_deg, double band_deg);

}  // namespace balloonscope::harness
