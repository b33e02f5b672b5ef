#include "balloonscope/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "balloonscope/errors.hpp"

namespace balloonscope::harness {
namespace {

constexpr double kTimeEpsilon = 1e-9;

struct RowInfo {
  const char* metric;
  const char* target;
};

constexpr std::array<RowInfo, kRequirementCount> kRows{{
    {"collapsed outer diameter D1", "D1 <= 5 mm"},
    {"deployed optical face diameter D2", "8 mm <= D2 <= 11 mm"},
    {"tip deflection angle", "alpha_max >= 60 deg"},
    {"working channel inner diameter D3", "D3 >= 0.5 mm"},
    {"decoupling of D2 and alpha", "alpha != 0 => D2 >= 8 mm"},
    {"tip angular velocity", "mean rate >= 10 deg/s"},
    {"closed-loop angle precision", "|alpha - alpha_c| <= 2 deg"},
}};

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::NotEvaluated: return "NOT_EVALUATED";
  }
  return "NOT_EVALUATED";
}

std::optional<double> settle_after(std::span<const control::TraceRecord> trace, double target_deg, double band_deg,
                                   double event_time_s, double until_s) {
  std::optional<double> entry;
  bool any = false;
  for (const auto& r : trace) {
    if (r.time_s < event_time_s - kTimeEpsilon || r.time_s >= until_s - kTimeEpsilon) continue;
    any = true;
    const bool inside = std::abs(r.alpha_true_deg - target_deg) <= band_deg;
    if (inside && !entry) entry = r.time_s - event_time_s;
    if (!inside) entry.reset();
  }
  return any ? entry : std::nullopt;
}

double max_abs_error(std::span<const control::TraceRecord> trace, double target_deg, double from_s, double until_s) {
  double worst = 0.0;
  for (const auto& r : trace) {
    if (r.time_s < from_s - kTimeEpsilon || r.time_s >= until_s - kTimeEpsilon) continue;
    worst = std::max(worst, std::abs(r.alpha_true_deg - target_deg));
  }
  return worst;
}

StepMetrics step_metrics(std::span<const control::TraceRecord> trace, double target_deg, double band_deg,
                         double step_time_s, double steady_window_s) {
  const auto first = std::find_if(trace.begin(), trace.end(),
                                  [&](const auto& r) { return r.time_s >= step_time_s - kTimeEpsilon; });
  if (first == trace.end()) throw Error("step_metrics: no records after the step time");
  const auto tail = trace.subspan(static_cast<std::size_t>(first - trace.begin()));

  StepMetrics m;
  m.start_deg = tail.front().alpha_true_deg;
  m.target_deg = target_deg;
  m.magnitude_deg = std::abs(target_deg - m.start_deg);
  const double direction = target_deg >= m.start_deg ? 1.0 : -1.0;

  double extreme = -INFINITY;
  for (const auto& r : tail) {
    extreme = std::max(extreme, direction * (r.alpha_true_deg - target_deg));
    if (!m.first_entry_s && std::abs(r.alpha_true_deg - target_deg) <= band_deg) m.first_entry_s = r.time_s - step_time_s;
  }
  m.overshoot_deg = std::max(0.0, extreme);

  const double end_s = tail.back().time_s + kTimeEpsilon * 2;
  m.settle_time_s = settle_after(tail, target_deg, band_deg, step_time_s, INFINITY);
  if (m.magnitude_deg == 0.0) {
    m.mean_rate_deg_per_s.reset();
  } else if (m.settle_time_s && *m.settle_time_s > 0.0) {
    m.mean_rate_deg_per_s = m.magnitude_deg / *m.settle_time_s;
  }
  m.steady_state_error_deg = max_abs_error(tail, target_deg, end_s - steady_window_s, INFINITY);
  return m;
}

MetricsReport::MetricsReport(std::string scenario_name, std::uint64_t run_seed)
    : scenario(std::move(scenario_name)), seed(run_seed) {
  for (std::size_t i = 0; i < kRequirementCount; ++i) {
    requirements[i].row = static_cast<int>(i) + 1;
    requirements[i].metric = kRows[i].metric;
    requirements[i].target = kRows[i].target;
  }
}

RequirementVerdict& MetricsReport::requirement(Requirement r) {
  return requirements[static_cast<std::size_t>(r) - 1];
}

const RequirementVerdict& MetricsReport::requirement(Requirement r) const {
  return requirements[static_cast<std::size_t>(r) - 1];
}

void MetricsReport::judge(Requirement r, bool pass, std::optional<double> measured, std::string detail) {
  auto& row = requirement(r);
  row.verdict = pass ? Verdict::Pass : Verdict::Fail;
  row.measured = measured;
  row.detail = std::move(detail);
}

bool MetricsReport::passed() const {
  return std::none_of(requirements.begin(), requirements.end(),
                      [](const auto& r) { return r.verdict == Verdict::Fail; });
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["settle_time_s"] = opt(settle_time_s);
  j["overshoot_deg"] = opt(overshoot_deg);
  j["mean_rate_deg_per_s"] = opt(mean_rate_deg_per_s);
  j["steady_state_error_deg"] = opt(steady_state_error_deg);
  j["decoupling_pass"] = decoupling_pass ? nlohmann::json(*decoupling_pass) : nlohmann::json(nullptr);
  auto& rows = j["requirements"] = nlohmann::json::array();
  for (const auto& r : requirements) {
    rows.push_back({{"row", r.row},
                    {"metric", r.metric},
                    {"target", r.target},
                    {"verdict", std::string(to_string(r.verdict))},
                    {"measured", opt(r.measured)},
                    {"detail", r.detail}});
  }
  auto& vals = j["values"] = nlohmann::json::object();
  for (const auto& [k, v] : values) vals[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  j["passed"] = passed();
  return j;
}

void judge_geometry(MetricsReport& report, const plant::BalloonGeometry& geometry) {
  report.judge(Requirement::CollapsedDiameter, geometry.collapsed_od_mm <= plant::BalloonGeometry::kMaxCollapsedOdMm,
               geometry.collapsed_od_mm, "mm");
  report.judge(Requirement::ChannelDiameter, geometry.channel_id_mm >= plant::BalloonGeometry::kMinChannelIdMm,
               geometry.channel_id_mm, "mm");
}

void judge_decoupling(MetricsReport& report, const plant::DecouplingReport& scan) {
  report.decoupling_pass = scan.pass();
  report.judge(Requirement::FaceDiameter, scan.face_within_limits, scan.max_face_mm,
               "max D2 mm; min D2 while bent " + std::to_string(scan.min_face_while_bent_mm) + " mm");
  report.judge(Requirement::MaxAngle, scan.reaches_target_angle, scan.max_angle_deg, "deg at full volume");
  report.judge(Requirement::Decoupling, scan.angle_implies_open_face, scan.min_face_while_bent_mm,
               "min D2 mm wherever alpha > 0");
}

void judge_steps(MetricsReport& report, std::span<const StepMetrics> repeats, double settle_limit_s,
                 double min_rate_deg_per_s, double max_overshoot_deg, double band_deg) {
  if (repeats.empty()) return;
  bool rate_ok = true;
  bool hold_ok = true;
  double settle_sum = 0.0;
  double rate_sum = 0.0;
  std::size_t settled = 0;
  std::size_t rated = 0;
  double worst_rate = INFINITY;
  double worst_overshoot = 0.0;
  double worst_ss = 0.0;
  for (const auto& m : repeats) {
    if (m.settle_time_s) {
      settle_sum += *m.settle_time_s;
      ++settled;
    }
    if (m.mean_rate_deg_per_s) {
      rate_sum += *m.mean_rate_deg_per_s;
      ++rated;
      worst_rate = std::min(worst_rate, *m.mean_rate_deg_per_s);
    }
    worst_overshoot = std::max(worst_overshoot, m.overshoot_deg);
    worst_ss = std::max(worst_ss, m.steady_state_error_deg);
    const bool settled_in_time = m.settle_time_s && *m.settle_time_s <= settle_limit_s;
    if (m.magnitude_deg > 0.0)
      rate_ok = rate_ok && settled_in_time && m.mean_rate_deg_per_s && *m.mean_rate_deg_per_s >= min_rate_deg_per_s;
    hold_ok = hold_ok && m.settle_time_s && m.steady_state_error_deg <= band_deg && m.overshoot_deg <= max_overshoot_deg;
  }
  report.settle_time_s = settled == repeats.size() ? std::optional(settle_sum / static_cast<double>(settled)) : std::nullopt;
  report.mean_rate_deg_per_s = rated > 0 ? std::optional(rate_sum / static_cast<double>(rated)) : std::nullopt;
  report.overshoot_deg = worst_overshoot;
  report.steady_state_error_deg = worst_ss;
  if (rated > 0) {
    report.judge(Requirement::TipRate, rate_ok, worst_rate, "slowest repeat deg/s");
  } else if (std::any_of(repeats.begin(), repeats.end(), [](const auto& m) { return m.magnitude_deg > 0.0; })) {
    report.judge(Requirement::TipRate, false, std::nullopt, "never settled");
  }
  report.judge(Requirement::AngleHold, hold_ok, worst_ss, "worst steady-state error deg");
}

}  // namespace balloonscope::harness
