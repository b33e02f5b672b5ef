#include "balloonscope/harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "../common/numbers.hpp"
#include "balloonscope/control/executor.hpp"
#include "balloonscope/errors.hpp"
#include "balloonscope/estimation/savgol.hpp"
#include "balloonscope/imaging/scene.hpp"
#include "balloonscope/imaging/sensing.hpp"

namespace balloonscope::harness {
namespace {

using detail::format_double;

constexpr int kSmoothWindow = 7;
constexpr int kSmoothOrder = 2;

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

bool writes(const Scenario& s) { return !s.out_dir.empty(); }

std::vector<double> smooth_alpha(const control::Trace& trace) {
  std::vector<double> alpha;
  alpha.reserve(trace.size());
  for (const auto& r : trace) alpha.push_back(r.alpha_true_deg);
  if (alpha.size() < static_cast<std::size_t>(kSmoothWindow)) return alpha;
  return estimation::savgol_smooth(alpha, kSmoothWindow, kSmoothOrder);
}

double duration_of_script(const std::vector<control::ControlCommand>& script) {
  return script.empty() ? 0.0 : script.back().time_s;
}

ToolEventMetrics event_metrics(const control::Trace& trace, double target, double band, double event_s,
                               double until_s, double recover_within_s) {
  ToolEventMetrics m;
  m.event_time_s = event_s;
  for (const auto& r : trace) {
    if (r.time_s < event_s || r.time_s >= until_s) continue;
    const double dev = r.alpha_true_deg - target;
    if (std::abs(dev) > std::abs(m.peak_deviation_deg)) m.peak_deviation_deg = dev;
  }
  m.recovery_s = settle_after(trace, target, band, event_s, until_s);
  m.steady_state_error_deg = max_abs_error(trace, target, event_s + recover_within_s, until_s);
  return m;
}

}  // namespace

double free_angle_for_loaded(double loaded_deg, const plant::ToolModel& tool, double max_free_deg) {
  if (plant::apply_tool(max_free_deg, tool) < loaded_deg) throw OutOfRangeError("loaded angle unreachable");
  double lo = 0.0;
  double hi = max_free_deg;
  if (plant::apply_tool(lo, tool) >= loaded_deg) return lo;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (plant::apply_tool(mid, tool) >= loaded_deg ? hi : lo) = mid;
  }
  return hi;
}

control::LoopSetup noisy_setup(const SimulationConfig& config) {
  control::LoopSetup setup = config.setup;
  setup.scene.noise_amplitude = config.step.noise_amplitude;
  setup.scene.jitter_px = config.step.jitter_px;
  return setup;
}

void write_report(const MetricsReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << report.to_json().dump(2) << '\n';
}

void write_trace_file(const control::Trace& trace, const std::filesystem::path& path) {
  auto out = open_out(path);
  control::write_trace_csv(out, trace);
}

void write_smoothed_file(const control::Trace& trace, const std::vector<double>& smoothed,
                         const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "time_s,alpha_true_deg,alpha_smoothed_deg\n";
  for (std::size_t i = 0; i < trace.size() && i < smoothed.size(); ++i) {
    out << format_double(trace[i].time_s) << ',' << format_double(trace[i].alpha_true_deg) << ','
        << format_double(smoothed[i]) << '\n';
  }
}

SweepResult run_sweep(const Scenario& scenario) {
  const auto& cfg = scenario.config;
  const auto& model = cfg.setup.plant;
  if (!(cfg.sweep.increment_ml > 0.0)) throw ConfigError(cfg.source, 0, "sweep.increment_ml must be > 0");
  if (cfg.sweep.max_volume_ml > model.curve.max_volume_ml() + 1e-12)
    throw ConfigError(cfg.source, 0, "sweep.max_volume_ml beyond the response curve");

  SweepResult res;
  res.report = MetricsReport(scenario.name, scenario.seed);
  plant::ToolModel tool = model.tool;
  tool.inserted = true;
  const auto n = static_cast<long>(std::floor(cfg.sweep.max_volume_ml / cfg.sweep.increment_ml + 1e-9));
  for (long i = 0; i <= n; ++i) {
    const auto state = plant::with_tool(plant::initial_state(model, static_cast<double>(i) * cfg.sweep.increment_ml), false);
    SweepPoint p;
    p.volume_ml = state.volume_ml;
    p.face_diameter_mm = state.face_diameter_mm;
    p.free_angle_deg = state.free_angle_deg;
    p.tool_angle_deg = plant::apply_tool(state.free_angle_deg, tool);
    p.tip = plant::tip_pose(state.angle_deg, state.roll_deg, model.geometry);
    const double deficit = p.free_angle_deg - p.tool_angle_deg;
    res.max_tool_deficit_deg = std::max(res.max_tool_deficit_deg, deficit);
    res.points.push_back(p);
  }
  if (!res.points.empty())
    res.tool_deficit_at_max_volume_deg = res.points.back().free_angle_deg - res.points.back().tool_angle_deg;
  res.decoupling = plant::check_decoupling(model.curve, cfg.sweep.dense_resolution_ml);

  judge_geometry(res.report, model.geometry);
  judge_decoupling(res.report, res.decoupling);
  res.report.add_value("points", static_cast<double>(res.points.size()));
  res.report.add_value("angle_at_max_volume_deg", res.points.empty() ? 0.0 : res.points.back().free_angle_deg);
  res.report.add_value("max_tool_deficit_deg", res.max_tool_deficit_deg);
  res.report.add_value("tool_deficit_at_max_volume_deg", res.tool_deficit_at_max_volume_deg);

  if (writes(scenario)) {
    auto out = open_out(scenario.out_dir / "sweep.csv");
    out << kSweepCsvHeader << '\n';
    for (const auto& p : res.points) {
      out << format_double(p.volume_ml) << ',' << format_double(p.face_diameter_mm) << ','
          << format_double(p.free_angle_deg) << ',' << format_double(p.tool_angle_deg) << ','
          << format_double(p.tip.x_mm) << ',' << format_double(p.tip.y_mm) << ',' << format_double(p.tip.z_mm)
          << '\n';
    }
    write_report(res.report, scenario.out_dir / "report.json");
  }
  return res;
}

CalibrationRun run_calibration(const Scenario& scenario, bool tool_inserted) {
  const auto& cfg = scenario.config;
  const auto& model = cfg.setup.plant;
  const auto& cs = cfg.calibration;
  if (cs.repeats < 1) throw ConfigError(cfg.source, 0, "calibration.repeats must be >= 1");
  if (!(cs.angle_step_deg > 0.0)) throw ConfigError(cfg.source, 0, "calibration.angle_step_deg must be > 0");

  plant::ToolModel tool = model.tool;
  tool.inserted = tool_inserted;
  const double max_free = model.curve.at(model.curve.max_volume_ml()).free_angle_deg;
  const double deploy = model.curve.face_deploy_volume_ml();

  CalibrationRun run;
  run.tool_inserted = tool_inserted;
  const auto n = static_cast<long>(std::floor(cs.angle_max_deg / cs.angle_step_deg + 1e-9));
  for (long k = 0; k <= n; ++k) {
    const double loaded = static_cast<double>(k) * cs.angle_step_deg;
    if (plant::apply_tool(max_free, tool) < loaded) continue;
    const double free = free_angle_for_loaded(loaded, tool, max_free);
    const double volume = std::max(deploy, model.curve.volume_for_free_angle(free));
    const auto state = plant::with_tool(plant::initial_state(model, volume), tool_inserted);
    double sum = 0.0;
    for (int r = 0; r < cs.repeats; ++r) {
      const auto seed = control::frame_seed(scenario.seed, static_cast<std::uint64_t>(k * cs.repeats + r));
      sum += imaging::sense(imaging::render_frame(state, cfg.setup.scene, seed), cfg.setup.sensing).ratio;
    }
    run.samples.push_back({state.angle_deg, sum / cs.repeats});
  }

  if (writes(scenario)) {
    auto out = open_out(scenario.out_dir / "calibration_samples.csv");
    out << "angle_deg,ratio\n";
    for (const auto& s : run.samples) out << format_double(s.angle_deg) << ',' << format_double(s.ratio) << '\n';
  }

  run.calibration = estimation::fit_calibration(run.samples, cs.degree);
  run.calibration.created = "auto-calibrate seed=" + std::to_string(scenario.seed) + (tool_inserted ? " tool" : "");
  if (!run.calibration.monotone)
    throw Error("calibration fit is not monotone over [" + format_double(run.calibration.angle_lo_deg) + ", " +
                format_double(run.calibration.angle_hi_deg) + "] deg");

  if (writes(scenario)) {
    estimation::save_calibration(run.calibration, scenario.out_dir / "calibration.yaml");
    MetricsReport report(scenario.name, scenario.seed);
    report.add_value("rmse", run.calibration.rmse);
    report.add_value("samples", static_cast<double>(run.samples.size()));
    report.add_value("angle_hi_deg", run.calibration.angle_hi_deg);
    write_report(report, scenario.out_dir / "report.json");
  }
  return run;
}

estimation::Calibration obtain_calibration(const Scenario& scenario) {
  if (scenario.calibration_file) return estimation::load_calibration(*scenario.calibration_file);
  Scenario quiet = scenario;
  quiet.out_dir.clear();
  return run_calibration(quiet, false).calibration;
}

std::vector<control::ControlCommand> step_script(const StepSettings& step) {
  return {control::ControlCommand::inflate(0.0), control::ControlCommand::set_angle(0.0, step.target_deg)};
}

StepResult run_step(const Scenario& scenario) {
  const auto& cfg = scenario.config;
  const auto& st = cfg.step;
  const auto cal = obtain_calibration(scenario);
  const auto setup = noisy_setup(cfg);
  const auto script = step_script(st);
  const auto initial = plant::initial_state(setup.plant, st.initial_volume_ml);

  StepResult res;
  res.report = MetricsReport(scenario.name, scenario.seed);
  std::vector<StepMetrics> metrics;
  for (int i = 0; i < st.repeats; ++i) {
    StepRepeat rep;
    rep.seed = scenario.seed + static_cast<std::uint64_t>(i);
    rep.trace = control::run_closed_loop(setup, cal, initial, script, st.duration_s, rep.seed);
    rep.smoothed_alpha_deg = smooth_alpha(rep.trace);
    rep.metrics = step_metrics(rep.trace, control::clamp_command_angle(st.target_deg), st.band_deg, 0.0, 1.0);
    metrics.push_back(rep.metrics);
    res.repeats.push_back(std::move(rep));
  }
  judge_steps(res.report, metrics, st.settle_limit_s, st.min_rate_deg_per_s, st.max_overshoot_deg, st.band_deg);

  if (writes(scenario)) {
    for (std::size_t i = 0; i < res.repeats.size(); ++i) {
      const auto stem = "step_" + std::to_string(i);
      write_trace_file(res.repeats[i].trace, scenario.out_dir / (stem + ".csv"));
      write_smoothed_file(res.repeats[i].trace, res.repeats[i].smoothed_alpha_deg,
                          scenario.out_dir / (stem + "_smoothed.csv"));
    }
    write_report(res.report, scenario.out_dir / "report.json");
  }
  return res;
}

std::vector<control::ControlCommand> toolcomp_script(const ToolCompSettings& tc) {
  return {control::ControlCommand::inflate(0.0), control::ControlCommand::set_angle(0.0, tc.target_deg),
          control::ControlCommand::insert_tool(tc.insert_at_s), control::ControlCommand::remove_tool(tc.remove_at_s)};
}

ToolCompResult run_tool_compensation(const Scenario& scenario) {
  const auto& cfg = scenario.config;
  const auto& tc = cfg.toolcomp;
  if (!(tc.insert_at_s < tc.remove_at_s && tc.remove_at_s < tc.duration_s))
    throw ConfigError(cfg.source, 0, "toolcomp: need insert_at_s < remove_at_s < duration_s");
  const auto cal = obtain_calibration(scenario);
  const auto setup = noisy_setup(cfg);
  const double target = control::clamp_command_angle(tc.target_deg);

  ToolCompResult res;
  res.report = MetricsReport(scenario.name, scenario.seed);
  res.trace = control::run_closed_loop(setup, cal, plant::initial_state(setup.plant, 0.0), toolcomp_script(tc),
                                       tc.duration_s, scenario.seed);
  res.smoothed_alpha_deg = smooth_alpha(res.trace);
  res.insertion = event_metrics(res.trace, target, tc.band_deg, tc.insert_at_s, tc.remove_at_s, tc.recover_within_s);
  res.removal = event_metrics(res.trace, target, tc.band_deg, tc.remove_at_s, INFINITY, tc.recover_within_s);

  auto recovered = [&](const ToolEventMetrics& m) {
    return m.recovery_s && *m.recovery_s <= tc.recover_within_s && m.steady_state_error_deg <= tc.band_deg;
  };
  const double worst = std::max(res.insertion.steady_state_error_deg, res.removal.steady_state_error_deg);
  res.report.steady_state_error_deg = worst;
  res.report.judge(Requirement::AngleHold, recovered(res.insertion) && recovered(res.removal), worst,
                   "worst error deg from " + format_double(tc.recover_within_s) + " s after each tool event");
  res.report.add_value("insertion_peak_deviation_deg", res.insertion.peak_deviation_deg);
  res.report.add_value("insertion_recovery_s", res.insertion.recovery_s.value_or(NAN));
  res.report.add_value("insertion_steady_state_error_deg", res.insertion.steady_state_error_deg);
  res.report.add_value("removal_peak_deviation_deg", res.removal.peak_deviation_deg);
  res.report.add_value("removal_recovery_s", res.removal.recovery_s.value_or(NAN));
  res.report.add_value("removal_steady_state_error_deg", res.removal.steady_state_error_deg);

  if (writes(scenario)) {
    write_trace_file(res.trace, scenario.out_dir / "toolcomp.csv");
    write_smoothed_file(res.trace, res.smoothed_alpha_deg, scenario.out_dir / "toolcomp_smoothed.csv");
    write_report(res.report, scenario.out_dir / "report.json");
  }
  return res;
}

ReplayResult replay_operator(const Scenario& scenario) {
  const auto& cfg = scenario.config;
  const auto& rp = cfg.replay;
  if (scenario.script.empty()) throw ConfigError(cfg.source, 0, "replay needs a non-empty knob trace");
  const auto cal = obtain_calibration(scenario);
  const auto setup = noisy_setup(cfg);

  std::vector<control::ControlCommand> script;
  script.push_back(control::ControlCommand::inflate(0.0));
  script.insert(script.end(), scenario.script.begin(), scenario.script.end());
  const double duration = duration_of_script(script) + rp.tail_s;

  ReplayResult res;
  res.report = MetricsReport(scenario.name, scenario.seed);
  res.trace = control::run_closed_loop(setup, cal, plant::initial_state(setup.plant, 0.0), script, duration,
                                       scenario.seed);

  for (const auto& cmd : scenario.script) {
    if (cmd.kind != control::CommandKind::SetAngle) continue;
    const double target = control::clamp_command_angle(cmd.value);
    if (!res.segments.empty() && res.segments.back().target_deg == target) continue;
    if (!res.segments.empty()) res.segments.back().end_s = cmd.time_s;
    res.segments.push_back({cmd.time_s, duration, target, std::nullopt, false});
  }
  bool ok = true;
  double worst = 0.0;
  for (auto& seg : res.segments) {
    seg.settle_s = settle_after(res.trace, seg.target_deg, rp.band_deg, seg.start_s, seg.end_s);
    seg.judged = seg.end_s - seg.start_s >= rp.settle_limit_s;
    if (!seg.judged) continue;
    const bool settled = seg.settle_s && *seg.settle_s <= rp.settle_limit_s;
    ok = ok && settled;
    worst = std::max(worst, seg.settle_s.value_or(INFINITY));
  }
  const auto judged = std::count_if(res.segments.begin(), res.segments.end(), [](const auto& s) { return s.judged; });
  if (judged > 0)
    res.report.judge(Requirement::AngleHold, ok, worst,
                     "slowest settle s over " + std::to_string(judged) + " commanded levels");
  res.report.add_value("segments", static_cast<double>(res.segments.size()));

  if (writes(scenario)) {
    write_trace_file(res.trace, scenario.out_dir / "replay.csv");
    write_report(res.report, scenario.out_dir / "report.json");
  }
  return res;
}

}  // namespace balloonscope::harness
