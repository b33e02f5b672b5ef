#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include "balloonscope/errors.hpp"
#include "balloonscope/harness/experiments.hpp"
#include "balloonscope/imaging/png_codec.hpp"
#include "balloonscope/imaging/sensing.hpp"
#include "balloonscope/teleop/server.hpp"

namespace bs = balloonscope;
namespace hs = balloonscope::harness;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct Globals {
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
};

hs::Scenario make_scenario(const Globals& g, const std::string& name, const std::string& calibration) {
  hs::Scenario s;
  s.name = name;
  s.config = g.config.empty() ? hs::default_config() : hs::load_config(g.config);
  s.seed = g.seed;
  s.out_dir = g.out.empty() ? std::filesystem::path("out") / name : std::filesystem::path(g.out);
  if (!calibration.empty()) s.calibration_file = calibration;
  return s;
}

int report_exit(const hs::MetricsReport& report, const std::filesystem::path& out_dir) {
  for (const auto& r : report.requirements) {
    if (r.verdict == hs::Verdict::NotEvaluated) continue;
    std::cout << hs::to_string(r.verdict) << "  row " << r.row << "  " << r.metric << " (" << r.target << ")";
    if (r.measured) std::cout << "  measured " << *r.measured;
    std::cout << '\n';
  }
  for (const auto& [k, v] : report.values) std::cout << "  " << k << " = " << v << '\n';
  std::cout << "outputs in " << out_dir.string() << '\n';
  return report.passed() ? 0 : kExitFail;
}

int serve(const Globals& g, const std::string& calibration, int port, const std::string& address,
          const std::string& static_dir) {
  auto scenario = make_scenario(g, "serve", calibration);
  const auto& cfg = scenario.config;
  std::cout << "calibrating..." << std::flush;
  const auto cal = hs::obtain_calibration(scenario);
  std::cout << " done\n";

  bs::teleop::LiveSettings live{cfg.service.state_rate_hz, cfg.service.frame_rate_hz, cfg.service.state_queue_limit};
  bs::teleop::LiveLoop loop(hs::noisy_setup(cfg), cal, bs::plant::initial_state(cfg.setup.plant, 0.0), g.seed, live);
  bs::teleop::ServerOptions opts;
  opts.address = address;
  opts.port = static_cast<unsigned short>(port >= 0 ? port : cfg.service.port);
  opts.command_rate_hz = cfg.service.command_rate_hz;
  opts.static_dir = static_dir.empty() ? cfg.service.static_dir : static_dir;
  bs::teleop::TeleopServer server(loop, opts);
  server.start();
  loop.start();
  std::cout << "listening on ws://" << opts.address << ":" << server.port() << "/  (Ctrl-C to stop)" << std::endl;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  loop.stop();
  std::cout << "stopped after " << loop.latest().record.time_s << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steerable balloon cardioscope simulator"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "YAML configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Run seed");
  app.add_option("--out", g.out, "Output directory (default out/<command>)");

  auto* sweep = app.add_subcommand("sweep", "Volume sweep with and without a tool; decoupling verdicts");

  bool tool = false;
  auto* calibrate = app.add_subcommand("calibrate", "Fit the pixel-ratio calibration");
  calibrate->add_flag("--tool", tool, "Calibrate with a tool in the working channel");

  std::string calibration;
  auto* step = app.add_subcommand("step", "Repeated 0 to target step responses");
  auto* toolcomp = app.add_subcommand("toolcomp", "Tool insertion and removal at a held angle");
  auto* replay = app.add_subcommand("replay", "Replay a recorded knob trace (time_s,alpha_cmd_deg)");
  std::string knob;
  replay->add_option("knob", knob, "Knob trace CSV")->required()->check(CLI::ExistingFile);

  auto* srv = app.add_subcommand("serve", "Run the live loop behind a WebSocket endpoint");
  int port = -1;
  std::string address = "127.0.0.1";
  std::string static_dir;
  srv->add_option("--port", port, "Listen port (0 = any free port; default from config)");
  srv->add_option("--address", address, "Listen address");
  srv->add_option("--static-dir", static_dir, "Directory served for plain HTTP requests");

  auto* render = app.add_subcommand("render", "Render one synthetic camera frame to PNG and print its pixel ratio");
  double angle = 0.0;
  double noise = -1.0;
  double jitter = -1.0;
  std::string png;
  render->add_option("--angle", angle, "Tip angle, degrees")->required();
  render->add_option("--noise", noise, "Noise standard deviation (default from config)");
  render->add_option("--jitter", jitter, "Channel jitter, pixels (default from config)");
  render->add_option("png", png, "Output PNG")->required();

  for (auto* sub : {step, toolcomp, replay, srv})
    sub->add_option("--calibration", calibration, "Calibration file (default: auto-calibrate)")
        ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) {
      auto s = make_scenario(g, "sweep", "");
      return report_exit(hs::run_sweep(s).report, s.out_dir);
    }
    if (*calibrate) {
      auto s = make_scenario(g, "calibrate", "");
      const auto run = hs::run_calibration(s, tool);
      std::cout << "fitted " << run.samples.size() << " angles over [" << run.calibration.angle_lo_deg << ", "
                << run.calibration.angle_hi_deg << "] deg, rmse " << run.calibration.rmse << '\n'
                << "wrote " << (s.out_dir / "calibration.yaml").string() << '\n';
      return 0;
    }
    if (*step) {
      auto s = make_scenario(g, "step", calibration);
      return report_exit(hs::run_step(s).report, s.out_dir);
    }
    if (*toolcomp) {
      auto s = make_scenario(g, "toolcomp", calibration);
      return report_exit(hs::run_tool_compensation(s).report, s.out_dir);
    }
    if (*replay) {
      auto s = make_scenario(g, "replay", calibration);
      s.script = bs::control::load_knob_trace(knob);
      return report_exit(hs::replay_operator(s).report, s.out_dir);
    }
    if (*render) {
      auto cfg = g.config.empty() ? hs::default_config() : hs::load_config(g.config);
      if (noise >= 0.0) cfg.setup.scene.noise_amplitude = noise;
      if (jitter >= 0.0) cfg.setup.scene.jitter_px = jitter;
      const auto frame = bs::imaging::render_frame(angle, cfg.setup.scene, g.seed);
      bs::imaging::write_png(png, frame);
      try {
        const auto stats = bs::imaging::sense(frame, cfg.setup.sensing);
        std::cout << "P_A " << stats.inside_px << " P_B " << stats.outside_px << " P " << stats.ratio << '\n';
      } catch (const bs::ChannelLostError& e) {
        std::cout << e.what() << '\n';
      }
      return 0;
    }
    if (*srv) return serve(g, calibration, port, address, static_dir);
  } catch (const bs::control::PumpSaturationError& e) {
    std::cerr << "error: " << e.what() << " (" << e.trace().size() << " ticks recorded)\n";
    return kExitFail;
  } catch (const bs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
