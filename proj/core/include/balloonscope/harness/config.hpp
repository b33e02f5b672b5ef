#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "balloonscope/control/executor.hpp"

namespace balloonscope::harness {

struct SweepSettings {
  double increment_ml = 0.2;
  double max_volume_ml = 4.0;
  /// Resolution of the dense decoupling scan behind the verdicts.
  double dense_resolution_ml = 0.01;
};

struct CalibrationSettings {
  double angle_step_deg = 5.0;
  double angle_max_deg = 100.0;
  int repeats = 3;
  int degree = 4;
};

struct StepSettings {
  double target_deg = 60.0;
  int repeats = 5;
  double duration_s = 10.0;
  double band_deg = 2.0;
  double initial_volume_ml = 0.0;
  /// Scene noise used for the repeats; calibration stays noise-free.
  double noise_amplitude = 1.0;
  double jitter_px = 0.25;
  double settle_limit_s = 6.0;
  double min_rate_deg_per_s = 10.0;
  double max_overshoot_deg = 2.0;
};

struct ToolCompSettings {
  double target_deg = 60.0;
  double insert_at_s = 8.0;
  double remove_at_s = 16.0;
  double duration_s = 24.0;
  double recover_within_s = 5.0;
  double band_deg = 2.0;
};

struct ReplaySettings {
  /// Simulated time after the last knob sample.
  double tail_s = 6.0;
  double band_deg = 2.0;
  double settle_limit_s = 6.0;
};

struct ServiceSettings {
  int port = 8080;
  double state_rate_hz = 15.0;
  double frame_rate_hz = 10.0;
  double command_rate_hz = 50.0;
  std::size_t state_queue_limit = 1024;
  std::string static_dir;
};

struct SimulationConfig {
  control::LoopSetup setup;
  SweepSettings sweep;
  CalibrationSettings calibration;
  StepSettings step;
  ToolCompSettings toolcomp;
  ReplaySettings replay;
  ServiceSettings service;
  /// File the config was read from, empty for built-in defaults.
  std::string source;

  /// Throws ConfigError naming the offending section.
  void validate() const;
};

/// Built-in defaults; identical to config/default.yaml.
SimulationConfig default_config();

/// Overlays a YAML document on the defaults. Every key is optional; unknown
/// keys and bad values raise ConfigError with the file and line.
SimulationConfig parse_config(std::string_view yaml, std::string_view source_name = "<config>");
SimulationConfig load_config(const std::filesystem::path& path);

}  // namespace balloonscope::harness
