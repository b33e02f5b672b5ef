#include "balloonscope/harness/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>

#include "balloonscope/errors.hpp"

namespace balloonscope::harness {
namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

/// A mapping node plus enough context to report errors at a file and line.
class Section {
 public:
  Section(YAML::Node node, const std::string& file, std::string path)
      : node_(std::move(node)), file_(file), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(node_, "expected a mapping");
  }

  explicit operator bool() const { return node_ && node_.IsMap(); }

  void allow(std::initializer_list<std::string_view> keys) const {
    if (!*this) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      bool known = false;
      for (auto k : keys) known = known || (k == key);
      if (!known) fail(kv.first, "unknown key '" + key + "'");
    }
  }

  template <class T>
  void read(const char* key, T& out) const {
    if (!*this) return;
    const YAML::Node n = node_[key];
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, std::string("bad value for '") + key + "'");
    }
  }

  void read_rgb(const char* key, imaging::Rgb& out) const {
    if (!*this || !node_[key]) return;
    const YAML::Node n = node_[key];
    std::vector<int> v;
    try {
      v = n.as<std::vector<int>>();
    } catch (const YAML::Exception&) {
      fail(n, std::string("'") + key + "' must be [r, g, b]");
    }
    if (v.size() != 3) fail(n, std::string("'") + key + "' must have three components");
    for (int c : v)
      if (c < 0 || c > 255) fail(n, std::string("'") + key + "' components must be in [0, 255]");
    out = {static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]), static_cast<std::uint8_t>(v[2])};
  }

  void read_triple(const char* key, std::array<double, 3>& out) const {
    if (!*this || !node_[key]) return;
    const YAML::Node n = node_[key];
    std::vector<double> v;
    try {
      v = n.as<std::vector<double>>();
    } catch (const YAML::Exception&) {
      fail(n, std::string("'") + key + "' must be a list of three numbers");
    }
    if (v.size() != 3) fail(n, std::string("'") + key + "' must have three entries");
    out = {v[0], v[1], v[2]};
  }

  Section child(const char* key) const {
    return Section(*this ? node_[key] : YAML::Node(), file_, path_.empty() ? key : path_ + "." + key);
  }

  const YAML::Node& node() const { return node_; }
  int line() const { return line_of(node_); }

  /// Runs a validator, re-raising its ConfigError at this section's line.
  void check(const std::function<void()>& validator) const {
    try {
      validator();
    } catch (const ConfigError& e) {
      if (e.line() > 0) throw;
      throw ConfigError(file_, line(), e.what());
    }
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    throw ConfigError(file_, line_of(at), (path_.empty() ? "" : path_ + ": ") + msg);
  }

 private:
  YAML::Node node_;
  std::string file_;
  std::string path_;
};

void read_plant(const Section& s, plant::PlantModel& plant) {
  s.allow({"geometry", "response_curve", "pump", "tool", "lag"});

  const Section g = s.child("geometry");
  auto& geo = plant.geometry;
  g.allow({"proximal_wall_mm", "steer_top_wall_mm", "steer_bottom_wall_mm", "window_bottom_wall_mm",
           "face_top_wall_mm", "face_bottom_wall_mm", "proximal_id_mm", "neck_id_mm", "proximal_length_mm",
           "steer_length_mm", "window_length_mm", "face_length_mm", "clip_spacing_mm", "clip_to_face_mm",
           "collapsed_od_mm", "channel_id_mm", "channel_wall_mm"});
  g.read("proximal_wall_mm", geo.proximal_wall_mm);
  g.read("steer_top_wall_mm", geo.steer_top_wall_mm);
  g.read("steer_bottom_wall_mm", geo.steer_bottom_wall_mm);
  g.read("window_bottom_wall_mm", geo.window_bottom_wall_mm);
  g.read("face_top_wall_mm", geo.face_top_wall_mm);
  g.read("face_bottom_wall_mm", geo.face_bottom_wall_mm);
  g.read("proximal_id_mm", geo.proximal_id_mm);
  g.read("neck_id_mm", geo.neck_id_mm);
  g.read("proximal_length_mm", geo.proximal_length_mm);
  g.read("steer_length_mm", geo.steer_length_mm);
  g.read("window_length_mm", geo.window_length_mm);
  g.read("face_length_mm", geo.face_length_mm);
  g.read("clip_spacing_mm", geo.clip_spacing_mm);
  g.read("clip_to_face_mm", geo.clip_to_face_mm);
  g.read("collapsed_od_mm", geo.collapsed_od_mm);
  g.read("channel_id_mm", geo.channel_id_mm);
  g.read("channel_wall_mm", geo.channel_wall_mm);
  g.check([&] { geo.validate(); });

  const Section rc = s.child("response_curve");
  rc.allow({"anchors"});
  if (rc && rc.node()["anchors"]) {
    const YAML::Node list = rc.node()["anchors"];
    if (!list.IsSequence()) rc.fail(list, "anchors must be a list");
    std::vector<plant::ResponseAnchor> anchors;
    for (const auto& item : list) {
      const Section a(item, "", "");
      plant::ResponseAnchor anchor{};
      try {
        anchor.volume_ml = item["volume_ml"].as<double>();
        anchor.face_diameter_mm = item["face_diameter_mm"].as<double>();
        anchor.free_angle_deg = item["free_angle_deg"].as<double>();
      } catch (const YAML::Exception&) {
        rc.fail(item, "anchor needs numeric volume_ml, face_diameter_mm, free_angle_deg");
      }
      anchors.push_back(anchor);
    }
    try {
      plant.curve = plant::ResponseCurve(std::move(anchors));
    } catch (const ConfigError& e) {
      rc.fail(list, e.what());
    }
  }

  const Section p = s.child("pump");
  p.allow({"step_angle_deg", "microsteps", "ml_per_rev", "max_rpm", "capacity_ml"});
  p.read("step_angle_deg", plant.pump.step_angle_deg);
  p.read("microsteps", plant.pump.microsteps);
  p.read("ml_per_rev", plant.pump.ml_per_rev);
  p.read("max_rpm", plant.pump.max_rpm);
  p.read("capacity_ml", plant.pump.capacity_ml);
  p.check([&] { plant.pump.validate(); });

  const Section t = s.child("tool");
  t.allow({"inserted", "max_offset_deg", "reference_angle_deg"});
  t.read("inserted", plant.tool.inserted);
  t.read("max_offset_deg", plant.tool.max_offset_deg);
  t.read("reference_angle_deg", plant.tool.reference_angle_deg);
  t.check([&] { plant.tool.validate(); });

  const Section l = s.child("lag");
  l.allow({"enabled", "tau_s"});
  l.read("enabled", plant.lag.enabled);
  l.read("tau_s", plant.lag.tau_s);

  s.check([&] { plant.validate(); });
}

void read_scene(const Section& s, imaging::SceneModel& scene) {
  s.allow({"blood_rgb", "channel_wall_rgb", "vignette_rgb", "vignette_radius_px", "illumination_falloff",
           "channel_center_x_px", "channel_center_y_px", "channel_shift_y_px_per_deg", "channel_radius_px",
           "channel_growth_px_per_deg", "lumen_fraction", "noise_amplitude", "jitter_px"});
  s.read_rgb("blood_rgb", scene.blood);
  s.read_rgb("channel_wall_rgb", scene.channel_wall);
  s.read_rgb("vignette_rgb", scene.vignette);
  s.read("vignette_radius_px", scene.vignette_radius_px);
  s.read("illumination_falloff", scene.illumination_falloff);
  s.read("channel_center_x_px", scene.channel_center_x_px);
  s.read("channel_center_y_px", scene.channel_center_y_px);
  s.read("channel_shift_y_px_per_deg", scene.channel_shift_y_px_per_deg);
  s.read("channel_radius_px", scene.channel_radius_px);
  s.read("channel_growth_px_per_deg", scene.channel_growth_px_per_deg);
  s.read("lumen_fraction", scene.lumen_fraction);
  s.read("noise_amplitude", scene.noise_amplitude);
  s.read("jitter_px", scene.jitter_px);
  s.check([&] { scene.validate(); });
}

void read_sensing(const Section& s, imaging::SensingConfig& sensing) {
  s.allow({"brighten_factor", "red_hue_low_max", "red_hue_high_min", "red_saturation_min", "dark_gray_max",
           "min_component_px", "roi"});
  s.read("brighten_factor", sensing.brighten_factor);
  s.read("red_hue_low_max", sensing.thresholds.red_hue_low_max);
  s.read("red_hue_high_min", sensing.thresholds.red_hue_high_min);
  s.read("red_saturation_min", sensing.thresholds.red_saturation_min);
  s.read("dark_gray_max", sensing.thresholds.dark_gray_max);
  s.read("min_component_px", sensing.min_component_px);

  const Section roi = s.child("roi");
  if (roi) {
    roi.allow({"x0", "y0", "x1", "y1", "polygon"});
    if (roi.node()["polygon"]) {
      std::vector<imaging::PixelPoint> pts;
      const YAML::Node list = roi.node()["polygon"];
      if (!list.IsSequence()) roi.fail(list, "polygon must be a list of [x, y]");
      for (const auto& item : list) {
        std::vector<double> xy;
        try {
          xy = item.as<std::vector<double>>();
        } catch (const YAML::Exception&) {
          roi.fail(item, "polygon vertex must be [x, y]");
        }
        if (xy.size() != 2) roi.fail(item, "polygon vertex must be [x, y]");
        pts.push_back({xy[0], xy[1]});
      }
      sensing.roi = imaging::RegionOfInterest::polygon(std::move(pts));
    } else {
      const auto* cur = sensing.roi.as_rect();
      imaging::RegionOfInterest::Rect r = cur ? *cur : imaging::RegionOfInterest::Rect{40, 40, 360, 360};
      roi.read("x0", r.x0);
      roi.read("y0", r.y0);
      roi.read("x1", r.x1);
      roi.read("y1", r.y1);
      sensing.roi = imaging::RegionOfInterest::rect(r.x0, r.y0, r.x1, r.y1);
    }
  }
  s.check([&] { sensing.validate(); });
}

void read_loop(const Section& s, control::LoopConfig& loop) {
  s.allow({"camera_rate_hz", "plant_dt_s", "thresholds_ratio", "speeds_rpm", "inflate_rpm", "latency_ticks"});
  s.read("camera_rate_hz", loop.camera_rate_hz);
  s.read("plant_dt_s", loop.plant_dt_s);
  s.read_triple("thresholds_ratio", loop.law.thresholds);
  s.read_triple("speeds_rpm", loop.law.speeds_rpm);
  s.read("inflate_rpm", loop.inflate_rpm);
  s.read("latency_ticks", loop.latency_ticks);
  s.check([&] { loop.validate(); });
}

void read_experiments(const Section& s, SimulationConfig& cfg) {
  s.allow({"sweep", "calibration", "step", "toolcomp", "replay"});
  const Section sw = s.child("sweep");
  sw.allow({"increment_ml", "max_volume_ml", "dense_resolution_ml"});
  sw.read("increment_ml", cfg.sweep.increment_ml);
  sw.read("max_volume_ml", cfg.sweep.max_volume_ml);
  sw.read("dense_resolution_ml", cfg.sweep.dense_resolution_ml);
  sw.check([&] {
    if (!(cfg.sweep.increment_ml > 0.0)) throw ConfigError("sweep.increment_ml must be > 0");
    if (!(cfg.sweep.max_volume_ml > 0.0)) throw ConfigError("sweep.max_volume_ml must be > 0");
    if (!(cfg.sweep.dense_resolution_ml > 0.0)) throw ConfigError("sweep.dense_resolution_ml must be > 0");
  });

  const Section c = s.child("calibration");
  c.allow({"angle_step_deg", "angle_max_deg", "repeats", "degree"});
  c.read("angle_step_deg", cfg.calibration.angle_step_deg);
  c.read("angle_max_deg", cfg.calibration.angle_max_deg);
  c.read("repeats", cfg.calibration.repeats);
  c.read("degree", cfg.calibration.degree);

  const Section st = s.child("step");
  st.allow({"target_deg", "repeats", "duration_s", "band_deg", "initial_volume_ml", "noise_amplitude", "jitter_px",
            "settle_limit_s", "min_rate_deg_per_s", "max_overshoot_deg"});
  st.read("target_deg", cfg.step.target_deg);
  st.read("repeats", cfg.step.repeats);
  st.read("duration_s", cfg.step.duration_s);
  st.read("band_deg", cfg.step.band_deg);
  st.read("initial_volume_ml", cfg.step.initial_volume_ml);
  st.read("noise_amplitude", cfg.step.noise_amplitude);
  st.read("jitter_px", cfg.step.jitter_px);
  st.read("settle_limit_s", cfg.step.settle_limit_s);
  st.read("min_rate_deg_per_s", cfg.step.min_rate_deg_per_s);
  st.read("max_overshoot_deg", cfg.step.max_overshoot_deg);

  const Section tc = s.child("toolcomp");
  tc.allow({"target_deg", "insert_at_s", "remove_at_s", "duration_s", "recover_within_s", "band_deg"});
  tc.read("target_deg", cfg.toolcomp.target_deg);
  tc.read("insert_at_s", cfg.toolcomp.insert_at_s);
  tc.read("remove_at_s", cfg.toolcomp.remove_at_s);
  tc.read("duration_s", cfg.toolcomp.duration_s);
  tc.read("recover_within_s", cfg.toolcomp.recover_within_s);
  tc.read("band_deg", cfg.toolcomp.band_deg);

  const Section rp = s.child("replay");
  rp.allow({"tail_s", "band_deg", "settle_limit_s"});
  rp.read("tail_s", cfg.replay.tail_s);
  rp.read("band_deg", cfg.replay.band_deg);
  rp.read("settle_limit_s", cfg.replay.settle_limit_s);
}

void read_service(const Section& s, ServiceSettings& svc) {
  s.allow({"port", "state_rate_hz", "frame_rate_hz", "command_rate_hz", "state_queue_limit", "static_dir"});
  s.read("port", svc.port);
  s.read("state_rate_hz", svc.state_rate_hz);
  s.read("frame_rate_hz", svc.frame_rate_hz);
  s.read("command_rate_hz", svc.command_rate_hz);
  s.read("state_queue_limit", svc.state_queue_limit);
  s.read("static_dir", svc.static_dir);
}

}  // namespace

void SimulationConfig::validate() const {
  setup.plant.validate();
  setup.scene.validate();
  setup.sensing.validate();
  setup.loop.validate();
  if (setup.loop.inflate_rpm > setup.plant.pump.max_rpm) throw ConfigError("loop.inflate_rpm exceeds pump.max_rpm");
  if (setup.loop.law.speeds_rpm[2] > setup.plant.pump.max_rpm)
    throw ConfigError("loop.speeds_rpm exceeds pump.max_rpm");
  if (!(sweep.increment_ml > 0.0)) throw ConfigError("sweep.increment_ml must be > 0");
  if (!(sweep.max_volume_ml > 0.0) || sweep.max_volume_ml > setup.plant.curve.max_volume_ml() + 1e-12)
    throw ConfigError("sweep.max_volume_ml must be in (0, response curve span]");
  if (calibration.repeats < 1) throw ConfigError("calibration.repeats must be >= 1");
  if (!(calibration.angle_step_deg > 0.0)) throw ConfigError("calibration.angle_step_deg must be > 0");
  if (calibration.degree < 1) throw ConfigError("calibration.degree must be >= 1");
  if (step.repeats < 1) throw ConfigError("step.repeats must be >= 1");
  if (!(step.duration_s > 0.0)) throw ConfigError("step.duration_s must be > 0");
  if (!(step.band_deg > 0.0)) throw ConfigError("step.band_deg must be > 0");
  if (!(toolcomp.insert_at_s < toolcomp.remove_at_s && toolcomp.remove_at_s < toolcomp.duration_s))
    throw ConfigError("toolcomp: need insert_at_s < remove_at_s < duration_s");
  if (service.port < 0 || service.port > 65535) throw ConfigError("service.port out of range");
  if (!(service.state_rate_hz > 0.0) || !(service.frame_rate_hz > 0.0) || !(service.command_rate_hz > 0.0))
    throw ConfigError("service rates must be > 0");
}

SimulationConfig default_config() {
  SimulationConfig cfg;
  cfg.validate();
  return cfg;
}

SimulationConfig parse_config(std::string_view yaml, std::string_view source_name) {
  const std::string file(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    throw ConfigError(file, e.mark.line + 1, e.msg);
  }
  SimulationConfig cfg = default_config();
  cfg.source = file;
  const Section top(root, file, "");
  top.allow({"plant", "scene", "sensing", "loop", "experiments", "service"});
  read_plant(top.child("plant"), cfg.setup.plant);
  read_scene(top.child("scene"), cfg.setup.scene);
  read_sensing(top.child("sensing"), cfg.setup.sensing);
  read_loop(top.child("loop"), cfg.setup.loop);
  read_experiments(top.child("experiments"), cfg);
  read_service(top.child("service"), cfg.service);
  top.check([&] { cfg.validate(); });
  return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

}  // namespace balloonscope::harness
