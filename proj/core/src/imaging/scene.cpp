#include "balloonscope/imaging/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "balloonscope/errors.hpp"

namespace balloonscope::imaging {
namespace {

std::uint8_t clamp_level(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

Rgb shade(Rgb c, double gain) {
  return {clamp_level(c.r * gain), clamp_level(c.g * gain), clamp_level(c.b * gain)};
}

/// Gaussian noise rounded to whole levels, drawn four at a time from one
/// 64-bit engine output through a 2^16-entry inverse-CDF table. Pixel levels
/// are integers, so this matches rounding after adding continuous noise.
class LevelNoise {
 public:
  explicit LevelNoise(double sigma) : table_(1u << 16) {
    std::size_t filled = 0;
    const int reach = static_cast<int>(std::ceil(8.0 * sigma)) + 1;
    for (int k = -reach; k <= reach && filled < table_.size(); ++k) {
      const double upper = 0.5 * std::erfc(-(k + 0.5) / (sigma * std::sqrt(2.0)));
      const auto end = std::min(table_.size(), static_cast<std::size_t>(std::llround(upper * 65536.0)));
      for (; filled < end; ++filled) table_[filled] = static_cast<std::int8_t>(std::clamp(k, -127, 127));
    }
    for (; filled < table_.size(); ++filled) table_[filled] = static_cast<std::int8_t>(std::min(reach, 127));
  }

  int operator()(std::mt19937_64& rng) {
    if (left_ == 0) {
      bits_ = rng();
      left_ = 4;
    }
    const auto idx = static_cast<std::size_t>(bits_ & 0xffffu);
    bits_ >>= 16;
    --left_;
    return table_[idx];
  }

 private:
  std::vector<std::int8_t> table_;
  std::uint64_t bits_ = 0;
  int left_ = 0;
};

std::uint8_t add_level(std::uint8_t v, int d) { return static_cast<std::uint8_t>(std::clamp(v + d, 0, 255)); }

}  // namespace

ChannelDisk SceneModel::channel_disk(double alpha_deg) const {
  return {channel_center_x_px, channel_center_y_px + channel_shift_y_px_per_deg * alpha_deg,
          channel_radius_px + channel_growth_px_per_deg * alpha_deg};
}

std::size_t SceneModel::channel_area_px(double alpha_deg, int width, int height) const {
  const ChannelDisk disk = channel_disk(alpha_deg);
  const double r2 = disk.radius_px * disk.radius_px;
  std::size_t count = 0;
  for (int y = 0; y < height; ++y) {
    const double dy = y + 0.5 - disk.center_y_px;
    for (int x = 0; x < width; ++x) {
      const double dx = x + 0.5 - disk.center_x_px;
      if (dx * dx + dy * dy <= r2) ++count;
    }
  }
  return count;
}

void SceneModel::validate() const {
  if (!(vignette_radius_px > 0.0)) throw ConfigError("scene.vignette_radius_px must be > 0");
  if (!(channel_radius_px > 0.0)) throw ConfigError("scene.channel_radius_px must be > 0");
  if (!(channel_growth_px_per_deg > 0.0))
    throw ConfigError("scene.channel_growth_px_per_deg must be > 0 so the pixel ratio rises with angle");
  if (!(lumen_fraction >= 0.0 && lumen_fraction < 1.0)) throw ConfigError("scene.lumen_fraction must be in [0, 1)");
  if (!(illumination_falloff >= 0.0 && illumination_falloff < 1.0))
    throw ConfigError("scene.illumination_falloff must be in [0, 1)");
  if (!(noise_amplitude >= 0.0) || !(jitter_px >= 0.0)) throw ConfigError("scene noise terms must be >= 0");
  const double cx = kFrameWidth / 2.0;
  const double cy = kFrameHeight / 2.0;
  for (double a : {0.0, kMaxRenderAngleDeg}) {
    const ChannelDisk d = channel_disk(a);
    const double reach = std::hypot(d.center_x_px - cx, d.center_y_px - cy) + d.radius_px;
    if (reach > vignette_radius_px)
      throw ConfigError("scene: channel disk leaves the lens circle at " + std::to_string(a) + " deg");
  }
}

Frame render_frame(const plant::PlantState& state, const SceneModel& scene, std::uint64_t seed) {
  return render_frame(state.angle_deg, scene, seed);
}

Frame render_frame(double alpha_deg, const SceneModel& scene, std::uint64_t seed) {
  Frame frame(kFrameWidth, kFrameHeight, scene.vignette);
  std::mt19937_64 rng(seed);
  ChannelDisk disk = scene.channel_disk(alpha_deg);
  if (scene.jitter_px > 0.0) {
    boost::random::normal_distribution<double> jitter(0.0, scene.jitter_px);
    disk.center_x_px += jitter(rng);
    disk.center_y_px += jitter(rng);
  }
  const bool noisy = scene.noise_amplitude > 0.0;
  LevelNoise noise(noisy ? scene.noise_amplitude : 1.0);

  const double cx = frame.width() / 2.0;
  const double cy = frame.height() / 2.0;
  const double lens2 = scene.vignette_radius_px * scene.vignette_radius_px;
  const double outer2 = disk.radius_px * disk.radius_px;
  const double lumen = disk.radius_px * scene.lumen_fraction;
  const double lumen2 = lumen * lumen;

  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const double px = x + 0.5;
      const double py = y + 0.5;
      const double rho2 = (px - cx) * (px - cx) + (py - cy) * (py - cy);
      if (rho2 > lens2) continue;
      const double gain = 1.0 - scene.illumination_falloff * rho2 / lens2;
      const double d2 = (px - disk.center_x_px) * (px - disk.center_x_px) +
                        (py - disk.center_y_px) * (py - disk.center_y_px);
      const Rgb base = (d2 <= outer2 && d2 >= lumen2) ? scene.channel_wall : scene.blood;
      Rgb c = shade(base, gain);
      if (noisy) c = {add_level(c.r, noise(rng)), add_level(c.g, noise(rng)), add_level(c.b, noise(rng))};
      frame.at(x, y) = c;
    }
  }
  return frame;
}

}  // namespace balloonscope::imaging
