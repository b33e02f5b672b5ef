#pragma once

#include <cstddef>
#include <cstdint>

#include "balloonscope/imaging/frame.hpp"
#include "balloonscope/plant/plant.hpp"

namespace balloonscope::imaging {

/// Where the working-channel cross-section lands in the image.
struct ChannelDisk {
  double center_x_px = 0.0;
  double center_y_px = 0.0;
  double radius_px = 0.0;
};

/// Synthetic intra-balloon camera view: blood-red field under a centred LED,
/// near-black vignette beyond the lens circle, and the working-channel tube
/// seen end-on. The tube wall is a pale non-red annulus; its open lumen shows
/// blood. Bending the tip brings more of the channel into view, so the disk
/// radius grows affinely with tip angle while its centre drifts slightly.
///
/// Colours are raw sensor values before the pipeline's brightening stage.
struct SceneModel {
  Rgb blood{70, 6, 12};
  Rgb channel_wall{40, 52, 58};
  Rgb vignette{0, 0, 0};
  double vignette_radius_px = 190.0;
  /// Fractional dimming of illuminated pixels at the vignette edge (quadratic falloff).
  double illumination_falloff = 0.45;

  double channel_center_x_px = 200.0;
  double channel_center_y_px = 200.0;
  double channel_shift_y_px_per_deg = -0.15;
  double channel_radius_px = 39.09;
  double channel_growth_px_per_deg = 0.7375;
  /// Lumen radius as a fraction of the outer tube radius (1 mm bore in a 2 mm tube).
  double lumen_fraction = 0.5;

  /// Standard deviation of additive per-channel noise on illuminated pixels, raw levels.
  double noise_amplitude = 0.0;
  /// Standard deviation of per-frame channel-centre jitter, pixels.
  double jitter_px = 0.0;

  ChannelDisk channel_disk(double alpha_deg) const;

  /// Pixel count of the noise-free rasterised channel disk, lumen included.
  std::size_t channel_area_px(double alpha_deg, int width = kFrameWidth, int height = kFrameHeight) const;

  /// Throws ConfigError unless the disk grows with angle and stays inside the
  /// lens circle over [0, 110] degrees.
  void validate() const;

  static constexpr double kMaxRenderAngleDeg = 110.0;
};

/// Deterministic for fixed (state, scene, seed). Only the loaded tip angle
/// of `state` affects the image.
Frame render_frame(const plant::PlantState& state, const SceneModel& scene, std::uint64_t seed);
Frame render_frame(double alpha_deg, const SceneModel& scene, std::uint64_t seed);

}  // namespace balloonscope::imaging
