#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "balloonscope/imaging/frame.hpp"

namespace balloonscope::imaging {

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Pixels kept by sensing. Either a half-open rectangle [x0, x1) x [y0, y1)
/// or a simple polygon tested at pixel centres (even-odd rule).
class RegionOfInterest {
 public:
  struct Rect {
    int x0, y0, x1, y1;
  };

  static RegionOfInterest rect(int x0, int y0, int x1, int y1);
  static RegionOfInterest polygon(std::vector<PixelPoint> vertices);
  /// Centred rectangle covering `fraction` of each frame dimension.
  static RegionOfInterest centered(double fraction = 0.8, int width = kFrameWidth, int height = kFrameHeight);

  bool contains(int x, int y) const;
  /// Throws ConfigError when the region is empty or leaves the frame.
  void validate(int width, int height) const;

  bool is_rect() const { return std::holds_alternative<Rect>(shape_); }
  const Rect* as_rect() const { return std::get_if<Rect>(&shape_); }
  const std::vector<PixelPoint>* as_polygon() const { return std::get_if<std::vector<PixelPoint>>(&shape_); }

 private:
  explicit RegionOfInterest(std::variant<Rect, std::vector<PixelPoint>> shape) : shape_(std::move(shape)) {}

  std::variant<Rect, std::vector<PixelPoint>> shape_;
};

/// HSV on the 8-bit convention: hue in [0, 180) half-degrees, saturation and
/// value in [0, 255]. Not rounded, so thresholds compare exactly.
struct Hsv {
  double hue = 0.0;
  double saturation = 0.0;
  double value = 0.0;
};

Hsv to_hsv(Rgb c);
/// round(0.299 R + 0.587 G + 0.114 B), ties up.
int grayscale(Rgb c);

struct ClassifierThresholds {
  double red_hue_low_max = 10.0;    // blood if hue <= this ...
  double red_hue_high_min = 160.0;  // ... or hue >= this
  double red_saturation_min = 15.0; // and saturation > this
  int dark_gray_max = 5;            // background if grayscale < this
};

struct PixelStats {
  std::size_t inside_px = 0;   // P_A
  std::size_t outside_px = 0;  // P_B
  std::size_t total_px = 0;
  double ratio = 0.0;          // P = P_A / P_total
};

struct SensingConfig {
  double brighten_factor = 3.5;
  ClassifierThresholds thresholds;
  RegionOfInterest roi = RegionOfInterest::centered();
  std::size_t min_component_px = 50;

  void validate() const;
};

/// v -> min(round(factor * v), 255) per channel, ties up.
Frame brighten(const Frame& frame, double factor = 3.5);

/// Zeroes blood-red pixels, near-black pixels, and pixels outside `roi`.
/// Everything else passes through unchanged.
Frame classify_pixels(const Frame& frame, const RegionOfInterest& roi, const ClassifierThresholds& thresholds = {});

bool is_blood(Rgb c, const ClassifierThresholds& thresholds = {});
bool is_dark(Rgb c, const ClassifierThresholds& thresholds = {});

/// Filled interior of the largest 8-connected non-black component. Enclosed
/// holes count as inside. Throws ChannelLostError when that component has
/// fewer than `min_component_px` pixels.
PixelMask extract_channel_region(const Frame& frame, std::size_t min_component_px = 50);

PixelStats pixel_ratio(const PixelMask& mask);

struct SensingStages {
  Frame brightened;
  Frame classified;
  PixelMask region;
  PixelStats stats;
};

/// brighten -> classify_pixels -> extract_channel_region -> pixel_ratio.
PixelStats sense(const Frame& frame, const SensingConfig& config);
SensingStages sense_stages(const Frame& frame, const SensingConfig& config);

}  // namespace balloonscope::imaging
