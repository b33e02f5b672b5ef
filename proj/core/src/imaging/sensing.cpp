#include "balloonscope/imaging/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "balloonscope/errors.hpp"

namespace balloonscope::imaging {

RegionOfInterest RegionOfInterest::rect(int x0, int y0, int x1, int y1) { return RegionOfInterest(Rect{x0, y0, x1, y1}); }

RegionOfInterest RegionOfInterest::polygon(std::vector<PixelPoint> vertices) {
  return RegionOfInterest(std::move(vertices));
}

RegionOfInterest RegionOfInterest::centered(double fraction, int width, int height) {
  const int mx = static_cast<int>(std::lround(width * (1.0 - fraction) / 2.0));
  const int my = static_cast<int>(std::lround(height * (1.0 - fraction) / 2.0));
  return rect(mx, my, width - mx, height - my);
}

bool RegionOfInterest::contains(int x, int y) const {
  if (const Rect* r = as_rect()) return x >= r->x0 && x < r->x1 && y >= r->y0 && y < r->y1;
  const auto& poly = *as_polygon();
  const double px = x + 0.5;
  const double py = y + 0.5;
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const PixelPoint& a = poly[i];
    const PixelPoint& b = poly[j];
    if ((a.y > py) != (b.y > py) && px < (b.x - a.x) * (py - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

void RegionOfInterest::validate(int width, int height) const {
  if (const Rect* r = as_rect()) {
    if (r->x0 >= r->x1 || r->y0 >= r->y1) throw ConfigError("roi rectangle is empty");
    if (r->x0 < 0 || r->y0 < 0 || r->x1 > width || r->y1 > height) throw ConfigError("roi rectangle leaves the frame");
    return;
  }
  const auto& poly = *as_polygon();
  if (poly.size() < 3) throw ConfigError("roi polygon needs at least 3 vertices");
  for (const auto& p : poly) {
    if (p.x < 0 || p.y < 0 || p.x > width || p.y > height) throw ConfigError("roi polygon vertex leaves the frame");
  }
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (contains(x, y)) return;
  throw ConfigError("roi polygon contains no pixel centres");
}

void SensingConfig::validate() const {
  if (!(brighten_factor > 0.0)) throw ConfigError("sensing.brighten_factor must be > 0");
  roi.validate(kFrameWidth, kFrameHeight);
}

Hsv to_hsv(Rgb c) {
  const int mx = std::max({c.r, c.g, c.b});
  const int mn = std::min({c.r, c.g, c.b});
  const int d = mx - mn;
  Hsv out;
  out.value = mx;
  out.saturation = mx == 0 ? 0.0 : 255.0 * d / mx;
  if (d == 0) return out;
  double h = 0.0;
  if (mx == c.r) {
    h = 60.0 * (c.g - c.b) / d;
  } else if (mx == c.g) {
    h = 120.0 + 60.0 * (c.b - c.r) / d;
  } else {
    h = 240.0 + 60.0 * (c.r - c.g) / d;
  }
  if (h < 0.0) h += 360.0;
  out.hue = h / 2.0;
  return out;
}

int grayscale(Rgb c) { return (299 * c.r + 587 * c.g + 114 * c.b + 500) / 1000; }

Frame brighten(const Frame& frame, double factor) {
  if (!(factor > 0.0)) throw Error("brighten factor must be > 0");
  std::uint8_t lut[256];
  for (int v = 0; v < 256; ++v) {
    lut[v] = static_cast<std::uint8_t>(std::min<long>(std::lround(factor * v), 255));
  }
  Frame out = frame;
  for (Rgb& p : out.pixels()) p = {lut[p.r], lut[p.g], lut[p.b]};
  return out;
}

bool is_blood(Rgb c, const ClassifierThresholds& t) {
  const Hsv hsv = to_hsv(c);
  return (hsv.hue <= t.red_hue_low_max || hsv.hue >= t.red_hue_high_min) && hsv.saturation > t.red_saturation_min;
}

bool is_dark(Rgb c, const ClassifierThresholds& t) { return grayscale(c) < t.dark_gray_max; }

Frame classify_pixels(const Frame& frame, const RegionOfInterest& roi, const ClassifierThresholds& thresholds) {
  Frame out = frame;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      Rgb& p = out.at(x, y);
      if (!roi.contains(x, y) || is_dark(p, thresholds) || is_blood(p, thresholds)) p = {};
    }
  }
  return out;
}

PixelMask extract_channel_region(const Frame& frame, std::size_t min_component_px) {
  const int w = frame.width();
  const int h = frame.height();
  const std::size_t n = frame.size();
  const auto pixels = frame.pixels();

  // 8-connected labelling of non-black pixels.
  std::vector<std::int32_t> label(n, -1);
  std::vector<std::size_t> queue;
  queue.reserve(n);
  std::int32_t best_label = -1;
  std::size_t best_size = 0;
  std::int32_t next_label = 0;
  for (std::size_t seed = 0; seed < n; ++seed) {
    const Rgb s = pixels[seed];
    if (label[seed] >= 0 || (s.r | s.g | s.b) == 0) continue;
    const std::int32_t id = next_label++;
    queue.clear();
    queue.push_back(seed);
    label[seed] = id;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int x = static_cast<int>(queue[head] % static_cast<std::size_t>(w));
      const int y = static_cast<int>(queue[head] / static_cast<std::size_t>(w));
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t k = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) + static_cast<std::size_t>(nx);
          const Rgb q = pixels[k];
          if (label[k] >= 0 || (q.r | q.g | q.b) == 0) continue;
          label[k] = id;
          queue.push_back(k);
        }
      }
    }
    if (queue.size() > best_size) {
      best_size = queue.size();
      best_label = id;
    }
  }
  if (best_size < min_component_px || best_label < 0) throw ChannelLostError(best_size, min_component_px);

  // Fill holes: anything not reachable from the border through non-component
  // pixels (4-connected, the dual of 8-connected foreground) is inside.
  std::vector<std::uint8_t> outside(n, 0);
  queue.clear();
  auto push_outside = [&](int x, int y) {
    const std::size_t k = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
    if (outside[k] || label[k] == best_label) return;
    outside[k] = 1;
    queue.push_back(k);
  };
  for (int x = 0; x < w; ++x) {
    push_outside(x, 0);
    push_outside(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    push_outside(0, y);
    push_outside(w - 1, y);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int x = static_cast<int>(queue[head] % static_cast<std::size_t>(w));
    const int y = static_cast<int>(queue[head] / static_cast<std::size_t>(w));
    if (x > 0) push_outside(x - 1, y);
    if (x + 1 < w) push_outside(x + 1, y);
    if (y > 0) push_outside(x, y - 1);
    if (y + 1 < h) push_outside(x, y + 1);
  }

  PixelMask mask(w, h);
  for (std::size_t k = 0; k < n; ++k) mask.set(k, outside[k] == 0);
  return mask;
}

PixelStats pixel_ratio(const PixelMask& mask) {
  PixelStats s;
  s.total_px = mask.size();
  s.inside_px = mask.count();
  s.outside_px = s.total_px - s.inside_px;
  s.ratio = static_cast<double>(s.inside_px) / static_cast<double>(s.total_px);
  return s;
}

SensingStages sense_stages(const Frame& frame, const SensingConfig& config) {
  Frame brightened = brighten(frame, config.brighten_factor);
  Frame classified = classify_pixels(brightened, config.roi, config.thresholds);
  PixelMask region = extract_channel_region(classified, config.min_component_px);
  PixelStats stats = pixel_ratio(region);
  return {std::move(brightened), std::move(classified), std::move(region), stats};
}

PixelStats sense(const Frame& frame, const SensingConfig& config) { return sense_stages(frame, config).stats; }

}  // namespace balloonscope::imaging
