#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace balloonscope::imaging {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr int kFrameWidth = 400;
inline constexpr int kFrameHeight = 400;
inline constexpr std::size_t kFramePixels = static_cast<std::size_t>(kFrameWidth) * kFrameHeight;

/// 8-bit RGB image, row-major. Camera frames are 400x400; other sizes exist
/// for tests and tooling.
class Frame {
 public:
  Frame() : Frame(kFrameWidth, kFrameHeight) {}
  Frame(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }

  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }
  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }

  std::span<Rgb> pixels() { return pixels_; }
  std::span<const Rgb> pixels() const { return pixels_; }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

/// Binary image with the same layout as a Frame.
class PixelMask {
 public:
  PixelMask(int width, int height) : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }

  bool test(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool on = true) { bits_[index(x, y)] = on ? 1 : 0; }
  bool test(std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool on = true) { bits_[i] = on ? 1 : 0; }

  std::size_t count() const;

  friend bool operator==(const PixelMask&, const PixelMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

}  // namespace balloonscope::imaging
