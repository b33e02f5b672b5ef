#include "balloonscope/imaging/frame.hpp"

#include <algorithm>

#include "balloonscope/errors.hpp"

namespace balloonscope::imaging {

Frame::Frame(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw Error("frame dimensions must be positive");
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

std::size_t PixelMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

}  // namespace balloonscope::imaging
