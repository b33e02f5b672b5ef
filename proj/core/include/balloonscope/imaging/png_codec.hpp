#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "balloonscope/imaging/frame.hpp"

namespace balloonscope::imaging {

/// 8-bit RGB PNG, no interlace, default zlib level. Output is deterministic.
std::vector<std::uint8_t> encode_png(const Frame& frame);
/// Accepts any PNG libpng can read; converts to 8-bit RGB. Throws Error on corrupt input.
Frame decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const Frame& frame);
Frame read_png(const std::filesystem::path& path);

}  // namespace balloonscope::imaging
