#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "balloonscope/errors.hpp"
#include "balloonscope/imaging/png_codec.hpp"
#include "balloonscope/imaging/scene.hpp"
#include "balloonscope/imaging/sensing.hpp"

using namespace balloonscope;
using namespace balloonscope::imaging;

namespace {
const std::filesystem::path kData = BALLOONSCOPE_TEST_DATA;

std::vector<std::uint8_t> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}
}  // namespace

TEST(Png, RoundTripIsLossless) {
  SceneModel scene;
  scene.noise_amplitude = 2.0;
  const Frame f = render_frame(70.0, scene, 21);
  const auto bytes = encode_png(f);
  EXPECT_EQ(decode_png(bytes), f);
  EXPECT_EQ(encode_png(f), bytes);
}

TEST(Png, OddSizesSurvive) {
  Frame f(3, 7, {1, 2, 3});
  f.at(2, 6) = {255, 0, 128};
  EXPECT_EQ(decode_png(encode_png(f)), f);
}

TEST(Png, CorruptInputThrows) {
  std::vector<std::uint8_t> junk{0x89, 'P', 'N', 'G', 1, 2, 3};
  EXPECT_THROW(decode_png(junk), Error);
  auto bytes = encode_png(Frame(8, 8));
  bytes.resize(bytes.size() / 2);
  EXPECT_THROW(decode_png(bytes), Error);
}

TEST(Png, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "balloonscope_png_test.png";
  const Frame f = render_frame(10.0, SceneModel{}, 1);
  write_png(path, f);
  EXPECT_EQ(read_png(path), f);
  std::filesystem::remove(path);
  EXPECT_THROW(read_png(path), Error);
}

// Rendered with: balloonscope --seed 42 render --angle 37.5 --noise 1.0 --jitter 0.25
TEST(Png, GoldenFrameIsBitExact) {
  SceneModel scene;
  scene.noise_amplitude = 1.0;
  scene.jitter_px = 0.25;
  const Frame f = render_frame(37.5, scene, 42);
  const Frame golden = read_png(kData / "v1" / "frame_a37p5_seed42.png");
  EXPECT_EQ(f, golden);
  EXPECT_EQ(encode_png(f), slurp(kData / "v1" / "frame_a37p5_seed42.png"));
  const auto s = sense(golden, SensingConfig{});
  EXPECT_EQ(s.inside_px, 14006u);  // numpy/scipy pipeline on the same file
  EXPECT_EQ(s.outside_px, 145994u);
}
