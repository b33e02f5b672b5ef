#include "balloonscope/plant/geometry.hpp"

#include <array>
#include <string>
#include <utility>

#include "balloonscope/errors.hpp"

namespace balloonscope::plant {

void BalloonGeometry::validate() const {
  const std::array<std::pair<const char*, double>, 17> dims{{
      {"proximal_wall_mm", proximal_wall_mm},
      {"steer_top_wall_mm", steer_top_wall_mm},
      {"steer_bottom_wall_mm", steer_bottom_wall_mm},
      {"window_bottom_wall_mm", window_bottom_wall_mm},
      {"face_top_wall_mm", face_top_wall_mm},
      {"face_bottom_wall_mm", face_bottom_wall_mm},
      {"proximal_id_mm", proximal_id_mm},
      {"neck_id_mm", neck_id_mm},
      {"proximal_length_mm", proximal_length_mm},
      {"steer_length_mm", steer_length_mm},
      {"window_length_mm", window_length_mm},
      {"face_length_mm", face_length_mm},
      {"clip_spacing_mm", clip_spacing_mm},
      {"clip_to_face_mm", clip_to_face_mm},
      {"collapsed_od_mm", collapsed_od_mm},
      {"channel_id_mm", channel_id_mm},
      {"channel_wall_mm", channel_wall_mm},
  }};
  for (const auto& [name, value] : dims) {
    if (!(value > 0.0)) throw ConfigError(std::string("geometry.") + name + " must be > 0");
  }
  if (!(face_top_wall_mm < face_bottom_wall_mm))
    throw ConfigError("geometry: face_top_wall_mm must be thinner than face_bottom_wall_mm");
  if (!(steer_top_wall_mm < steer_bottom_wall_mm))
    throw ConfigError("geometry: steer_top_wall_mm must be thinner than steer_bottom_wall_mm");
  if (collapsed_od_mm > kMaxCollapsedOdMm)
    throw ConfigError("geometry: collapsed_od_mm exceeds the 5.0 mm sheath limit");
}

}  // namespace balloonscope::plant
