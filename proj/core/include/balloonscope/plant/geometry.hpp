#pragma once

namespace balloonscope::plant {

/// Dimensions of the tuned balloon, all in millimetres.
///
/// Wall thicknesses and section lengths are named by the balloon region they
/// describe. The steerable section bends toward its thicker (bottom) wall, and
/// the optical face expands first because its top wall is the thinnest.
struct BalloonGeometry {
  double proximal_wall_mm = 0.27;       // t1
  double steer_top_wall_mm = 0.80;      // t2
  double steer_bottom_wall_mm = 0.90;   // t3
  double window_bottom_wall_mm = 0.80;  // t4
  double face_top_wall_mm = 0.50;       // t5
  double face_bottom_wall_mm = 0.75;    // t6
  double proximal_id_mm = 4.09;         // d1
  double neck_id_mm = 1.75;             // d2
  double proximal_length_mm = 10.0;     // l1
  double steer_length_mm = 15.0;        // l2
  double window_length_mm = 7.50;       // l3
  double face_length_mm = 1.90;         // l4
  double clip_spacing_mm = 5.00;        // l5
  double clip_to_face_mm = 4.00;        // l6
  double collapsed_od_mm = 4.63;        // D1
  double channel_id_mm = 1.0;           // D3
  double channel_wall_mm = 0.5;

  /// Throws ConfigError when a dimension is non-positive or the wall ordering
  /// that produces face-first expansion is violated.
  void validate() const;

  /// Largest collapsed outer diameter that still passes a standard steerable sheath.
  static constexpr double kMaxCollapsedOdMm = 5.0;
  /// Smallest working-channel bore that admits the cutting tool.
  static constexpr double kMinChannelIdMm = 0.5;
};

}  // namespace balloonscope::plant
