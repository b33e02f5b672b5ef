#pragma once

#include <span>
#include <vector>

namespace balloonscope::plant {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson
/// derivatives with the three-point end rule). Never overshoots the data:
/// between two knots the curve stays inside their value range.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::size_t segment(double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;
};

struct ResponseAnchor {
  double volume_ml;
  double face_diameter_mm;
  double free_angle_deg;
};

/// Quasi-static balloon response: optical-face diameter and unloaded bend
/// angle as functions of infused volume.
class ResponseCurve {
 public:
  struct Sample {
    double face_diameter_mm;
    double free_angle_deg;
  };

  /// Throws ConfigError unless volumes start at 0 and strictly increase, and
  /// both outputs are non-decreasing and non-negative.
  explicit ResponseCurve(std::vector<ResponseAnchor> anchors);

  /// Default anchor set: face fully deployed at 0.8 mL before any bending,
  /// 60 degrees at 2.4 mL and 100 degrees at 4.0 mL.
  static ResponseCurve standard();

  /// Throws OutOfRangeError outside [0, max_volume_ml()].
  Sample at(double volume_ml) const;

  double max_volume_ml() const { return anchors_.back().volume_ml; }

  /// Largest anchor volume at which the free angle is still zero.
  double face_deploy_volume_ml() const;

  /// Smallest volume whose free angle reaches `free_angle_deg`, by bisection
  /// on the monotone curve. Throws OutOfRangeError when unreachable.
  double volume_for_free_angle(double free_angle_deg, double tol_ml = 1e-12) const;

  std::span<const ResponseAnchor> anchors() const { return anchors_; }

 private:
  std::vector<ResponseAnchor> anchors_;
  MonotoneCubic diameter_;
  MonotoneCubic angle_;
};

/// Outcome of a dense 0..max volume scan of the decoupling requirements.
struct DecouplingReport {
  bool angle_implies_open_face = true;  // alpha > 0 => D2 >= 8 mm
  bool face_within_limits = true;       // 8 <= D2 <= 11 mm once deployed
  bool reaches_target_angle = true;     // alpha(max) >= 60 deg
  double min_face_while_bent_mm = 0.0;
  double max_face_mm = 0.0;
  double max_angle_deg = 0.0;

  bool pass() const { return angle_implies_open_face && face_within_limits && reaches_target_angle; }
};

inline constexpr double kMinDeployedFaceMm = 8.0;
inline constexpr double kMaxDeployedFaceMm = 11.0;
inline constexpr double kMinMaxAngleDeg = 60.0;

DecouplingReport check_decoupling(const ResponseCurve& curve, double resolution_ml = 0.01);

}  // namespace balloonscope::plant
