#pragma once

#include <array>

namespace balloonscope::control {

/// Multi-threshold bang-bang map from pixel-ratio error to motor speed.
///
///   |dP| >  t3          -> s3 * sgn(dP)
///   t2 <= |dP| <= t3    -> s2 * sgn(dP)
///   t1 <= |dP| <  t2    -> s1 * sgn(dP)
///   |dP| <  t1          -> 0
///
/// Cases are tested top-down, so |dP| == t2 selects s2.
struct BangBangLaw {
  std::array<double, 3> thresholds{0.001, 0.002, 0.006};
  std::array<double, 3> speeds_rpm{5.0, 25.0, 100.0};

  /// Throws ConfigError unless both arrays are positive and strictly increasing.
  void validate() const;
  double rpm(double delta_p) const;
};

double bang_bang_rpm(double delta_p, const BangBangLaw& law = {});

}  // namespace balloonscope::control
