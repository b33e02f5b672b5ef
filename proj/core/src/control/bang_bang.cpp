#include "balloonscope/control/bang_bang.hpp"

#include <cmath>

#include "balloonscope/errors.hpp"

namespace balloonscope::control {

void BangBangLaw::validate() const {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(thresholds[i] > 0.0) || !(speeds_rpm[i] > 0.0))
      throw ConfigError("control law thresholds and speeds must be > 0");
    if (i > 0 && (!(thresholds[i] > thresholds[i - 1]) || !(speeds_rpm[i] > speeds_rpm[i - 1])))
      throw ConfigError("control law thresholds and speeds must be strictly increasing");
  }
}

double BangBangLaw::rpm(double delta_p) const {
  const double mag = std::abs(delta_p);
  const double sign = delta_p > 0.0 ? 1.0 : -1.0;
  if (mag > thresholds[2]) return sign * speeds_rpm[2];
  if (mag >= thresholds[1]) return sign * speeds_rpm[1];
  if (mag >= thresholds[0]) return sign * speeds_rpm[0];
  return 0.0;
}

double bang_bang_rpm(double delta_p, const BangBangLaw& law) { return law.rpm(delta_p); }

}  // namespace balloonscope::control
