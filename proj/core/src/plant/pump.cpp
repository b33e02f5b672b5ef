#include "balloonscope/plant/pump.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "balloonscope/errors.hpp"

namespace balloonscope::plant {

std::int64_t PumpConstants::microsteps_per_rev() const {
  return std::llround(360.0 / step_angle_deg) * microsteps;
}

std::int64_t PumpConstants::capacity_microsteps() const { return microsteps_for(capacity_ml); }

std::int64_t PumpConstants::microsteps_for(double volume_ml) const {
  return std::llround(volume_ml / ml_per_rev * static_cast<double>(microsteps_per_rev()));
}

void PumpConstants::validate() const {
  if (!(step_angle_deg > 0.0)) throw ConfigError("pump.step_angle_deg must be > 0");
  if (microsteps <= 0) throw ConfigError("pump.microsteps must be > 0");
  if (!(ml_per_rev > 0.0)) throw ConfigError("pump.ml_per_rev must be > 0");
  if (!(max_rpm > 0.0)) throw ConfigError("pump.max_rpm must be > 0");
  if (!(capacity_ml > 0.0)) throw ConfigError("pump.capacity_ml must be > 0");
}

PumpState step_pump(const PumpState& state, const PumpConstants& pump, double rpm, double dt_s) {
  return step_pump(state, pump, rpm, dt_s, PumpLimits::full(pump));
}

PumpState step_pump(const PumpState& state, const PumpConstants& pump, double rpm, double dt_s,
                    const PumpLimits& limits) {
  if (!std::isfinite(rpm) || std::abs(rpm) > pump.max_rpm)
    throw ActuationError("motor speed " + std::to_string(rpm) + " rpm outside +/-" + std::to_string(pump.max_rpm));
  if (!(dt_s > 0.0)) throw ActuationError("pump step dt must be > 0");

  PumpState next = state;
  next.rpm = rpm;
  next.saturated = false;
  const double revs = rpm / 60.0 * dt_s;
  double pending = state.residue_microsteps + revs * static_cast<double>(pump.microsteps_per_rev());
  const std::int64_t whole = std::llround(pending);
  pending -= static_cast<double>(whole);

  std::int64_t target = state.microstep_count + whole;
  const std::int64_t lo = std::max<std::int64_t>(0, limits.min_microsteps);
  const std::int64_t hi = std::min(pump.capacity_microsteps(), limits.max_microsteps);
  if (target > hi && whole > 0) {
    target = std::max(hi, state.microstep_count);
    next.saturated = true;
    pending = 0.0;
  } else if (target < lo && whole < 0) {
    target = std::min(lo, state.microstep_count);
    next.saturated = true;
    pending = 0.0;
  }
  next.microstep_count = target;
  next.residue_microsteps = pending;
  return next;
}

}  // namespace balloonscope::plant
