#pragma once

#include <cstdint>

namespace balloonscope::plant {

/// Microstepped syringe-pump drive train.
///
/// One shaft revolution is `360 / step_angle_deg * microsteps` microsteps and
/// displaces `ml_per_rev` of saline, so the defaults give 6400 microsteps per
/// revolution and 62.5 nL per microstep. Flow is ml_per_rev * rpm / 60, which
/// is 3.0 mL/s at the 450 rpm ceiling.
struct PumpConstants {
  double step_angle_deg = 1.8;
  int microsteps = 32;
  double ml_per_rev = 0.4;
  double max_rpm = 450.0;
  double capacity_ml = 4.0;

  std::int64_t microsteps_per_rev() const;
  double quantum_ml() const { return ml_per_rev / static_cast<double>(microsteps_per_rev()); }
  double flow_ml_per_s(double rpm) const { return rpm * ml_per_rev / 60.0; }
  double volume_of(std::int64_t microstep_count) const {
    return static_cast<double>(microstep_count) * ml_per_rev / static_cast<double>(microsteps_per_rev());
  }
  std::int64_t capacity_microsteps() const;
  /// Microstep count closest to `volume_ml`.
  std::int64_t microsteps_for(double volume_ml) const;

  void validate() const;
};

struct PumpState {
  std::int64_t microstep_count = 0;
  /// Uncommitted fraction of a microstep carried into the next step.
  double residue_microsteps = 0.0;
  double rpm = 0.0;
  /// Set when the last step was clipped by a volume bound.
  bool saturated = false;

  double volume_ml(const PumpConstants& pump) const { return pump.volume_of(microstep_count); }
};

/// Inclusive microstep window a step may move within.
struct PumpLimits {
  std::int64_t min_microsteps = 0;
  std::int64_t max_microsteps = 0;

  static PumpLimits full(const PumpConstants& pump) { return {0, pump.capacity_microsteps()}; }
};

/// Advances the pump by `dt_s` at `rpm`. Whole microsteps are committed and
/// the fractional remainder carries over, so long runs do not drift. Throws
/// ActuationError when |rpm| exceeds the motor range or dt_s <= 0.
PumpState step_pump(const PumpState& state, const PumpConstants& pump, double rpm, double dt_s);
PumpState step_pump(const PumpState& state, const PumpConstants& pump, double rpm, double dt_s,
                    const PumpLimits& limits);

}  // namespace balloonscope::plant
