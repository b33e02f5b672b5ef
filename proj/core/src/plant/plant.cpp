#include "balloonscope/plant/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "balloonscope/errors.hpp"

namespace balloonscope::plant {

void ToolModel::validate() const {
  if (!(max_offset_deg >= 0.0)) throw ConfigError("tool.max_offset_deg must be >= 0");
  if (!(reference_angle_deg > 0.0)) throw ConfigError("tool.reference_angle_deg must be > 0");
}

double apply_tool(double free_angle_deg, const ToolModel& tool) {
  if (!tool.inserted) return free_angle_deg;
  const double fraction = std::min(1.0, std::max(0.0, free_angle_deg) / tool.reference_angle_deg);
  return std::max(0.0, free_angle_deg - tool.max_offset_deg * fraction);
}

TipPosition tip_pose(double alpha_deg, double roll_deg, const BalloonGeometry& geometry) {
  const double length = geometry.steer_length_mm;
  const double alpha = alpha_deg * std::numbers::pi / 180.0;
  const double roll = roll_deg * std::numbers::pi / 180.0;
  double radial = 0.0;
  double axial = length;
  if (std::abs(alpha) < 1e-9) {
    radial = 0.5 * length * alpha;
  } else {
    const double radius = length / alpha;
    radial = radius * (1.0 - std::cos(alpha));
    axial = radius * std::sin(alpha);
  }
  return {radial * std::cos(roll), radial * std::sin(roll), axial};
}

void PlantModel::validate() const {
  geometry.validate();
  pump.validate();
  tool.validate();
  if (lag.enabled && !(lag.tau_s > 0.0)) throw ConfigError("plant.lag.tau_s must be > 0");
  if (pump.capacity_ml > curve.max_volume_ml() + 1e-12)
    throw ConfigError("pump.capacity_ml exceeds the response curve span");
}

PlantState initial_state(const PlantModel& model, double volume_ml) {
  PlantState s;
  s.tool = model.tool;
  s.pump.microstep_count = model.pump.microsteps_for(volume_ml);
  s.volume_ml = s.pump.volume_ml(model.pump);
  const auto r = model.curve.at(s.volume_ml);
  s.face_diameter_mm = r.face_diameter_mm;
  s.free_angle_deg = r.free_angle_deg;
  s.angle_deg = apply_tool(s.free_angle_deg, s.tool);
  return s;
}

PlantState with_tool(const PlantState& state, bool inserted) {
  PlantState next = state;
  next.tool.inserted = inserted;
  next.angle_deg = apply_tool(next.free_angle_deg, next.tool);
  return next;
}

PlantState plant_step(const PlantModel& model, const PlantState& state, double rpm, double dt_s) {
  return plant_step(model, state, rpm, dt_s, PumpLimits::full(model.pump));
}

PlantState plant_step(const PlantModel& model, const PlantState& state, double rpm, double dt_s,
                      const PumpLimits& limits) {
  PlantState next = state;
  next.pump = step_pump(state.pump, model.pump, rpm, dt_s, limits);
  next.volume_ml = next.pump.volume_ml(model.pump);
  const auto r = model.curve.at(next.volume_ml);
  next.face_diameter_mm = r.face_diameter_mm;
  if (model.lag.enabled) {
    const double blend = 1.0 - std::exp(-dt_s / model.lag.tau_s);
    next.free_angle_deg = state.free_angle_deg + (r.free_angle_deg - state.free_angle_deg) * blend;
  } else {
    next.free_angle_deg = r.free_angle_deg;
  }
  next.angle_deg = apply_tool(next.free_angle_deg, next.tool);
  next.time_s = state.time_s + dt_s;
  return next;
}

}  // namespace balloonscope::plant
