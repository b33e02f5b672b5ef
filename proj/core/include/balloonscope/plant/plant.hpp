#pragma once

#include <optional>

#include "balloonscope/plant/geometry.hpp"
#include "balloonscope/plant/pump.hpp"
#include "balloonscope/plant/response_curve.hpp"

namespace balloonscope::plant {

/// Bending stiffness of a tool in the working channel straightens the tip.
/// The deficit grows linearly with free angle and equals `max_offset_deg`
/// at `reference_angle_deg`.
struct ToolModel {
  bool inserted = false;
  double max_offset_deg = 13.0;
  double reference_angle_deg = 100.0;

  void validate() const;
};

/// Loaded tip angle for a given free (tool-less) angle.
double apply_tool(double free_angle_deg, const ToolModel& tool);

struct TipPosition {
  double x_mm = 0.0;
  double y_mm = 0.0;
  double z_mm = 0.0;
};

/// Constant-curvature tip position of the steerable section bent by
/// `alpha_deg` and rolled by `roll_deg` about the balloon axis. z is along
/// the undeflected axis; the arc length is the steerable section length.
TipPosition tip_pose(double alpha_deg, double roll_deg, const BalloonGeometry& geometry);

/// Optional first-order settling of the free angle toward the quasi-static
/// curve value.
struct AngleLag {
  bool enabled = false;
  double tau_s = 0.2;
};

struct PlantModel {
  BalloonGeometry geometry;
  ResponseCurve curve = ResponseCurve::standard();
  PumpConstants pump;
  ToolModel tool;
  AngleLag lag;

  void validate() const;
};

struct PlantState {
  PumpState pump;
  double volume_ml = 0.0;
  double face_diameter_mm = 0.0;
  double free_angle_deg = 0.0;
  double angle_deg = 0.0;
  double roll_deg = 0.0;
  ToolModel tool;
  double time_s = 0.0;
};

/// Resting state at `volume_ml` (rounded to the nearest microstep) with the
/// model's tool settings, free angle settled.
PlantState initial_state(const PlantModel& model, double volume_ml = 0.0);

/// Returns `state` with the tool flag changed and the loaded angle updated.
PlantState with_tool(const PlantState& state, bool inserted);

/// One fixed step: pump, balloon response, tool load. Pure and deterministic.
PlantState plant_step(const PlantModel& model, const PlantState& state, double rpm, double dt_s);
PlantState plant_step(const PlantModel& model, const PlantState& state, double rpm, double dt_s,
                      const PumpLimits& limits);

}  // namespace balloonscope::plant
