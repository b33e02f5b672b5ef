#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace balloonscope::estimation {

struct CalibrationSample {
  double angle_deg = 0.0;
  double ratio = 0.0;
};

/// Polynomial map from tip angle (degrees) to pixel ratio, P = f(alpha),
/// with the angle bracket it was fitted on.
struct Calibration {
  std::vector<double> coefficients;  // c0 + c1 a + c2 a^2 + ... (a in degrees)
  double angle_lo_deg = 0.0;
  double angle_hi_deg = 0.0;
  double rmse = 0.0;
  std::size_t sample_count = 0;
  /// f strictly increasing over the bracket at 0.1 degree resolution.
  bool monotone = false;
  std::string created;  // free-form provenance, e.g. "auto-calibrate seed=7"

  double ratio_at(double angle_deg) const;
  double slope_at(double angle_deg) const;
  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  bool usable_for_control() const { return monotone && !coefficients.empty(); }
};

/// Least-squares polynomial fit of ratio against angle. Needs at least
/// degree + 1 distinct angles spanning 30 degrees or more; throws
/// InsufficientSamplesError otherwise. A non-monotone result is returned with
/// `monotone == false`.
Calibration fit_calibration(std::span<const CalibrationSample> samples, int degree = 4);

/// True when f rises strictly between consecutive points of a 0.1 degree grid.
bool check_monotone(const Calibration& cal, double step_deg = 0.1);

struct AngleEstimate {
  double angle_deg = 0.0;
  /// Ratio was outside [f(lo), f(hi)]; the angle is clamped to the bracket.
  bool saturated = false;
};

/// Inverts f by bisection to within `tol_deg`. Throws Error when the
/// calibration is not monotone.
AngleEstimate estimate_angle(const Calibration& cal, double ratio, double tol_deg = 0.01);

void save_calibration(const Calibration& cal, const std::filesystem::path& path);
/// Throws ConfigError with file/line on malformed input.
Calibration load_calibration(const std::filesystem::path& path);

}  // namespace balloonscope::estimation
