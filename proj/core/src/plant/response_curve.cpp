#include "balloonscope/plant/response_curve.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <string>

#include "balloonscope/errors.hpp"

namespace balloonscope::plant {
namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

double end_slope(double h0, double h1, double m0, double m1) {
  double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
  if (sign(d) != sign(m0)) {
    d = 0.0;
  } else if (sign(m0) != sign(m1) && std::abs(d) > 3.0 * std::abs(m0)) {
    d = 3.0 * m0;
  }
  return d;
}

std::vector<double> column(const std::vector<ResponseAnchor>& anchors, double ResponseAnchor::*field) {
  std::vector<double> out;
  out.reserve(anchors.size());
  for (const auto& a : anchors) out.push_back(a.*field);
  return out;
}

const std::vector<ResponseAnchor>& checked(const std::vector<ResponseAnchor>& anchors) {
  if (anchors.size() < 2) throw ConfigError("response curve needs at least two anchors");
  if (anchors.front().volume_ml != 0.0) throw ConfigError("response curve must start at 0 mL");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const auto& a = anchors[i];
    if (!std::isfinite(a.volume_ml) || !std::isfinite(a.face_diameter_mm) || !std::isfinite(a.free_angle_deg))
      throw ConfigError("response curve anchor " + std::to_string(i) + " is not finite");
    if (a.face_diameter_mm <= 0.0 || a.free_angle_deg < 0.0)
      throw ConfigError("response curve anchor " + std::to_string(i) + " has a negative output");
    if (i == 0) continue;
    const auto& prev = anchors[i - 1];
    if (!(a.volume_ml > prev.volume_ml))
      throw ConfigError("response curve volumes must be strictly increasing (anchor " + std::to_string(i) + ")");
    if (a.face_diameter_mm < prev.face_diameter_mm || a.free_angle_deg < prev.free_angle_deg)
      throw ConfigError("response curve outputs must be non-decreasing (anchor " + std::to_string(i) + ")");
  }
  return anchors;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)), slope_(x_.size(), 0.0) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw ConfigError("monotone cubic needs >= 2 matching knots");
  std::vector<double> h(n - 1), m(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x_[k + 1] - x_[k];
    if (!(h[k] > 0.0)) throw ConfigError("monotone cubic knots must be strictly increasing");
    m[k] = (y_[k + 1] - y_[k]) / h[k];
  }
  if (n == 2) {
    slope_[0] = slope_[1] = m[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (sign(m[k - 1]) * sign(m[k]) <= 0) {
      slope_[k] = 0.0;
    } else {
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      slope_[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
    }
  }
  slope_[0] = end_slope(h[0], h[1], m[0], m[1]);
  slope_[n - 1] = end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
}

std::size_t MonotoneCubic::segment(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t k = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(k, x_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
  const std::size_t k = segment(x);
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[k] + h10 * h * slope_[k] + h01 * y_[k + 1] + h11 * h * slope_[k + 1];
}

double MonotoneCubic::derivative(double x) const {
  const std::size_t k = segment(x);
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t;
  const double d00 = (6.0 * t2 - 6.0 * t) / h;
  const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double d01 = (-6.0 * t2 + 6.0 * t) / h;
  const double d11 = 3.0 * t2 - 2.0 * t;
  return d00 * y_[k] + d10 * slope_[k] + d01 * y_[k + 1] + d11 * slope_[k + 1];
}

ResponseCurve::ResponseCurve(std::vector<ResponseAnchor> anchors)
    : anchors_(std::move(anchors)),
      diameter_(column(checked(anchors_), &ResponseAnchor::volume_ml),
                column(anchors_, &ResponseAnchor::face_diameter_mm)),
      angle_(column(anchors_, &ResponseAnchor::volume_ml), column(anchors_, &ResponseAnchor::free_angle_deg)) {}

ResponseCurve ResponseCurve::standard() {
  return ResponseCurve({
      {0.0, 4.6, 0.0},
      {0.4, 6.5, 0.0},
      {0.8, 8.0, 0.0},
      {1.5, 8.5, 25.0},
      {2.4, 8.9, 60.0},
      {4.0, 9.5, 100.0},
  });
}

ResponseCurve::Sample ResponseCurve::at(double volume_ml) const {
  if (!(volume_ml >= 0.0 && volume_ml <= max_volume_ml()))
    throw OutOfRangeError("volume " + std::to_string(volume_ml) + " mL outside response curve span [0, " +
                          std::to_string(max_volume_ml()) + "]");
  // The interpolant can round a hair below zero on a flat segment.
  return {diameter_(volume_ml), std::max(0.0, angle_(volume_ml))};
}

double ResponseCurve::face_deploy_volume_ml() const {
  double v = 0.0;
  for (const auto& a : anchors_) {
    if (a.free_angle_deg > 0.0) break;
    v = a.volume_ml;
  }
  return v;
}

double ResponseCurve::volume_for_free_angle(double free_angle_deg, double tol_ml) const {
  if (free_angle_deg <= 0.0) return 0.0;
  if (free_angle_deg > anchors_.back().free_angle_deg)
    throw OutOfRangeError("free angle " + std::to_string(free_angle_deg) + " deg is beyond the curve maximum");
  double lo = 0.0;
  double hi = max_volume_ml();
  while (hi - lo > tol_ml) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (at(mid).free_angle_deg >= free_angle_deg) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

DecouplingReport check_decoupling(const ResponseCurve& curve, double resolution_ml) {
  if (!(resolution_ml > 0.0)) throw ConfigError("decoupling scan resolution must be > 0");
  DecouplingReport report;
  report.min_face_while_bent_mm = std::numeric_limits<double>::infinity();
  const double deploy = curve.face_deploy_volume_ml();
  const auto steps = static_cast<long>(std::floor(curve.max_volume_ml() / resolution_ml + 1e-9));
  for (long i = 0; i <= steps; ++i) {
    const double v = std::min(curve.max_volume_ml(), static_cast<double>(i) * resolution_ml);
    const auto s = curve.at(v);
    report.max_face_mm = std::max(report.max_face_mm, s.face_diameter_mm);
    report.max_angle_deg = std::max(report.max_angle_deg, s.free_angle_deg);
    if (s.free_angle_deg > 0.0) {
      report.min_face_while_bent_mm = std::min(report.min_face_while_bent_mm, s.face_diameter_mm);
      if (s.face_diameter_mm < kMinDeployedFaceMm) report.angle_implies_open_face = false;
    }
    if (s.face_diameter_mm > kMaxDeployedFaceMm) report.face_within_limits = false;
    if (v >= deploy && s.face_diameter_mm < kMinDeployedFaceMm) report.face_within_limits = false;
  }
  const double end_angle = curve.at(curve.max_volume_ml()).free_angle_deg;
  report.reaches_target_angle = end_angle >= kMinMaxAngleDeg;
  if (!std::isfinite(report.min_face_while_bent_mm)) report.min_face_while_bent_mm = 0.0;
  return report;
}

}  // namespace balloonscope::plant
