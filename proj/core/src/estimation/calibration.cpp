#include "balloonscope/estimation/calibration.hpp"

#include <yaml-cpp/yaml.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "balloonscope/errors.hpp"

namespace balloonscope::estimation {
namespace {

constexpr double kMinSpanDeg = 30.0;
constexpr const char* kFormatTag = "balloonscope-calibration/1";

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double Calibration::ratio_at(double angle_deg) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * angle_deg + *it;
  return acc;
}

double Calibration::slope_at(double angle_deg) const {
  double acc = 0.0;
  for (std::size_t k = coefficients.size(); k-- > 1;) acc = acc * angle_deg + static_cast<double>(k) * coefficients[k];
  return acc;
}

bool check_monotone(const Calibration& cal, double step_deg) {
  if (cal.coefficients.empty() || !(cal.angle_hi_deg > cal.angle_lo_deg)) return false;
  const auto steps = static_cast<long>(std::ceil((cal.angle_hi_deg - cal.angle_lo_deg) / step_deg));
  double prev = cal.ratio_at(cal.angle_lo_deg);
  for (long i = 1; i <= steps; ++i) {
    const double a = std::min(cal.angle_hi_deg, cal.angle_lo_deg + static_cast<double>(i) * step_deg);
    const double cur = cal.ratio_at(a);
    if (!(cur > prev) || !(cal.slope_at(a) > 0.0)) return false;
    prev = cur;
  }
  return cal.slope_at(cal.angle_lo_deg) > 0.0;
}

Calibration fit_calibration(std::span<const CalibrationSample> samples, int degree) {
  if (degree < 1) throw InsufficientSamplesError("calibration degree must be >= 1");
  std::set<double> distinct;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    if (!std::isfinite(s.angle_deg) || !std::isfinite(s.ratio)) throw Error("calibration sample is not finite");
    distinct.insert(s.angle_deg);
    lo = std::min(lo, s.angle_deg);
    hi = std::max(hi, s.angle_deg);
  }
  const auto needed = static_cast<std::size_t>(degree + 1);
  if (samples.size() < needed || distinct.size() < needed)
    throw InsufficientSamplesError("calibration needs >= " + std::to_string(needed) + " distinct angles, got " +
                                   std::to_string(distinct.size()));
  if (hi - lo < kMinSpanDeg)
    throw InsufficientSamplesError("calibration angles span " + std::to_string(hi - lo) + " deg < 30 deg");

  // Solve in a centred, scaled variable for conditioning, then expand back to
  // per-degree coefficients.
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const auto rows = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd vander(rows, degree + 1);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double u = (samples[static_cast<std::size_t>(i)].angle_deg - mid) / half;
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      vander(i, j) = p;
      p *= u;
    }
    rhs(i) = samples[static_cast<std::size_t>(i)].ratio;
  }
  const Eigen::VectorXd scaled = vander.colPivHouseholderQr().solve(rhs);

  Calibration cal;
  cal.coefficients.assign(static_cast<std::size_t>(degree + 1), 0.0);
  for (int j = 0; j <= degree; ++j) {
    const double bj = scaled(j) / std::pow(half, j);
    for (int k = 0; k <= j; ++k) {
      cal.coefficients[static_cast<std::size_t>(k)] += bj * binomial(j, k) * std::pow(-mid, j - k);
    }
  }
  cal.angle_lo_deg = lo;
  cal.angle_hi_deg = hi;
  cal.sample_count = samples.size();
  double sq = 0.0;
  for (const auto& s : samples) {
    const double r = cal.ratio_at(s.angle_deg) - s.ratio;
    sq += r * r;
  }
  cal.rmse = std::sqrt(sq / static_cast<double>(samples.size()));
  cal.monotone = check_monotone(cal);
  return cal;
}

AngleEstimate estimate_angle(const Calibration& cal, double ratio, double tol_deg) {
  if (!cal.usable_for_control()) throw Error("calibration is not monotone; cannot invert");
  double lo = cal.angle_lo_deg;
  double hi = cal.angle_hi_deg;
  if (!(ratio > cal.ratio_at(lo))) return {lo, ratio < cal.ratio_at(lo)};
  if (!(ratio < cal.ratio_at(hi))) return {hi, ratio > cal.ratio_at(hi)};
  while (hi - lo > tol_deg) {
    const double mid = 0.5 * (lo + hi);
    if (cal.ratio_at(mid) < ratio) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), false};
}

void save_calibration(const Calibration& cal, const std::filesystem::path& path) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "format" << YAML::Value << kFormatTag;
  out << YAML::Key << "degree" << YAML::Value << cal.degree();
  out << YAML::Key << "coefficients" << YAML::Value << YAML::Flow << cal.coefficients;
  out << YAML::Key << "angle_lo_deg" << YAML::Value << cal.angle_lo_deg;
  out << YAML::Key << "angle_hi_deg" << YAML::Value << cal.angle_hi_deg;
  out << YAML::Key << "rmse" << YAML::Value << cal.rmse;
  out << YAML::Key << "sample_count" << YAML::Value << cal.sample_count;
  out << YAML::Key << "monotone" << YAML::Value << cal.monotone;
  out << YAML::Key << "created" << YAML::Value << YAML::DoubleQuoted << cal.created;
  out << YAML::EndMap;
  std::ofstream file(path);
  if (!file) throw Error("cannot open " + path.string() + " for writing");
  file << out.c_str() << '\n';
}

Calibration load_calibration(const std::filesystem::path& path) {
  const std::string name = path.string();
  YAML::Node root;
  try {
    root = YAML::LoadFile(name);
  } catch (const YAML::BadFile&) {
    throw ConfigError(name, 0, "cannot open calibration file");
  } catch (const YAML::Exception& e) {
    throw ConfigError(name, e.mark.line + 1, e.msg);
  }
  auto field = [&](const char* key) {
    YAML::Node n = root[key];
    if (!n) throw ConfigError(name, root.Mark().line + 1, std::string("missing field '") + key + "'");
    return n;
  };
  try {
    if (field("format").as<std::string>() != kFormatTag)
      throw ConfigError(name, field("format").Mark().line + 1, "unknown calibration format");
    Calibration cal;
    cal.coefficients = field("coefficients").as<std::vector<double>>();
    const int degree = field("degree").as<int>();
    if (degree != cal.degree())
      throw ConfigError(name, field("degree").Mark().line + 1, "degree does not match coefficient count");
    cal.angle_lo_deg = field("angle_lo_deg").as<double>();
    cal.angle_hi_deg = field("angle_hi_deg").as<double>();
    if (!(cal.angle_hi_deg > cal.angle_lo_deg))
      throw ConfigError(name, field("angle_hi_deg").Mark().line + 1, "empty angle bracket");
    cal.rmse = field("rmse").as<double>();
    cal.sample_count = field("sample_count").as<std::size_t>();
    if (root["created"]) cal.created = root["created"].as<std::string>();
    cal.monotone = check_monotone(cal);
    return cal;
  } catch (const YAML::Exception& e) {
    throw ConfigError(name, e.mark.line + 1, e.msg);
  }
}

}  // namespace balloonscope::estimation
