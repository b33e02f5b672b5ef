#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace balloonscope::control {

/// One control tick. Values that could not be measured (channel lost) are NaN.
struct TraceRecord {
  double time_s = 0.0;
  double alpha_cmd_deg = 0.0;
  double p_target = 0.0;
  double p_measured = 0.0;
  double delta_p = 0.0;
  double omega_rpm = 0.0;
  double volume_ml = 0.0;
  double alpha_true_deg = 0.0;
  double alpha_est_deg = 0.0;
  double face_diameter_mm = 0.0;
  bool tool_inserted = false;
  bool fault = false;
};

using Trace = std::vector<TraceRecord>;

/// Column order of trace CSV files. Stable; append new columns at the end.
inline constexpr std::string_view kTraceCsvHeader =
    "time_s,alpha_cmd_deg,p_target,p_measured,delta_p,omega_rpm,volume_ml,alpha_true_deg,alpha_est_deg,"
    "face_diameter_mm,tool_inserted,fault";

/// Numbers are written in shortest round-trip form, so reading back yields
/// bit-identical doubles.
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);
/// Throws ConfigError with the line number on malformed rows.
Trace read_trace_csv(std::istream& in, std::string_view source_name = "<trace>");

}  // namespace balloonscope::control
