#include "balloonscope/control/trace.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <string>

#include "../common/numbers.hpp"
#include "balloonscope/errors.hpp"

namespace balloonscope::control {

using detail::format_double;

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
  out << kTraceCsvHeader << '\n';
  for (const auto& r : trace) {
    out << format_double(r.time_s) << ',' << format_double(r.alpha_cmd_deg) << ',' << format_double(r.p_target) << ','
        << format_double(r.p_measured) << ',' << format_double(r.delta_p) << ',' << format_double(r.omega_rpm) << ','
        << format_double(r.volume_ml) << ',' << format_double(r.alpha_true_deg) << ','
        << format_double(r.alpha_est_deg) << ',' << format_double(r.face_diameter_mm) << ','
        << (r.tool_inserted ? 1 : 0) << ',' << (r.fault ? 1 : 0) << '\n';
  }
}

Trace read_trace_csv(std::istream& in, std::string_view source_name) {
  const std::string source(source_name);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ConfigError(source, 1, "empty trace file");
  ++line_no;
  if (detail::trim(line) != kTraceCsvHeader) throw ConfigError(source, line_no, "unexpected trace header");
  Trace trace;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::array<double, 12> v{};
    std::size_t field = 0;
    std::size_t start = 0;
    std::string_view view(line);
    while (true) {
      const std::size_t comma = view.find(',', start);
      const auto cell = view.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (field >= v.size()) throw ConfigError(source, line_no, "too many columns");
      const auto parsed = detail::parse_double(cell);
      if (!parsed) throw ConfigError(source, line_no, "bad number '" + std::string(cell) + "'");
      v[field++] = *parsed;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (field != v.size()) throw ConfigError(source, line_no, "expected 12 columns");
    trace.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10] != 0.0, v[11] != 0.0});
  }
  return trace;
}

}  // namespace balloonscope::control
