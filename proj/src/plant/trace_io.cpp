#include "fth/plant/trace_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string_view>

#include <fmt/format.h>

#include "fth/errors.hpp"

namespace fth::plant {
namespace {

std::vector<double> parse_row(std::string_view line, std::size_t expected, std::size_t line_no) {
  std::vector<double> out;
  while (true) {
    const auto comma = line.find(',');
    auto field = line.substr(0, comma);
    while (!field.empty() && (field.front() == ' ')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
      throw InvalidInput(fmt::format("csv line {}: bad number '{}'", line_no, field));
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  if (out.size() != expected)
    throw InvalidInput(fmt::format("csv line {}: expected {} fields, got {}", line_no, expected, out.size()));
  return out;
}

template <typename Row>
std::vector<Row> read_csv(std::istream& in, std::string_view header, std::size_t fields,
                          Row (*make)(const std::vector<double>&)) {
  std::vector<Row> rows;
  std::string line;
  bool seen_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != header)
        throw InvalidInput(fmt::format("csv: expected header '{}', got '{}'", header, line));
      seen_header = true;
      continue;
    }
    rows.push_back(make(parse_row(line, fields, line_no)));
  }
  if (!seen_header) throw InvalidInput(fmt::format("csv: missing header '{}'", header));
  return rows;
}

}  // namespace

void write_thermal_csv(std::ostream& out, const std::vector<TraceSample>& trace) {
  out << "time_s,temp_c\n";
  for (const auto& s : trace) out << fmt::format("{:.3f},{:.6f}\n", s.time, s.temp);
}

std::vector<TraceSample> read_thermal_csv(std::istream& in) {
  return read_csv<TraceSample>(in, "time_s,temp_c", 2, [](const std::vector<double>& v) {
    return TraceSample{v[0], v[1]};
  });
}

void write_force_csv(std::ostream& out, const std::vector<ForceSample>& samples) {
  out << "pressure_kpa,force_n,clearance_mm\n";
  for (const auto& s : samples)
    out << fmt::format("{:.4f},{:.6f},{:.3f}\n", s.pressure_kpa, s.force_n, s.clearance_mm);
}

std::vector<ForceSample> read_force_csv(std::istream& in) {
  return read_csv<ForceSample>(in, "pressure_kpa,force_n,clearance_mm", 3,
                               [](const std::vector<double>& v) { return ForceSample{v[0], v[1], v[2]}; });
}

}  // namespace fth::plant
