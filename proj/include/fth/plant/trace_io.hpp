#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fth/plant/force_map.hpp"
#include "fth/plant/thermal.hpp"

namespace fth::plant {

// CSV with header `time_s,temp_c`. Lines starting with '#' are comments.
void write_thermal_csv(std::ostream& out, const std::vector<TraceSample>& trace);
std::vector<TraceSample> read_thermal_csv(std::istream& in);

// CSV with header `pressure_kpa,force_n,clearance_mm`.
void write_force_csv(std::ostream& out, const std::vector<ForceSample>& samples);
std::vector<ForceSample> read_force_csv(std::istream& in);

}  // namespace fth::plant
