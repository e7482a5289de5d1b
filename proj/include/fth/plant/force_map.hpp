#pragma once

#include <span>
#include <vector>

namespace fth::plant {

// Linear pressure→force characteristic per fingerpad clearance, with
// piecewise-linear interpolation of the slope between measured clearances and
// flat extrapolation beyond the grid.
struct ClearanceForceMap {
  std::vector<double> clearance_grid;       // mm, strictly increasing
  std::vector<double> slope_per_clearance;  // N/kPa
  double preload_force = 0.05;              // N, zero-clearance calibration reference

  void validate() const;
  double slope(double clearance_mm) const;

  // Slopes through the published maximum forces at 50 kPa.
  static ClearanceForceMap characterized();
};

double force_from_pressure(double pressure_kpa, double clearance_mm, const ClearanceForceMap& map);

struct ForceSample {
  double pressure_kpa = 0.0;
  double force_n = 0.0;
  double clearance_mm = 0.0;
};

// Least-squares slope through the origin for each distinct clearance.
ClearanceForceMap fit_force_map(std::span<const ForceSample> samples, double preload_force = 0.05);

}  // namespace fth::plant
