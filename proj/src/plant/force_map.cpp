#include "fth/plant/force_map.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fth/errors.hpp"

namespace fth::plant {

void ClearanceForceMap::validate() const {
  if (clearance_grid.empty() || clearance_grid.size() != slope_per_clearance.size())
    throw InvalidInput("force map: grid and slopes must be non-empty and equal length");
  for (std::size_t i = 0; i < clearance_grid.size(); ++i) {
    if (!(slope_per_clearance[i] > 0.0)) throw InvalidInput("force map: slopes must be positive");
    if (i > 0) {
      if (!(clearance_grid[i] > clearance_grid[i - 1]))
        throw InvalidInput("force map: clearance grid must be strictly increasing");
      if (slope_per_clearance[i] > slope_per_clearance[i - 1])
        throw InvalidInput("force map: slopes must be non-increasing with clearance");
    }
  }
}

double ClearanceForceMap::slope(double clearance_mm) const {
  if (clearance_mm <= clearance_grid.front()) return slope_per_clearance.front();
  if (clearance_mm >= clearance_grid.back()) return slope_per_clearance.back();
  const auto hi = std::upper_bound(clearance_grid.begin(), clearance_grid.end(), clearance_mm);
  const auto i = static_cast<std::size_t>(hi - clearance_grid.begin());
  const double t = (clearance_mm - clearance_grid[i - 1]) / (clearance_grid[i] - clearance_grid[i - 1]);
  return slope_per_clearance[i - 1] + t * (slope_per_clearance[i] - slope_per_clearance[i - 1]);
}

ClearanceForceMap ClearanceForceMap::characterized() {
  ClearanceForceMap m;
  m.clearance_grid = {0.0, 1.0, 2.0, 3.0};
  m.slope_per_clearance = {8.93 / 50.0, 8.5 / 50.0, 7.7 / 50.0, 6.6 / 50.0};
  m.preload_force = 0.05;
  return m;
}

double force_from_pressure(double pressure_kpa, double clearance_mm, const ClearanceForceMap& map) {
  if (!(pressure_kpa >= 0.0) || !(clearance_mm >= 0.0))
    throw InvalidInput("force_from_pressure: pressure and clearance must be non-negative");
  return map.slope(clearance_mm) * pressure_kpa;
}

ClearanceForceMap fit_force_map(std::span<const ForceSample> samples, double preload_force) {
  std::map<double, std::pair<double, double>> sums;  // clearance -> (Σpf, Σp²)
  for (const auto& s : samples) {
    if (!std::isfinite(s.pressure_kpa) || !std::isfinite(s.force_n) || !(s.clearance_mm >= 0.0) ||
        s.pressure_kpa < 0.0)
      throw InvalidInput("fit_force_map: invalid sample");
    auto& acc = sums[s.clearance_mm];
    acc.first += s.pressure_kpa * s.force_n;
    acc.second += s.pressure_kpa * s.pressure_kpa;
  }
  ClearanceForceMap m;
  m.preload_force = preload_force;
  for (const auto& [clearance, acc] : sums) {
    if (!(acc.second > 0.0))
      throw InvalidInput("fit_force_map: clearance without any non-zero pressure sample");
    m.clearance_grid.push_back(clearance);
    m.slope_per_clearance.push_back(acc.first / acc.second);
  }
  m.validate();
  return m;
}

}  // namespace fth::plant
