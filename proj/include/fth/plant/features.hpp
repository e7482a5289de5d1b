#pragma once

#include <optional>
#include <span>

#include "fth/plant/thermal.hpp"

namespace fth::plant {

// Step-response summary. Optional features are absent when the trace never
// produces them (target never reached, baseline never regained); when used as
// fit targets, an absent feature is simply not constrained.
struct StepFeatures {
  std::optional<double> peak_heating_rate;         // °C/s
  std::optional<double> time_to_target;            // s, from trace start
  std::optional<double> avg_heating_rate;          // °C/s, (target - baseline) / time_to_target
  std::optional<double> cooling_time_to_baseline;  // s, from heater-off to baseline + 1 °C
  std::optional<double> max_cooling_rate;          // °C/s, magnitude
  std::optional<double> baseline_temp;             // °C

  bool target_reached() const { return time_to_target.has_value(); }
};

inline constexpr double kBaselineBand = 1.0;  // °C above baseline counted as "returned"

// Slopes are central differences on the sample grid (one-sided at the ends).
// `heater_off_time` defaults to the time of the hottest sample.
StepFeatures extract_features(std::span<const TraceSample> trace, double target_temp,
                              double baseline,
                              std::optional<double> heater_off_time = std::nullopt);

}  // namespace fth::plant
