#include "fth/plant/features.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fth/errors.hpp"

namespace fth::plant {
namespace {

std::vector<double> slopes(std::span<const TraceSample> trace) {
  const std::size_t n = trace.size();
  std::vector<double> d(n);
  d[0] = (trace[1].temp - trace[0].temp) / (trace[1].time - trace[0].time);
  d[n - 1] = (trace[n - 1].temp - trace[n - 2].temp) / (trace[n - 1].time - trace[n - 2].time);
  for (std::size_t i = 1; i + 1 < n; ++i)
    d[i] = (trace[i + 1].temp - trace[i - 1].temp) / (trace[i + 1].time - trace[i - 1].time);
  return d;
}

// Linear interpolation of the time where the segment [a, b] crosses `level`.
double crossing_time(const TraceSample& a, const TraceSample& b, double level) {
  if (b.temp == a.temp) return b.time;
  return a.time + (level - a.temp) / (b.temp - a.temp) * (b.time - a.time);
}

}  // namespace

StepFeatures extract_features(std::span<const TraceSample> trace, double target_temp,
                              double baseline, std::optional<double> heater_off_time) {
  if (trace.size() < 2) throw InvalidInput("extract_features: need at least two samples");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!std::isfinite(trace[i].time) || !std::isfinite(trace[i].temp))
      throw InvalidInput("extract_features: non-finite sample");
    if (i > 0 && !(trace[i].time > trace[i - 1].time))
      throw InvalidInput("extract_features: time must be strictly increasing");
  }

  const auto d = slopes(trace);
  const double t0 = trace.front().time;
  StepFeatures f;
  f.baseline_temp = baseline;

  double t_off;
  if (heater_off_time) {
    t_off = *heater_off_time;
  } else {
    const auto hottest = std::max_element(trace.begin(), trace.end(),
                                          [](const auto& a, const auto& b) { return a.temp < b.temp; });
    t_off = hottest->time;
  }

  // Heating phase: up to the first sample at or above target, else up to heater-off.
  std::size_t heat_end = 0;
  std::optional<std::size_t> reached;
  for (std::size_t i = 0; i < trace.size() && trace[i].time <= t_off; ++i) {
    heat_end = i;
    if (trace[i].temp >= target_temp) {
      reached = i;
      break;
    }
  }
  double peak = d[0];
  for (std::size_t i = 0; i <= heat_end; ++i) peak = std::max(peak, d[i]);
  f.peak_heating_rate = peak;

  if (reached) {
    const std::size_t i = *reached;
    const double t_cross = i == 0 ? trace[0].time : crossing_time(trace[i - 1], trace[i], target_temp);
    f.time_to_target = t_cross - t0;
    if (*f.time_to_target > 0.0) f.avg_heating_rate = (target_temp - baseline) / *f.time_to_target;
  }

  // Cooling phase: samples at or after heater-off.
  std::optional<double> max_cool;
  const double band = baseline + kBaselineBand;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].time < t_off) continue;
    const double rate = -d[i];
    if (!max_cool || rate > *max_cool) max_cool = rate;
    if (!f.cooling_time_to_baseline && trace[i].temp <= band) {
      const bool interpolate = i > 0 && trace[i - 1].time >= t_off && trace[i - 1].temp > band;
      const double t = interpolate ? crossing_time(trace[i - 1], trace[i], band) : trace[i].time;
      f.cooling_time_to_baseline = t - t_off;
    }
  }
  if (max_cool) f.max_cooling_rate = std::max(0.0, *max_cool);
  return f;
}

}  // namespace fth::plant
