#include "fth/control/safety.hpp"

#include <cmath>

#include "fth/errors.hpp"

namespace fth::control {

void SafetyLimits::validate() const {
  for (double v : {max_temp, min_setpoint, max_setpoint, setpoint_tolerance, release_hysteresis})
    if (!std::isfinite(v)) throw InvalidInput("safety limits must be finite");
  if (!(min_setpoint < max_setpoint && max_setpoint <= max_temp))
    throw InvalidInput("safety limits: need min_setpoint < max_setpoint <= max_temp");
  if (!(setpoint_tolerance > 0.0) || release_hysteresis < 0.0)
    throw InvalidInput("safety limits: tolerance must be positive, hysteresis non-negative");
}

GateOutput safety_gate(double duty, double measured, const SafetyLimits& limits, bool tripped) {
  // A NaN reading is treated as over-temperature.
  if (!(measured < limits.max_temp)) return {0.0, true};
  if (tripped && !(measured < limits.max_temp - limits.release_hysteresis)) return {0.0, true};
  return {duty, false};
}

}  // namespace fth::control
