#pragma once

namespace fth::control {

struct SafetyLimits {
  double max_temp = 50.0;            // °C
  double min_setpoint = 25.0;        // °C
  double max_setpoint = 50.0;        // °C
  double setpoint_tolerance = 1.0;   // °C
  double release_hysteresis = 2.0;   // °C below max_temp before a trip clears

  void validate() const;
  bool setpoint_allowed(double setpoint) const {
    return setpoint >= min_setpoint && setpoint <= max_setpoint;
  }
};

struct GateOutput {
  double duty = 0.0;
  bool tripped = false;
};

// Over-temperature cutoff with a latch: trips at measured >= max_temp and
// stays tripped until measured < max_temp - release_hysteresis.
GateOutput safety_gate(double duty, double measured, const SafetyLimits& limits, bool tripped);

}  // namespace fth::control
