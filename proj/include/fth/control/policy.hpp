#pragma once

namespace fth::control {

struct PressurePolicy {
  double max_pressure = 20.0;     // kPa
  double max_indentation = 20.0;  // mm
  double hold_pressure = 10.0;    // kPa

  void validate() const;
  double gain() const { return max_pressure / max_indentation; }  // kPa/mm
};

double indentation_to_pressure(double indentation_mm, const PressurePolicy& policy);

// Stimulus setpoints for the thermal identification task. Cool means the
// heater is off, carried as NaN.
struct StimulusSetpoints {
  double warm = 40.5;  // °C
  double hot = 43.5;   // °C
};

}  // namespace fth::control
