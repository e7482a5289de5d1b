#pragma once

namespace fth::plant {

// First-order lag standing in for the proportional valve and tubing.
struct PneumaticPlantParams {
  double pressure_time_constant = 0.1;  // s
  double max_pressure = 60.0;           // kPa

  void validate() const;
};

struct PressureStep {
  double pressure = 0.0;    // kPa
  bool clamped = false;     // commanded value was outside [0, max_pressure]
};

// Exact discretization of the lag over dt.
PressureStep pressure_step(double current_kpa, double commanded_kpa, const PneumaticPlantParams& params,
                           double dt);

}  // namespace fth::plant
