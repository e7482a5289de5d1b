#pragma once

#include <optional>
#include <vector>

namespace fth::plant {

// Two-node lumped model of one actuator: the resistive heater element, and
// the fabric/pouch mass that carries the thermistor and touches the finger.
//
//   C_e dT_e/dt = u P - G_ef (T_e - T_f)
//   C_f dT_f/dt = G_ef (T_e - T_f) - G_fa (T_f - T_amb) - [contact] G_fs (T_f - T_skin)
struct ThermalPlantParams {
  double heat_capacity_element = 0.0;  // J/°C
  double heat_capacity_fabric = 0.0;   // J/°C
  double conduct_element_fabric = 0.0; // W/°C
  double conduct_fabric_ambient = 0.0; // W/°C
  double conduct_fabric_skin = 0.0;    // W/°C
  double ambient_temp = 25.0;          // °C
  // Source temperature of the finger path. Identified values come out far
  // above physiological core temperature with a small conductance: the
  // finger behaves as a nearly constant heat input to the fabric.
  double skin_core_temp = 37.0;        // °C
  double heater_max_power = 0.0;       // W

  // Throws InvalidInput when an invariant does not hold.
  void validate() const;

  // Parameters identified from the published step-response features; see
  // fit_thermal_params for how they are produced.
  static ThermalPlantParams fitted();
};

struct ThermalState {
  double element_temp = 25.0;  // °C
  double fabric_temp = 25.0;   // °C
  double time = 0.0;           // s
};

struct ThermalRates {
  double element = 0.0;  // °C/s
  double fabric = 0.0;   // °C/s
};

inline constexpr double kMaxThermalStep = 0.1;  // s

ThermalRates thermal_rates(const ThermalState& state, const ThermalPlantParams& params,
                           double heater_duty, bool contact);

// Advances one fixed step with classical RK4. Duty is held over the step.
ThermalState thermal_step(const ThermalState& state, const ThermalPlantParams& params,
                          double heater_duty, bool contact, double dt);

// Capacity-weighted mean temperature rate, i.e. net power over total capacity.
double aggregate_heating_rate(const ThermalState& state, const ThermalPlantParams& params,
                              double heater_duty, bool contact);

// Passive (heater off) fixed point of the fabric node.
double passive_equilibrium(const ThermalPlantParams& params, bool contact);

ThermalState equilibrium_state(const ThermalPlantParams& params, bool contact);

// Duty that holds the fabric node at `temp` in steady state (unclamped).
double holding_duty(const ThermalPlantParams& params, bool contact, double temp);

struct TraceSample {
  double time = 0.0;  // s
  double temp = 0.0;  // °C
};

// Characterization step: regulate the fabric toward `target` for
// `heat_duration`, switch the heater off and record the passive cooling.
// The regulator is feed-forward (holding duty) plus proportional feedback,
// saturated to [0, 1], evaluated on the true fabric temperature every step.
struct StepProtocol {
  double target = 40.0;          // °C
  double heat_duration = 40.0;   // s
  double cool_duration = 150.0;  // s
  double dt = 0.01;              // s, integrator step
  double sample_period = 0.2;    // s, 5 Hz acquisition
  double regulator_gain = 0.12;  // duty/°C
  // Ends the run early once the cooling fabric drops below this temperature.
  std::optional<double> stop_below;
};

struct ProtocolRun {
  std::vector<TraceSample> trace;  // fabric temperature samples
  double heater_off_time = 0.0;
  double max_element_temp = 0.0;
  double max_fabric_temp = 0.0;
};

// Starts from the passive equilibrium of the given contact condition.
ProtocolRun simulate_step_protocol(const ThermalPlantParams& params, bool contact,
                                   const StepProtocol& protocol = {});

}  // namespace fth::plant
