#pragma once

#include <cstdint>

#include "fth/plant/features.hpp"
#include "fth/plant/thermal.hpp"

namespace fth::plant {

// Per-feature weights on squared relative errors. avg_heating_rate defaults
// to zero because it is determined by time_to_target and the baseline.
struct FeatureWeights {
  double peak_heating_rate = 50.0;
  double time_to_target = 100.0;
  double avg_heating_rate = 0.0;
  double cooling_time_to_baseline = 30.0;
  double max_cooling_rate = 15.0;
  double baseline_temp = 4000.0;
};

struct ThermalFitOptions {
  StepProtocol protocol{};
  FeatureWeights weights{};
  // Fixed initial guess. heater_max_power and ambient_temp are held at these
  // values (the model is invariant to a common scaling of capacities,
  // conductances and power, so one of them anchors the scale).
  ThermalPlantParams initial_guess = default_initial_guess();
  double element_temp_ceiling = 95.0;  // °C, soft bound on the heater node
  double acceptance_threshold = 3.0;   // weighted residual
  int max_evaluations = 6000;
  std::uint64_t seed = 20240611;

  static ThermalPlantParams default_initial_guess();
};

struct ThermalFitResult {
  ThermalPlantParams params;
  double residual = 0.0;
  int evaluations = 0;
  StepFeatures unloaded;
  StepFeatures contact;
};

// Weighted feature residual of `params` against both targets (the quantity
// fit_thermal_params minimizes).
double thermal_fit_residual(const ThermalPlantParams& params, const StepFeatures& targets_unloaded,
                            const StepFeatures& targets_contact, const ThermalFitOptions& options = {});

// Simulates the step protocol in both conditions and extracts features the
// same way the fit does. Baselines come from the targets (contact target
// baseline may be omitted, then the model's passive equilibrium is used).
StepFeatures protocol_features(const ThermalPlantParams& params, bool contact, double baseline,
                               const StepProtocol& protocol = {});

// Identifies the five capacities/conductances and the skin source temperature
// by downhill simplex in log space. Throws FitFailure when the best residual
// stays above options.acceptance_threshold.
ThermalFitResult fit_thermal_params(const StepFeatures& targets_unloaded,
                                    const StepFeatures& targets_contact,
                                    const ThermalFitOptions& options = {});

// Published characterization features of the unloaded and finger-contact
// step (25 → 40 °C, 40 s, then heater off).
StepFeatures published_unloaded_targets();
StepFeatures published_contact_targets();

}  // namespace fth::plant
