#pragma once

#include "fth/control/config.hpp"
#include "fth/control/pid.hpp"
#include "fth/control/policy.hpp"
#include "fth/control/safety.hpp"

namespace fth::control {

struct ControlConfig {
  PidGains gains;
  SafetyLimits limits;
  PressurePolicy policy;
  StimulusSetpoints stimuli;
};

// Reads pid.*, safety.*, policy.* and stimulus.* keys; missing keys keep
// their defaults. Validates the result.
ControlConfig load_control_config(const ConfigFile& file);

}  // namespace fth::control
