#pragma once

#include <string>

#include "fth/control/config.hpp"
#include "fth/control/control_config.hpp"
#include "fth/plant/pneumatic.hpp"
#include "fth/plant/thermal.hpp"
#include "fth/plant/thermistor.hpp"

namespace fth::device {

enum class ClockKind { Realtime, Accelerated, Stepped };

struct ClockMode {
  ClockKind kind = ClockKind::Stepped;
  double factor = 1.0;  // virtual seconds per wall second when accelerated

  // "realtime", "accel:<factor>" or "stepped".
  static ClockMode parse(const std::string& text);
  std::string to_string() const;
};

struct LoopRates {
  double control_hz = 100.0;
  double sensing_hz = 5.0;
  double telemetry_hz = 50.0;

  void validate() const;
  int sensing_divider() const;    // control ticks per sensor sample
  int telemetry_divider() const;  // control ticks per telemetry frame
  long long control_period_us() const;
};

struct DeviceConfig {
  plant::ThermalPlantParams thermal = plant::ThermalPlantParams::fitted();
  plant::PneumaticPlantParams pneumatic;
  plant::ThermistorModel thermistor;
  plant::AdcFrontEnd adc;
  control::ControlConfig control;
  LoopRates rates;
  double contact_threshold = 2.0;  // kPa; pouch pressure above this counts as finger contact
  ClockMode clock;

  void validate() const;
};

// thermal.*, pneumatic.*, thermistor.*, adc.*, rates.*, device.* plus the
// control keys.
DeviceConfig load_device_config(const control::ConfigFile& file);

}  // namespace fth::device
