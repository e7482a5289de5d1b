#include "fth/device/config.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "fth/errors.hpp"

namespace fth::device {
namespace {

int divider(double control_hz, double rate_hz, const char* what) {
  const double ratio = control_hz / rate_hz;
  const long r = std::lround(ratio);
  if (r < 1 || std::abs(ratio - static_cast<double>(r)) > 1e-9)
    throw InvalidInput(fmt::format("rates: control rate must be an integer multiple of the {} rate", what));
  return static_cast<int>(r);
}

}  // namespace

ClockMode ClockMode::parse(const std::string& text) {
  if (text == "realtime") return {ClockKind::Realtime, 1.0};
  if (text == "stepped") return {ClockKind::Stepped, 1.0};
  if (text.rfind("accel:", 0) == 0) {
    const std::string num = text.substr(6);
    double f = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), f);
    if (ec == std::errc() && ptr == num.data() + num.size() && f > 0.0 && std::isfinite(f))
      return {ClockKind::Accelerated, f};
  }
  throw InvalidInput(fmt::format("clock mode '{}': expected realtime, accel:<factor> or stepped", text));
}

std::string ClockMode::to_string() const {
  switch (kind) {
    case ClockKind::Realtime: return "realtime";
    case ClockKind::Stepped: return "stepped";
    case ClockKind::Accelerated: return fmt::format("accel:{}", factor);
  }
  return "?";
}

void LoopRates::validate() const {
  if (!(control_hz > 0.0) || !(sensing_hz > 0.0) || !(telemetry_hz > 0.0))
    throw InvalidInput("rates must be positive");
  if (sensing_hz > control_hz) throw InvalidInput("sensing rate must not exceed control rate");
  if (telemetry_hz > control_hz) throw InvalidInput("telemetry rate must not exceed control rate");
  sensing_divider();
  telemetry_divider();
  const double period_us = 1e6 / control_hz;
  if (std::abs(period_us - std::round(period_us)) > 1e-6)
    throw InvalidInput("control period must be a whole number of microseconds");
}

int LoopRates::sensing_divider() const { return divider(control_hz, sensing_hz, "sensing"); }
int LoopRates::telemetry_divider() const { return divider(control_hz, telemetry_hz, "telemetry"); }
long long LoopRates::control_period_us() const { return std::llround(1e6 / control_hz); }

void DeviceConfig::validate() const {
  thermal.validate();
  pneumatic.validate();
  thermistor.validate();
  if (adc.bits < 8 || adc.bits > 24 || !(adc.fixed_resistor > 0.0)) throw InvalidInput("adc: bad front end");
  control.gains.validate();
  control.limits.validate();
  control.policy.validate();
  rates.validate();
  if (!(contact_threshold >= 0.0)) throw InvalidInput("device.contact_threshold must be >= 0");
}

DeviceConfig load_device_config(const control::ConfigFile& f) {
  DeviceConfig c;
  auto& t = c.thermal;
  t.heat_capacity_element = f.get_double("thermal.heat_capacity_element", t.heat_capacity_element);
  t.heat_capacity_fabric = f.get_double("thermal.heat_capacity_fabric", t.heat_capacity_fabric);
  t.conduct_element_fabric = f.get_double("thermal.conduct_element_fabric", t.conduct_element_fabric);
  t.conduct_fabric_ambient = f.get_double("thermal.conduct_fabric_ambient", t.conduct_fabric_ambient);
  t.conduct_fabric_skin = f.get_double("thermal.conduct_fabric_skin", t.conduct_fabric_skin);
  t.ambient_temp = f.get_double("thermal.ambient_temp", t.ambient_temp);
  t.skin_core_temp = f.get_double("thermal.skin_core_temp", t.skin_core_temp);
  t.heater_max_power = f.get_double("thermal.heater_max_power", t.heater_max_power);

  c.pneumatic.pressure_time_constant = f.get_double("pneumatic.time_constant", c.pneumatic.pressure_time_constant);
  c.pneumatic.max_pressure = f.get_double("pneumatic.max_pressure", c.pneumatic.max_pressure);
  c.thermistor.r25 = f.get_double("thermistor.r25", c.thermistor.r25);
  c.thermistor.beta = f.get_double("thermistor.beta", c.thermistor.beta);
  c.adc.bits = f.get_int("adc.bits", c.adc.bits);
  c.adc.fixed_resistor = f.get_double("adc.fixed_resistor", c.adc.fixed_resistor);

  c.control = control::load_control_config(f);
  c.rates.control_hz = f.get_double("rates.control_hz", c.rates.control_hz);
  c.rates.sensing_hz = f.get_double("rates.sensing_hz", c.rates.sensing_hz);
  c.rates.telemetry_hz = f.get_double("rates.telemetry_hz", c.rates.telemetry_hz);
  c.contact_threshold = f.get_double("device.contact_threshold", c.contact_threshold);
  c.clock = ClockMode::parse(f.get_string("device.clock", c.clock.to_string()));
  c.validate();
  return c;
}

}  // namespace fth::device
