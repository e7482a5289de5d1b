#include "fth/plant/thermistor.hpp"

#include <algorithm>
#include <cmath>

#include "fth/errors.hpp"

namespace fth::plant {
namespace {
constexpr double kT25 = 25.0 + kKelvinOffset;
}

void ThermistorModel::validate() const {
  if (!(r25 > 0.0) || !(beta > 0.0) || !std::isfinite(r25) || !std::isfinite(beta))
    throw InvalidInput("thermistor: r25 and beta must be positive");
}

double thermistor_resistance(double temp_c, const ThermistorModel& model) {
  model.validate();
  if (!(temp_c >= 0.0 && temp_c <= 100.0))
    throw InvalidInput("thermistor_resistance: temperature must be within [0, 100] °C");
  return model.r25 * std::exp(model.beta * (1.0 / (temp_c + kKelvinOffset) - 1.0 / kT25));
}

double thermistor_temperature(double resistance_ohm, const ThermistorModel& model) {
  model.validate();
  if (!(resistance_ohm > 0.0) || !std::isfinite(resistance_ohm))
    throw InvalidInput("thermistor_temperature: resistance must be positive");
  const double inv_t = 1.0 / kT25 + std::log(resistance_ohm / model.r25) / model.beta;
  return 1.0 / inv_t - kKelvinOffset;
}

int adc_code(double resistance_ohm, const AdcFrontEnd& adc) {
  const double ratio = resistance_ohm / (resistance_ohm + adc.fixed_resistor);
  const auto code = static_cast<int>(std::lround(ratio * adc.full_scale()));
  // Codes 0 and full scale have no finite resistance; the front end saturates.
  return std::clamp(code, 1, adc.full_scale() - 1);
}

double adc_resistance(int code, const AdcFrontEnd& adc) {
  const double ratio = static_cast<double>(code) / adc.full_scale();
  return adc.fixed_resistor * ratio / (1.0 - ratio);
}

double sensed_temperature(double true_temp_c, const ThermistorModel& model, const AdcFrontEnd& adc) {
  const double t = std::clamp(true_temp_c, 0.0, 100.0);
  return thermistor_temperature(adc_resistance(adc_code(thermistor_resistance(t, model), adc), adc),
                                model);
}

}  // namespace fth::plant
