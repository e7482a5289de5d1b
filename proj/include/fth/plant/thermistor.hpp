#pragma once

namespace fth::plant {

// NTC thermistor, beta-equation model: R(T) = R25 * exp(B * (1/T - 1/T25)).
struct ThermistorModel {
  double r25 = 50'000.0;  // Ω at 25 °C
  double beta = 3950.0;   // K

  void validate() const;
};

inline constexpr double kKelvinOffset = 273.15;

double thermistor_resistance(double temp_c, const ThermistorModel& model);
double thermistor_temperature(double resistance_ohm, const ThermistorModel& model);

// Thermistor on the low side of a divider with a fixed resistor, read by an
// ADC with `bits` resolution referenced to the divider supply.
struct AdcFrontEnd {
  double fixed_resistor = 50'000.0;  // Ω
  int bits = 12;

  int full_scale() const { return (1 << bits) - 1; }
};

int adc_code(double resistance_ohm, const AdcFrontEnd& adc);
double adc_resistance(int code, const AdcFrontEnd& adc);

// temperature -> resistance -> ADC code -> resistance -> temperature.
double sensed_temperature(double true_temp_c, const ThermistorModel& model, const AdcFrontEnd& adc);

}  // namespace fth::plant
