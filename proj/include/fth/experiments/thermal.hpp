#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "fth/control/policy.hpp"
#include "fth/device/device.hpp"

namespace fth::experiments {

enum class Stimulus : std::uint8_t { Cool = 0, Warm = 1, Hot = 2 };

inline constexpr std::array<Stimulus, 3> kStimuli{Stimulus::Cool, Stimulus::Warm, Stimulus::Hot};

std::string_view to_string(Stimulus s);
std::optional<Stimulus> parse_stimulus(std::string_view text);

struct ThermalPlan {
  std::vector<Stimulus> trials;
  double hold_pressure = 10.0;  // kPa
  double deflate_time = 20.0;   // s

  void validate() const;  // 18 trials, 6 of each
};

// 6/6/6 multiset, Fisher–Yates shuffled with the seeded Rng.
ThermalPlan plan_thermal(std::uint64_t seed);

// Synthetic participant. Watches the fabric temperature under the finger,
// waits until it feels steady, then classifies it with a perceptual error
// and responds after an identification and a recording delay.
struct SubjectModel {
  double sigma = 0.9;                              // °C, perceived-temperature noise
  std::array<double, 2> boundaries{37.0, 42.0};    // cool|warm, warm|hot
  double identify_delay_mean = 1.0;                // s
  double identify_delay_sd = 0.3;
  double record_delay_mean = 1.5;                  // s
  double record_delay_sd = 0.4;
  double min_delay = 0.2;                          // s, floor for each delay
  double steady_rate = 0.1;                        // °C/s
  double steady_window = 1.0;                      // s
  double min_exposure = 3.0;                       // s before a judgment is possible
  double max_exposure = 30.0;                      // s, forced judgment

  void validate() const;
  Stimulus classify(double perceived) const;
  static SubjectModel noiseless();
};

struct ThermalTrialRecord {
  int trial = 0;
  Stimulus stimulus = Stimulus::Cool;
  Stimulus response = Stimulus::Cool;
  // Trial clock starts at the setpoint command; all times are whole device
  // ticks so duration = heating + identification + recording exactly.
  std::int64_t heating_us = 0;
  std::int64_t identify_us = 0;
  std::int64_t record_us = 0;
  std::int64_t duration_us = 0;
  double felt_temp = 0.0;       // true fabric temperature at judgment, °C
  double perceived_temp = 0.0;  // with perceptual error
};

// Runs the whole plan on a stepped device, sending frames through the wire
// codec. Throws InvalidInput if the device clock is not stepped;
// SimulationDiverged propagates.
std::vector<ThermalTrialRecord> run_thermal_session(const ThermalPlan& plan, const SubjectModel& subject,
                                                    device::Device& device, std::uint64_t seed,
                                                    const control::StimulusSetpoints& setpoints = {});

struct ConfusionMatrix {
  std::array<std::array<int, 3>, 3> counts{};  // [stimulus][response]
  std::array<std::optional<double>, 3> class_accuracy;  // empty row: none
  double overall_accuracy = 0.0;
  int total = 0;
};

ConfusionMatrix confusion_matrix(const std::vector<ThermalTrialRecord>& records);

}  // namespace fth::experiments
