#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fth/device/config.hpp"
#include "fth/experiments/manip.hpp"
#include "fth/experiments/stats.hpp"
#include "fth/experiments/thermal.hpp"

namespace fth::experiments {

// Several synthetic subjects, each with its own derived seed and a fresh
// stepped device.

struct ThermalSubjectResult {
  int subject = 0;
  std::vector<ThermalTrialRecord> trials;
};

struct ThermalStudy {
  std::uint64_t seed = 0;
  std::vector<ThermalSubjectResult> subjects;

  std::vector<ThermalTrialRecord> pooled() const;
};

ThermalStudy run_thermal_study(std::uint64_t seed, int subjects, const SubjectModel& subject,
                               const device::DeviceConfig& device_config);

struct ManipSubjectResult {
  int subject = 0;
  Condition condition = Condition::HF;
  std::vector<ManipTrialRecord> trials;
  ManipMetrics metrics;
};

struct ManipStudy {
  std::uint64_t seed = 0;
  std::vector<Condition> conditions;
  std::vector<ManipSubjectResult> sessions;  // subject-major, conditions in the given order

  std::vector<ManipTrialRecord> pooled(Condition c) const;
  // One value per subject, in subject order.
  std::vector<double> per_subject_success(Condition c) const;
  std::vector<double> per_subject_indentation(Condition c) const;
};

ManipStudy run_manip_study(std::uint64_t seed, int subjects, const std::vector<Condition>& conditions,
                           const AgentParams& agent, const ManipSceneConfig& scene_config,
                           const device::DeviceConfig& device_config);

// A statistic or the reason it could not be computed.
struct TTestOutcome {
  std::optional<TTestResult> result;
  std::string error;
};

TTestOutcome try_paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace fth::experiments
