#include "fth/experiments/study.hpp"

#include <limits>

#include "fth/errors.hpp"
#include "fth/numerics/rng.hpp"

namespace fth::experiments {

std::vector<ThermalTrialRecord> ThermalStudy::pooled() const {
  std::vector<ThermalTrialRecord> out;
  for (const auto& s : subjects) out.insert(out.end(), s.trials.begin(), s.trials.end());
  return out;
}

ThermalStudy run_thermal_study(std::uint64_t seed, int subjects, const SubjectModel& subject,
                               const device::DeviceConfig& device_config) {
  if (subjects < 1) throw InvalidInput("run_thermal_study: need at least one subject");
  device::DeviceConfig cfg = device_config;
  cfg.clock.kind = device::ClockKind::Stepped;
  ThermalStudy study;
  study.seed = seed;
  for (int s = 0; s < subjects; ++s) {
    const auto base = numerics::derive_seed(seed, static_cast<std::uint64_t>(s));
    device::Device dev(cfg);
    const ThermalPlan plan = plan_thermal(numerics::derive_seed(base, 0));
    study.subjects.push_back({s, run_thermal_session(plan, subject, dev, numerics::derive_seed(base, 1),
                                                     cfg.control.stimuli)});
  }
  return study;
}

std::vector<ManipTrialRecord> ManipStudy::pooled(Condition c) const {
  std::vector<ManipTrialRecord> out;
  for (const auto& s : sessions)
    if (s.condition == c) out.insert(out.end(), s.trials.begin(), s.trials.end());
  return out;
}

std::vector<double> ManipStudy::per_subject_success(Condition c) const {
  std::vector<double> out;
  for (const auto& s : sessions)
    if (s.condition == c) out.push_back(s.metrics.success_rate);
  return out;
}

std::vector<double> ManipStudy::per_subject_indentation(Condition c) const {
  std::vector<double> out;
  for (const auto& s : sessions)
    if (s.condition == c) out.push_back(s.metrics.avg_indentation.value_or(std::numeric_limits<double>::quiet_NaN()));
  return out;
}

ManipStudy run_manip_study(std::uint64_t seed, int subjects, const std::vector<Condition>& conditions,
                           const AgentParams& agent, const ManipSceneConfig& scene_config,
                           const device::DeviceConfig& device_config) {
  if (subjects < 1) throw InvalidInput("run_manip_study: need at least one subject");
  if (conditions.empty()) throw InvalidInput("run_manip_study: need at least one condition");
  device::DeviceConfig cfg = device_config;
  cfg.clock.kind = device::ClockKind::Stepped;
  ManipStudy study;
  study.seed = seed;
  study.conditions = conditions;
  for (int s = 0; s < subjects; ++s) {
    // Subject 0 uses the base seed itself so a one-subject study equals a
    // plain session with that seed.
    const auto subject_seed = s == 0 ? seed : numerics::derive_seed(seed, static_cast<std::uint64_t>(s));
    for (Condition c : conditions) {
      ManipPlan plan;
      plan.condition = c;
      plan.agent = agent;
      plan.trial_timeout = scene_config.task.timeout;
      std::optional<device::Device> dev;
      if (c == Condition::HF) dev.emplace(cfg);
      ManipSubjectResult r;
      r.subject = s;
      r.condition = c;
      r.trials = run_manip_session(plan, scene_config, dev ? &*dev : nullptr, subject_seed);
      r.metrics = manip_metrics(r.trials);
      study.sessions.push_back(std::move(r));
    }
  }
  return study;
}

TTestOutcome try_paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  TTestOutcome out;
  try {
    out.result = paired_t_test(a, b);
  } catch (const InvalidInput& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace fth::experiments
