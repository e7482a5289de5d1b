#include "fth/experiments/report.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace fth::experiments {

using nlohmann::ordered_json;

namespace {

double secs(std::int64_t us) { return static_cast<double>(us) * 1e-6; }

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json t_test_json(const TTestOutcome& o) {
  if (!o.result) return {{"error", o.error}};
  return {{"t", o.result->t}, {"df", o.result->df}, {"p", o.result->p}, {"mean_difference", o.result->mean_difference}};
}

}  // namespace

void write_thermal_csv(std::ostream& os, const ThermalStudy& study) {
  os << "subject,trial,stimulus,response,heating_s,identify_s,record_s,duration_s,felt_c,perceived_c\n";
  for (const auto& s : study.subjects)
    for (const auto& r : s.trials)
      fmt::print(os, "{},{},{},{},{:.2f},{:.2f},{:.2f},{:.2f},{:.3f},{:.3f}\n", s.subject, r.trial, to_string(r.stimulus),
                 to_string(r.response), secs(r.heating_us), secs(r.identify_us), secs(r.record_us),
                 secs(r.duration_us), r.felt_temp, r.perceived_temp);
}

void write_manip_csv(std::ostream& os, const ManipStudy& study) {
  os << "subject,condition,trial,status,duration_s,mean_indentation_mm,contact_samples,max_indentation_mm,"
        "grip_parameter\n";
  for (const auto& s : study.sessions)
    for (const auto& r : s.trials)
      fmt::print(os, "{},{},{},{},{:.3f},{},{},{:.4f},{:.4f}\n", s.subject, to_string(r.condition), r.trial, r.status,
                 r.duration, r.mean_indentation ? fmt::format("{:.4f}", *r.mean_indentation) : std::string(),
                 r.contact_samples, r.max_indentation, r.grip_parameter);
}

ordered_json confusion_json(const ConfusionMatrix& m) {
  ordered_json labels = ordered_json::array();
  ordered_json counts = ordered_json::array();
  ordered_json acc = ordered_json::object();
  for (Stimulus s : kStimuli) {
    const int i = static_cast<int>(s);
    labels.push_back(to_string(s));
    counts.push_back(m.counts[i]);
    acc[std::string(to_string(s))] = optional_number(m.class_accuracy[i]);
  }
  return {{"labels", labels}, {"counts", counts}, {"class_accuracy", acc}, {"overall_accuracy", m.overall_accuracy},
          {"total", m.total}};
}

ordered_json metrics_json(const ManipMetrics& m) {
  return {{"trials", m.trials},
          {"successes", m.successes},
          {"success_rate", m.success_rate},
          {"total_time_s", m.total_time},
          {"avg_time_to_success_s", optional_number(m.avg_time_to_success)},
          {"avg_indentation_mm", optional_number(m.avg_indentation)}};
}

ordered_json thermal_summary(const ThermalStudy& study, const SubjectModel& subject) {
  const auto pooled = study.pooled();
  ordered_json per_subject = ordered_json::array();
  for (const auto& s : study.subjects)
    per_subject.push_back({{"subject", s.subject}, {"overall_accuracy", confusion_matrix(s.trials).overall_accuracy}});
  ordered_json mean_duration = ordered_json::object();
  for (Stimulus st : kStimuli) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : pooled)
      if (r.stimulus == st) {
        sum += secs(r.duration_us);
        ++n;
      }
    mean_duration[std::string(to_string(st))] = n > 0 ? ordered_json(sum / n) : ordered_json(nullptr);
  }
  return {{"experiment", "thermal_identification"},
          {"seed", study.seed},
          {"subjects", study.subjects.size()},
          {"subject_model",
           {{"sigma_c", subject.sigma},
            {"boundaries_c", subject.boundaries},
            {"identify_delay_s", {subject.identify_delay_mean, subject.identify_delay_sd}},
            {"record_delay_s", {subject.record_delay_mean, subject.record_delay_sd}}}},
          {"pooled", confusion_json(confusion_matrix(pooled))},
          {"mean_duration_s", mean_duration},
          {"per_subject", per_subject}};
}

ordered_json manip_summary(const ManipStudy& study) {
  ordered_json conditions = ordered_json::object();
  for (Condition c : study.conditions) {
    ordered_json per_subject = ordered_json::array();
    for (const auto& s : study.sessions)
      if (s.condition == c) {
        ordered_json m = metrics_json(s.metrics);
        m["subject"] = s.subject;
        per_subject.push_back(std::move(m));
      }
    conditions[std::string(to_string(c))] = {{"pooled", metrics_json(manip_metrics(study.pooled(c)))},
                                             {"per_subject", per_subject}};
  }
  ordered_json out = {{"experiment", "pick_and_place"},
                      {"seed", study.seed},
                      {"subjects", study.sessions.size() / study.conditions.size()},
                      {"conditions", conditions}};
  const bool both = std::find(study.conditions.begin(), study.conditions.end(), Condition::HF) != study.conditions.end() &&
                    std::find(study.conditions.begin(), study.conditions.end(), Condition::NF) != study.conditions.end();
  if (both) {
    const auto hs = study.per_subject_success(Condition::HF), ns = study.per_subject_success(Condition::NF);
    const auto hi = study.per_subject_indentation(Condition::HF), ni = study.per_subject_indentation(Condition::NF);
    const auto sign = sign_test(ni, hi);
    out["stats"] = {{"success_rate_hf_minus_nf", t_test_json(try_paired_t_test(hs, ns))},
                    {"indentation_nf_minus_hf", t_test_json(try_paired_t_test(ni, hi))},
                    {"indentation_sign_test",
                     {{"nf_greater", sign.positive}, {"hf_greater", sign.negative}, {"ties", sign.ties}, {"p", sign.p}}}};
  }
  return out;
}

}  // namespace fth::experiments
