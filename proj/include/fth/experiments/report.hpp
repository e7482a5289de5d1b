#pragma once

#include <iosfwd>

#include <json.hpp>

#include "fth/experiments/study.hpp"

namespace fth::experiments {

// Column order is fixed; numbers use fixed precision so files diff cleanly.
//
// thermal: subject,trial,stimulus,response,heating_s,identify_s,record_s,duration_s,felt_c,perceived_c
// manip:   subject,condition,trial,status,duration_s,mean_indentation_mm,contact_samples,max_indentation_mm,grip_parameter
void write_thermal_csv(std::ostream& os, const ThermalStudy& study);
void write_manip_csv(std::ostream& os, const ManipStudy& study);

nlohmann::ordered_json confusion_json(const ConfusionMatrix& m);
nlohmann::ordered_json metrics_json(const ManipMetrics& m);
nlohmann::ordered_json thermal_summary(const ThermalStudy& study, const SubjectModel& subject);
// Includes paired statistics between HF and NF when both were run.
nlohmann::ordered_json manip_summary(const ManipStudy& study);

}  // namespace fth::experiments
