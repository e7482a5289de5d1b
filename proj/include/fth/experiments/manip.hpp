#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fth/device/device.hpp"
#include "fth/physics/scene.hpp"
#include "fth/physics/task.hpp"
#include "fth/plant/force_map.hpp"

namespace fth::experiments {

// HF: haptic feedback through the device. NF: vision only.
enum class Condition : std::uint8_t { HF, NF };

std::string_view to_string(Condition c);
std::optional<Condition> parse_condition(std::string_view text);

// Scripted pick-and-place participant. Times in s, lengths in mm.
struct AgentParams {
  double approach_time = 1.0;
  double close_time = 0.5;
  double squeeze_time = 0.5;    // NF ramp to the chosen depth
  double settle_max = 2.0;      // HF: longest wait for the force servo to settle
  double lift_height = 50.0;
  double lift_time = 1.0;
  double transport_time = 2.0;
  double lower_time = 1.0;
  double release_time = 0.5;
  double retract_height = 40.0;
  double retract_time = 1.0;
  double open_clearance = 15.0;   // fingertip gap to the faces while open
  double place_clearance = 0.5;   // cube bottom above the target top at release
  double placement_sd = 3.0;      // xy aiming error

  // NF: squeeze depth picked from vision, per trial.
  double nf_depth_mean = 9.0;
  double nf_depth_sd = 7.0;
  double nf_depth_max = 20.0;

  // HF: servo the felt fingertip force to a target.
  double hf_target_force = 1.0;    // N
  double hf_force_bias_sd = 0.1;   // relative, per trial
  double hf_force_noise_sd = 0.02; // N, per sample
  double hf_servo_gain = 20.0;     // mm/s per N
  double hf_max_rate = 30.0;       // mm/s
  double hf_settle_band = 0.05;    // relative
  double hf_settle_time = 0.2;     // s
  double felt_clearance = 2.0;     // mm, fingerpad gap used by the force map

  void validate() const;
  // Same script with every noise source removed.
  static AgentParams ideal();
};

struct ManipPlan {
  Condition condition = Condition::HF;
  int trials = 15;
  double trial_timeout = 60.0;  // s
  AgentParams agent;

  void validate() const;
};

struct ManipSceneConfig {
  physics::CouplingParams coupling;
  physics::ContactParams contact;
  physics::TaskParams task;
  plant::ClearanceForceMap force_map = plant::ClearanceForceMap::characterized();
  double physics_dt = 0.001;  // s
  int substeps = 10;          // physics steps per agent update

  void validate() const;
  double agent_period() const { return physics_dt * substeps; }
};

struct ManipTrialRecord {
  int trial = 0;
  Condition condition = Condition::HF;
  std::string status;  // TaskStatus label
  bool success = false;
  double duration = 0.0;  // s
  std::optional<double> mean_indentation;  // mm, over finger samples in contact
  int contact_samples = 0;
  double max_indentation = 0.0;  // mm
  double grip_parameter = 0.0;   // NF chosen depth (mm) or HF force bias factor
};

// HF requires a stepped device whose control period equals the agent
// period; NF ignores `device`. Timeouts are recorded and the session goes on.
std::vector<ManipTrialRecord> run_manip_session(const ManipPlan& plan, const ManipSceneConfig& scene_config,
                                                device::Device* device, std::uint64_t seed);

struct ManipMetrics {
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double total_time = 0.0;                    // s over all trials
  std::optional<double> avg_time_to_success;  // total time / successes
  std::optional<double> avg_indentation;      // mm, pooled over every finger sample in contact
};

ManipMetrics manip_metrics(const std::vector<ManipTrialRecord>& records);

}  // namespace fth::experiments
