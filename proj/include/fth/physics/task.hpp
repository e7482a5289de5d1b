#pragma once

#include <optional>
#include <string_view>

#include "fth/physics/scene.hpp"

namespace fth::physics {

enum class TaskPhase { InProgress, Success, Failed };
enum class FailReason { None, Dropped, Timeout };

struct TaskParams {
  double timeout = 60.0;          // s
  double stable_speed = 5.0;      // mm/s
  double dwell = 1.0;             // s
  double rest_tolerance = 1.0;    // mm between cube bottom and target top
};

struct TaskStatus {
  TaskPhase phase = TaskPhase::InProgress;
  FailReason reason = FailReason::None;
  double time = 0.0;                    // s, when Success/Failed was decided
  std::optional<double> stable_since;  // start of the current dwell

  bool done() const { return phase != TaskPhase::InProgress; }
  std::string_view label() const;
};

// Pick-and-place state machine. Success and Failed are absorbing.
TaskStatus task_step(const TaskStatus& status, const Scene& scene, double t, const TaskParams& params = {});

bool resting_on_target(const Scene& scene, const TaskParams& params = {});

}  // namespace fth::physics
