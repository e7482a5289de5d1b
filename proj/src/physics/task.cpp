#include "fth/physics/task.hpp"

#include <cmath>

namespace fth::physics {

std::string_view TaskStatus::label() const {
  switch (phase) {
    case TaskPhase::InProgress: return "in_progress";
    case TaskPhase::Success: return "success";
    case TaskPhase::Failed: return reason == FailReason::Dropped ? "failed_dropped" : "failed_timeout";
  }
  return "?";
}

bool resting_on_target(const Scene& scene, const TaskParams& params) {
  const auto& st = scene.target_stand;
  const double bottom = scene.cube_pos.z() - scene.cube_half();
  return st.contains(scene.cube_pos.x(), scene.cube_pos.y()) && std::abs(bottom - st.top) <= params.rest_tolerance &&
         scene.cube_vel.norm() < params.stable_speed;
}

TaskStatus task_step(const TaskStatus& status, const Scene& scene, double t, const TaskParams& params) {
  if (status.done()) return status;
  TaskStatus next = status;
  if (scene.cube_pos.z() < scene.floor_height + scene.cube_size) {
    next.phase = TaskPhase::Failed;
    next.reason = FailReason::Dropped;
    next.time = t;
    next.stable_since.reset();
    return next;
  }
  if (resting_on_target(scene, params)) {
    if (!next.stable_since) next.stable_since = t;
    // Tolerance absorbs accumulated step-time rounding.
    if (t - *next.stable_since >= params.dwell - 1e-9) {
      next.phase = TaskPhase::Success;
      next.time = t;
      return next;
    }
  } else {
    next.stable_since.reset();
  }
  if (t >= params.timeout) {
    next.phase = TaskPhase::Failed;
    next.reason = FailReason::Timeout;
    next.time = t;
  }
  return next;
}

}  // namespace fth::physics
