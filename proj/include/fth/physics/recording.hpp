#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fth/physics/scene.hpp"
#include "fth/physics/task.hpp"

namespace fth::physics {

struct RecordRow {
  double time = 0.0;
  double index_indent = 0.0;
  double thumb_indent = 0.0;
  Vec3 cube_pos = Vec3::Zero();
  std::string status;
};

RecordRow record_row(const Scene& scene, const ProxyPair& proxies, const TaskStatus& status);

// CSV `time_s,index_indent_mm,thumb_indent_mm,cube_x,cube_y,cube_z,status`.
void write_recording_csv(std::ostream& out, const std::vector<RecordRow>& rows);

}  // namespace fth::physics
