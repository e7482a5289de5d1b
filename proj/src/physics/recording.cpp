#include "fth/physics/recording.hpp"

#include <ostream>

#include <fmt/format.h>

namespace fth::physics {

RecordRow record_row(const Scene& scene, const ProxyPair& proxies, const TaskStatus& status) {
  RecordRow r;
  r.time = scene.time;
  r.index_indent = contact_indentation(proxies[0], scene.sphere_pos[0], scene.contact_flags[0]);
  r.thumb_indent = contact_indentation(proxies[1], scene.sphere_pos[1], scene.contact_flags[1]);
  r.cube_pos = scene.cube_pos;
  r.status = std::string(status.label());
  return r;
}

void write_recording_csv(std::ostream& out, const std::vector<RecordRow>& rows) {
  out << "time_s,index_indent_mm,thumb_indent_mm,cube_x,cube_y,cube_z,status\n";
  for (const auto& r : rows)
    out << fmt::format("{:.3f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{}\n", r.time, r.index_indent, r.thumb_indent,
                       r.cube_pos.x(), r.cube_pos.y(), r.cube_pos.z(), r.status);
}

}  // namespace fth::physics
