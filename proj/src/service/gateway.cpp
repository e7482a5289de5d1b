#include "fth/service/gateway.hpp"

#include <cmath>
#include <limits>

namespace fth::service {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr float kOff = std::numeric_limits<float>::quiet_NaN();

// null (or absent) means heater off.
ordered_json temp_or_null(float v) { return std::isnan(v) ? ordered_json(nullptr) : ordered_json(v); }

bool number(const json& j, const char* key, double& out) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return false;
  out = it->get<double>();
  return true;
}

bool vec3(const json& j, const char* key, physics::Vec3& out) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_array() || it->size() != 3) return false;
  for (int i = 0; i < 3; ++i) {
    if (!(*it)[i].is_number()) return false;
    out[i] = (*it)[i].get<double>();
  }
  return true;
}

ordered_json vec_json(const physics::Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

}  // namespace

std::variant<GatewayCommand, GatewayError> parse_gateway_message(std::string_view text, std::uint64_t now_us) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return GatewayError{"message is not a JSON object"};
  const auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string()) return GatewayError{"missing string field \"type\""};
  const std::string type = type_it->get<std::string>();

  if (type == "step") {
    StepCommand c;
    if (j.contains("ticks")) {
      if (!j["ticks"].is_number_unsigned() || j["ticks"].get<std::uint64_t>() == 0 ||
          j["ticks"].get<std::uint64_t>() > 1'000'000)
        return GatewayError{"\"ticks\" must be an integer in [1, 1000000]"};
      c.ticks = j["ticks"].get<std::uint32_t>();
    }
    return GatewayCommand{c};
  }
  if (type == "proxies") {
    ProxiesCommand c;
    if (!vec3(j, "index", c.proxies.index_pos) || !vec3(j, "thumb", c.proxies.thumb_pos))
      return GatewayError{"proxies need \"index\" and \"thumb\" as [x, y, z] in mm"};
    return GatewayCommand{c};
  }
  if (type == "reset_scene") return GatewayCommand{ResetSceneCommand{}};

  protocol::Frame f;
  f.timestamp_us = now_us;
  if (!j.contains("seq") || !j["seq"].is_number_unsigned() || j["seq"].get<std::uint64_t>() > 0xFFFFFFFFull)
    return GatewayError{"frame messages need an unsigned 32-bit \"seq\""};
  f.seq = j["seq"].get<std::uint32_t>();
  if (j.contains("timestamp_us")) {
    if (!j["timestamp_us"].is_number_unsigned()) return GatewayError{"\"timestamp_us\" must be unsigned"};
    f.timestamp_us = j["timestamp_us"].get<std::uint64_t>();
  }

  if (type == protocol::type_name(protocol::MessageType::IndentationUpdate)) {
    double a = 0, b = 0;
    if (!number(j, "index_mm", a) || !number(j, "thumb_mm", b)) return GatewayError{"indentation needs index_mm and thumb_mm"};
    f.payload = protocol::IndentationUpdate{static_cast<float>(a), static_cast<float>(b)};
  } else if (type == protocol::type_name(protocol::MessageType::TempSetpoint)) {
    auto read = [&](const char* key, float& out) {
      if (!j.contains(key) || j[key].is_null()) {
        out = kOff;
        return true;
      }
      if (!j[key].is_number()) return false;
      out = static_cast<float>(j[key].get<double>());
      return true;
    };
    protocol::TempSetpoint p;
    if (!read("index_c", p.index_c) || !read("thumb_c", p.thumb_c))
      return GatewayError{"setpoint values must be numbers or null"};
    f.payload = p;
  } else if (type == protocol::type_name(protocol::MessageType::HoldPressure)) {
    double kpa = 0;
    if (!number(j, "kpa", kpa)) return GatewayError{"hold_pressure needs kpa"};
    f.payload = protocol::HoldPressure{static_cast<float>(kpa)};
  } else {
    return GatewayError{"unsupported message type \"" + type + "\""};
  }
  return GatewayCommand{FrameCommand{f}};
}

ordered_json frame_to_json(const protocol::Frame& frame) {
  ordered_json j;
  j["type"] = std::string(protocol::type_name(frame.type()));
  j["seq"] = frame.seq;
  j["timestamp_us"] = frame.timestamp_us;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, protocol::IndentationUpdate>) {
          j["index_mm"] = p.index_mm;
          j["thumb_mm"] = p.thumb_mm;
        } else if constexpr (std::is_same_v<T, protocol::TempSetpoint>) {
          j["index_c"] = temp_or_null(p.index_c);
          j["thumb_c"] = temp_or_null(p.thumb_c);
        } else if constexpr (std::is_same_v<T, protocol::Telemetry>) {
          j["temp_c"] = p.temp_c;
          j["pressure_kpa"] = p.pressure_kpa;
          j["duty"] = p.duty;
        } else if constexpr (std::is_same_v<T, protocol::HoldPressure>) {
          j["kpa"] = p.kpa;
        } else {
          j["acked_seq"] = p.acked_seq;
        }
      },
      frame.payload);
  return j;
}

ordered_json scene_to_json(const SceneSnapshot& s) {
  const auto& sc = *s.scene;
  ordered_json j;
  j["type"] = "scene";
  j["time_s"] = sc.time;
  j["cube"] = {{"pos", vec_json(sc.cube_pos)}, {"yaw", sc.cube_yaw}, {"size", sc.cube_size}};
  j["spheres"] = ordered_json::array({vec_json(sc.sphere_pos[0]), vec_json(sc.sphere_pos[1])});
  if (s.proxies) j["proxies"] = ordered_json::array({vec_json(s.proxies->index_pos), vec_json(s.proxies->thumb_pos)});
  j["contact"] = sc.contact_flags;
  j["indentation_mm"] = s.indentation;
  auto stand = [](const physics::Stand& st) {
    return ordered_json{{"center", {st.center_x, st.center_y}}, {"half", {st.half_x, st.half_y}}, {"top", st.top}};
  };
  j["pickup"] = stand(sc.pickup_stand);
  j["target"] = stand(sc.target_stand);
  if (s.status) j["status"] = std::string(s.status->label());
  return j;
}

}  // namespace fth::service
