#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "fth/device/device.hpp"
#include "fth/physics/scene.hpp"
#include "fth/physics/task.hpp"

namespace fth::service {

// Console messages in. Frame-carrying messages use the payload names from
// protocol::type_name; the rest drive the clock and the embedded scene.
struct FrameCommand {
  protocol::Frame frame;
};
struct StepCommand {
  std::uint32_t ticks = 1;
};
struct ProxiesCommand {
  physics::ProxyPair proxies;
};
struct ResetSceneCommand {};

using GatewayCommand = std::variant<FrameCommand, StepCommand, ProxiesCommand, ResetSceneCommand>;

struct GatewayError {
  std::string message;
};

// Parses one text message. `now_us` fills timestamps the console leaves out.
std::variant<GatewayCommand, GatewayError> parse_gateway_message(std::string_view text, std::uint64_t now_us);

nlohmann::ordered_json frame_to_json(const protocol::Frame& frame);

struct SceneSnapshot {
  const physics::Scene* scene = nullptr;
  const physics::ProxyPair* proxies = nullptr;
  const physics::TaskStatus* status = nullptr;
  std::array<double, 2> indentation{0.0, 0.0};
};

nlohmann::ordered_json scene_to_json(const SceneSnapshot& s);

}  // namespace fth::service
