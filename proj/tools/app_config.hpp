#pragma once

#include <optional>
#include <string>

#include "fth/control/config.hpp"
#include "fth/device/config.hpp"
#include "fth/experiments/manip.hpp"
#include "fth/experiments/thermal.hpp"

namespace fth::cli {

struct AppConfig {
  device::DeviceConfig device;
  experiments::SubjectModel subject;
  experiments::AgentParams agent;
  experiments::ManipSceneConfig scene;
};

// Reads every section the tool understands, so an unknown key is an error
// whatever the subcommand. Throws InvalidInput listing unknown keys.
AppConfig load_app_config(const std::optional<std::string>& path);

}  // namespace fth::cli
