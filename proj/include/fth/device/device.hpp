#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "fth/control/pid.hpp"
#include "fth/device/config.hpp"
#include "fth/plant/thermal.hpp"
#include "fth/protocol/frame.hpp"
#include "fth/protocol/sequence.hpp"

namespace fth::device {

inline constexpr int kIndex = 0;
inline constexpr int kThumb = 1;

struct ChannelState {
  plant::ThermalState thermal;
  double pressure = 0.0;            // kPa
  double commanded_pressure = 0.0;  // kPa
  double indentation = 0.0;         // mm, newest received
  double setpoint = std::numeric_limits<double>::quiet_NaN();  // NaN: heater off
  control::PidState pid;
  bool safety_tripped = false;
  bool contact = false;
  double sensed_temp = 25.0;        // °C, last sensor sample, held between samples
  double duty = 0.0;                // applied after the safety gate
};

using PeerId = std::uint32_t;

struct InboxItem {
  PeerId peer = 0;
  protocol::Frame frame;
};

// Telemetry goes to every subscriber (peer unset); acks to one peer.
struct OutboxItem {
  std::optional<PeerId> peer;
  protocol::Frame frame;
};

struct DeviceCounters {
  std::uint64_t malformed = 0;  // undecodable datagrams and invalid payload values
  std::uint64_t stale = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected_setpoints = 0;
  std::uint64_t unexpected = 0;  // telemetry/ack frames sent to the device
  std::uint64_t telemetry = 0;
};

struct DeviceState {
  std::array<ChannelState, 2> channels;
  std::uint64_t tick = 0;
  double hold_pressure = 0.0;  // kPa floor for both pouches
  std::map<std::pair<PeerId, std::uint8_t>, protocol::SequenceState> streams;
  std::set<PeerId> peers;
  std::uint32_t next_seq = 0;
  DeviceCounters counters;

  std::uint64_t time_us(const LoopRates& rates) const {
    return tick * static_cast<std::uint64_t>(rates.control_period_us());
  }
};

DeviceState initial_state(const DeviceConfig& config);

struct TickOutput {
  DeviceState state;
  std::vector<OutboxItem> outbox;
};

// One control period: apply accepted inbox frames (newest state wins), sample
// the thermistor at the sensing rate, run pressure policy + valve lag and PID
// + safety gate + thermal plant per channel, emit telemetry when due.
TickOutput device_tick(const DeviceConfig& config, DeviceState state, std::span<const InboxItem> inbox,
                       double dt);

// Owning wrapper: buffers inbound datagrams between ticks.
class Device {
 public:
  explicit Device(DeviceConfig config);

  void receive(PeerId peer, std::span<const std::uint8_t> datagram);
  void receive(PeerId peer, const protocol::Frame& frame);
  std::vector<OutboxItem> tick();

  const DeviceState& state() const { return state_; }
  const DeviceConfig& config() const { return config_; }
  double time_s() const { return static_cast<double>(state_.time_us(config_.rates)) * 1e-6; }

 private:
  DeviceConfig config_;
  DeviceState state_;
  std::vector<InboxItem> inbox_;
};

}  // namespace fth::device
