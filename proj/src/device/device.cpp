#include "fth/device/device.hpp"

#include <algorithm>
#include <cmath>

#include "fth/control/policy.hpp"
#include "fth/control/safety.hpp"
#include "fth/plant/pneumatic.hpp"
#include "fth/plant/thermistor.hpp"

namespace fth::device {
namespace {

using protocol::Frame;

bool valid_indentation(float v) { return std::isfinite(v) && v >= 0.0f; }

void apply_setpoint(const DeviceConfig& config, ChannelState& ch, float value, DeviceCounters& counters) {
  if (std::isnan(value)) {
    ch.setpoint = std::numeric_limits<double>::quiet_NaN();
    ch.pid = {};
    return;
  }
  if (!config.control.limits.setpoint_allowed(value)) {
    ++counters.rejected_setpoints;
    return;
  }
  // Re-arming from heater-off starts the controller from rest.
  if (std::isnan(ch.setpoint)) ch.pid = {};
  ch.setpoint = value;
}

void apply(const DeviceConfig& config, DeviceState& s, const InboxItem& item, std::vector<OutboxItem>& out) {
  const Frame& f = item.frame;
  const auto type = static_cast<std::uint8_t>(f.type());
  if (protocol::accept(s.streams[{item.peer, type}], f.seq) == protocol::Acceptance::DropStale) {
    ++s.counters.stale;
    return;
  }
  s.peers.insert(item.peer);

  if (const auto* p = std::get_if<protocol::IndentationUpdate>(&f.payload)) {
    if (!valid_indentation(p->index_mm) || !valid_indentation(p->thumb_mm)) {
      ++s.counters.malformed;
      return;
    }
    s.channels[kIndex].indentation = p->index_mm;
    s.channels[kThumb].indentation = p->thumb_mm;
  } else if (const auto* p = std::get_if<protocol::TempSetpoint>(&f.payload)) {
    apply_setpoint(config, s.channels[kIndex], p->index_c, s.counters);
    apply_setpoint(config, s.channels[kThumb], p->thumb_c, s.counters);
    Frame ack;
    ack.seq = s.next_seq++;
    ack.timestamp_us = s.time_us(config.rates);
    ack.payload = protocol::Ack{f.seq};
    out.push_back({item.peer, ack});
  } else if (const auto* p = std::get_if<protocol::HoldPressure>(&f.payload)) {
    if (!std::isfinite(p->kpa) || p->kpa < 0.0f || p->kpa > config.control.policy.max_pressure) {
      ++s.counters.malformed;
      return;
    }
    s.hold_pressure = p->kpa;
  } else {
    ++s.counters.unexpected;
    return;
  }
  ++s.counters.accepted;
}

}  // namespace

DeviceState initial_state(const DeviceConfig& config) {
  DeviceState s;
  for (auto& ch : s.channels) {
    ch.thermal = plant::equilibrium_state(config.thermal, false);
    ch.sensed_temp = plant::sensed_temperature(ch.thermal.fabric_temp, config.thermistor, config.adc);
  }
  return s;
}

TickOutput device_tick(const DeviceConfig& config, DeviceState state, std::span<const InboxItem> inbox,
                       double dt) {
  TickOutput out;
  for (const auto& item : inbox) apply(config, state, item, out.outbox);

  const bool sample = state.tick % static_cast<std::uint64_t>(config.rates.sensing_divider()) == 0;
  for (auto& ch : state.channels) {
    if (sample) ch.sensed_temp = plant::sensed_temperature(ch.thermal.fabric_temp, config.thermistor, config.adc);

    ch.commanded_pressure =
        std::max(state.hold_pressure, control::indentation_to_pressure(ch.indentation, config.control.policy));
    ch.pressure = plant::pressure_step(ch.pressure, ch.commanded_pressure, config.pneumatic, dt).pressure;
    ch.contact = ch.pressure > config.contact_threshold;

    double duty = 0.0;
    if (!std::isnan(ch.setpoint)) {
      const auto pid = control::pid_step(config.control.gains, ch.pid, ch.setpoint, ch.sensed_temp, dt);
      ch.pid = pid.state;
      duty = pid.duty;
    }
    const auto gate = control::safety_gate(duty, ch.sensed_temp, config.control.limits, ch.safety_tripped);
    ch.safety_tripped = gate.tripped;
    ch.duty = std::clamp(gate.duty, 0.0, 1.0);
    ch.thermal = plant::thermal_step(ch.thermal, config.thermal, ch.duty, ch.contact, dt);
  }
  ++state.tick;

  if (state.tick % static_cast<std::uint64_t>(config.rates.telemetry_divider()) == 0) {
    protocol::Telemetry t;
    for (int i = 0; i < 2; ++i) {
      t.temp_c[i] = static_cast<float>(state.channels[i].sensed_temp);
      t.pressure_kpa[i] = static_cast<float>(state.channels[i].pressure);
      t.duty[i] = static_cast<float>(state.channels[i].duty);
    }
    Frame f;
    f.seq = state.next_seq++;
    f.timestamp_us = state.time_us(config.rates);
    f.payload = t;
    out.outbox.push_back({std::nullopt, f});
    ++state.counters.telemetry;
  }
  out.state = std::move(state);
  return out;
}

Device::Device(DeviceConfig config) : config_(std::move(config)), state_(initial_state(config_)) {
  config_.validate();
}

void Device::receive(PeerId peer, std::span<const std::uint8_t> datagram) {
  auto decoded = protocol::decode(datagram);
  if (auto* f = std::get_if<protocol::Frame>(&decoded)) {
    inbox_.push_back({peer, std::move(*f)});
  } else {
    ++state_.counters.malformed;
  }
}

void Device::receive(PeerId peer, const protocol::Frame& frame) { inbox_.push_back({peer, frame}); }

std::vector<OutboxItem> Device::tick() {
  auto r = device_tick(config_, std::move(state_), inbox_, 1.0 / config_.rates.control_hz);
  inbox_.clear();
  state_ = std::move(r.state);
  return std::move(r.outbox);
}

}  // namespace fth::device
