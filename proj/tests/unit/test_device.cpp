#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "fth/device/device.hpp"
#include "fth/plant/features.hpp"
#include "fth/protocol/frame.hpp"

using namespace fth::device;
using namespace fth::protocol;

namespace {

Frame make(std::uint32_t seq, Payload p) {
  Frame f;
  f.seq = seq;
  f.payload = p;
  return f;
}

std::vector<Telemetry> telemetry_of(const std::vector<OutboxItem>& out) {
  std::vector<Telemetry> t;
  for (const auto& o : out)
    if (const auto* p = std::get_if<Telemetry>(&o.frame.payload)) t.push_back(*p);
  return t;
}

// Sensor samples (time, sensed temperature) of one channel at the sensing rate.
std::vector<fth::plant::TraceSample> run_sensed(Device& d, double seconds, int channel) {
  std::vector<fth::plant::TraceSample> trace;
  const int n = static_cast<int>(std::lround(seconds * d.config().rates.control_hz));
  const int div = d.config().rates.sensing_divider();
  for (int i = 0; i < n; ++i) {
    const double t = d.time_s();
    d.tick();
    if (i % div == 0) trace.push_back({t, d.state().channels[channel].sensed_temp});
  }
  return trace;
}

}  // namespace

TEST_CASE("device: idle from ambient stays at 25 °C") {
  Device d{DeviceConfig{}};
  for (int i = 0; i < 1000; ++i) {
    for (const auto& t : telemetry_of(d.tick())) {
      CHECK(std::abs(t.temp_c[0] - 25.0f) < 0.05f);
      CHECK(std::abs(t.temp_c[1] - 25.0f) < 0.05f);
      CHECK(t.duty[0] == 0.0f);
      CHECK(t.pressure_kpa[0] == 0.0f);
    }
  }
}

TEST_CASE("device: setpoint 40 °C reached within 8.4 ± 0.8 s unloaded and acked") {
  Device d{DeviceConfig{}};
  d.receive(7, encode(make(3, TempSetpoint{40.0f, 40.0f})));
  const auto first = d.tick();
  bool acked = false;
  for (const auto& o : first)
    if (const auto* a = std::get_if<Ack>(&o.frame.payload)) {
      acked = a->acked_seq == 3 && o.peer == 7u;
    }
  CHECK(acked);
  const auto trace = run_sensed(d, 120.0, kIndex);
  const auto f = fth::plant::extract_features(trace, 40.0, 25.0, 120.0);
  REQUIRE(f.target_reached());
  CHECK(std::abs(*f.time_to_target - 8.4) <= 0.8);
  // Held within tolerance after settling.
  for (const auto& s : trace)
    if (s.time > 60.0) CHECK(std::abs(s.temp - 40.0) <= 1.0);
}

TEST_CASE("device: indentation 20 mm drives both pouches to 20 kPa with contact") {
  Device d{DeviceConfig{}};
  d.receive(1, make(0, IndentationUpdate{20.0f, 20.0f}));
  std::vector<Telemetry> t;
  for (int i = 0; i < 200; ++i)
    for (const auto& x : telemetry_of(d.tick())) t.push_back(x);
  CHECK(t.back().pressure_kpa[0] == doctest::Approx(20.0).epsilon(1e-4));
  CHECK(t.back().pressure_kpa[1] == doctest::Approx(20.0).epsilon(1e-4));
  CHECK(d.state().channels[0].contact);
  // Newest state wins: a later release deflates.
  d.receive(1, make(1, IndentationUpdate{0.0f, 0.0f}));
  for (int i = 0; i < 200; ++i) d.tick();
  CHECK(d.state().channels[0].pressure < 0.01);
  CHECK_FALSE(d.state().channels[0].contact);
}

TEST_CASE("device: hold pressure floor, stale and malformed frames") {
  Device d{DeviceConfig{}};
  d.receive(1, make(10, HoldPressure{10.0f}));
  d.receive(1, make(9, HoldPressure{0.0f}));    // stale
  d.receive(1, make(11, HoldPressure{-4.0f}));  // invalid value
  std::vector<std::uint8_t> junk{0xFA, 0x57, 0x01};
  d.receive(1, junk);
  auto bytes = encode(make(12, IndentationUpdate{1.0f, 1.0f}));
  bytes[18] ^= 0x40;
  d.receive(1, bytes);
  d.receive(1, make(13, IndentationUpdate{NAN, 1.0f}));
  for (int i = 0; i < 200; ++i) d.tick();
  const auto& c = d.state().counters;
  CHECK(c.stale == 1);
  CHECK(c.malformed == 4);
  CHECK(d.state().hold_pressure == 10.0);
  CHECK(d.state().channels[0].pressure == doctest::Approx(10.0).epsilon(1e-4));
  // Policy below the floor does not lower it; above the floor it wins.
  d.receive(1, make(14, IndentationUpdate{5.0f, 15.0f}));
  for (int i = 0; i < 200; ++i) d.tick();
  CHECK(d.state().channels[0].commanded_pressure == 10.0);
  CHECK(d.state().channels[1].commanded_pressure == 15.0);
}

TEST_CASE("device: out-of-range setpoints are rejected, NaN turns the heater off") {
  Device d{DeviceConfig{}};
  d.receive(1, make(0, TempSetpoint{60.0f, std::numeric_limits<float>::quiet_NaN()}));
  d.tick();
  CHECK(d.state().counters.rejected_setpoints == 1);
  CHECK(std::isnan(d.state().channels[0].setpoint));
  d.receive(1, make(1, TempSetpoint{42.0f, 42.0f}));
  for (int i = 0; i < 500; ++i) d.tick();
  CHECK(d.state().channels[1].duty > 0.0);
  d.receive(1, make(2, TempSetpoint{NAN, NAN}));
  d.tick();
  CHECK(d.state().channels[1].duty == 0.0);
}

TEST_CASE("device: two clients keep independent newest-seq streams") {
  Device d{DeviceConfig{}};
  d.receive(1, make(100, IndentationUpdate{4.0f, 4.0f}));
  d.receive(2, make(5, IndentationUpdate{8.0f, 8.0f}));   // other peer, own stream
  d.receive(1, make(99, IndentationUpdate{12.0f, 12.0f}));  // stale for peer 1
  d.tick();
  CHECK(d.state().channels[0].indentation == 8.0);
  CHECK(d.state().counters.stale == 1);
  CHECK(d.state().peers.size() == 2);
}

TEST_CASE("device: telemetry timestamps strictly increase at the telemetry period") {
  Device d{DeviceConfig{}};
  std::vector<std::uint64_t> ts;
  for (int i = 0; i < 1000; ++i)
    for (const auto& o : d.tick())
      if (std::holds_alternative<Telemetry>(o.frame.payload)) ts.push_back(o.frame.timestamp_us);
  REQUIRE(ts.size() == 500);
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] - ts[i - 1] == 20'000u);
}

TEST_CASE("device: stepped runs are bit-deterministic") {
  auto run = [] {
    Device d{DeviceConfig{}};
    std::vector<std::vector<std::uint8_t>> wire;
    for (int i = 0; i < 3000; ++i) {
      if (i == 10) d.receive(1, make(1, TempSetpoint{43.5f, 40.5f}));
      if (i % 10 == 0) d.receive(2, make(static_cast<std::uint32_t>(i), IndentationUpdate{i % 200 * 0.1f, 3.0f}));
      for (const auto& o : d.tick()) wire.push_back(encode(o.frame));
    }
    return wire;
  };
  CHECK(run() == run());
}

TEST_CASE("device: sensed temperature error from the 12-bit front end is below 0.1 °C") {
  DeviceConfig cfg;
  for (double t = 25.0; t <= 50.0; t += 0.05)
    CHECK(std::abs(fth::plant::sensed_temperature(t, cfg.thermistor, cfg.adc) - t) <= 0.1);
}

namespace {

// Adversarial gains saturate the heater until the trip; returns the hottest
// sensed sample and checks the gate on every tick.
double adversarial_max_sensed(const DeviceConfig& cfg, bool contact) {
  Device d{cfg};
  if (contact) d.receive(1, make(0, HoldPressure{10.0f}));
  d.receive(1, make(1, TempSetpoint{50.0f, 50.0f}));
  double max_sensed = 0.0;
  for (int i = 0; i < 30000; ++i) {
    d.tick();
    const auto& ch = d.state().channels[kIndex];
    if (ch.sensed_temp >= cfg.control.limits.max_temp) CHECK(ch.duty == 0.0);
    max_sensed = std::max(max_sensed, ch.sensed_temp);
  }
  return max_sensed;
}

DeviceConfig high_gain() {
  DeviceConfig cfg;
  cfg.control.gains.kp = 100.0;
  cfg.control.gains.ki = 1.0;
  return cfg;
}

}  // namespace

TEST_CASE("device: safety gate zeroes duty at or above 50 °C under an adversarial high gain") {
  for (bool contact : {false, true}) {
    CAPTURE(contact);
    CHECK(adversarial_max_sensed(high_gain(), contact) >= 50.0);
  }
}

TEST_CASE("device: sensed overshoot past the trip stays within one control period of full power") {
  const auto cfg = high_gain();
  const double dt = 1.0 / cfg.rates.control_hz;
  const double bound = cfg.control.limits.max_temp + cfg.thermal.heater_max_power * dt /
                                                         (cfg.thermal.heat_capacity_element +
                                                          cfg.thermal.heat_capacity_fabric);
  for (bool contact : {false, true}) {
    CAPTURE(contact);
    const double max_sensed = adversarial_max_sensed(cfg, contact);
    CAPTURE(max_sensed);
    CAPTURE(bound);
    CHECK(max_sensed <= bound);
  }
}
