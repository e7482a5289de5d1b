// Acceptance gate: one PASS/FAIL line per criterion with its runtime.
// Usage: acceptance [path/to/fthsim]

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "fth/control/policy.hpp"
#include "fth/device/device.hpp"
#include "fth/experiments/report.hpp"
#include "fth/experiments/stats.hpp"
#include "fth/experiments/study.hpp"
#include "fth/numerics/rng.hpp"
#include "fth/plant/features.hpp"
#include "fth/plant/fit.hpp"
#include "fth/plant/force_map.hpp"
#include "fth/protocol/frame.hpp"
#include "fth/protocol/sequence.hpp"

namespace fs = std::filesystem;
using namespace fth;
using numerics::Rng;

namespace {

// Collects failed sub-checks of one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void band(const char* name, std::optional<double> v, double centre, double tol) {
    if (!v) {
      failures.push_back(fmt::format("{} missing", name));
    } else if (!(std::abs(*v - centre) <= tol)) {
      failures.push_back(fmt::format("{} = {:.4f}, want {} ± {}", name, *v, centre, tol));
    }
  }
};

struct Criterion {
  std::string name;
  double time_limit_s;  // 0: none
  std::function<void(Check&)> body;
};

device::DeviceConfig stepped() {
  device::DeviceConfig cfg;
  cfg.clock.kind = device::ClockKind::Stepped;
  return cfg;
}

// ---- thermal -------------------------------------------------------------

void thermal_unloaded(Check& c) {
  const auto p = plant::ThermalPlantParams::fitted();
  const auto f = plant::protocol_features(p, false, 25.0);
  c.band("time_to_target", f.time_to_target, 8.4, 0.8);
  c.band("avg_heating_rate", f.avg_heating_rate, 1.79, 0.15);
  c.band("peak_heating_rate", f.peak_heating_rate, 3.0, 0.4);
  c.band("cooling_time_to_baseline", f.cooling_time_to_baseline, 90.0, 15.0);
  c.band("max_cooling_rate", f.max_cooling_rate, 0.4, 0.1);

  // The device itself, sensed through the thermistor chain in stepped mode.
  device::Device d{device::DeviceConfig{}};
  protocol::Frame sp;
  sp.seq = 1;
  sp.payload = protocol::TempSetpoint{40.0f, 40.0f};
  d.receive(1, sp);
  std::optional<double> reached;
  for (int i = 0; i < 3000 && !reached; ++i) {
    d.tick();
    if (d.state().channels[device::kIndex].sensed_temp >= 40.0) reached = d.time_s();
  }
  c.band("device time_to_target", reached, 8.4, 0.8);
}

void thermal_contact(Check& c) {
  const auto p = plant::ThermalPlantParams::fitted();
  c.band("heater-off equilibrium", plant::passive_equilibrium(p, true), 34.0, 0.5);
  const auto f = plant::protocol_features(p, true, 34.0);
  c.band("time_to_target", f.time_to_target, 7.6, 0.8);
  c.band("avg_heating_rate", f.avg_heating_rate, 0.79, 0.1);
  c.band("cooling_time_to_baseline", f.cooling_time_to_baseline, 70.0, 15.0);
}

// ---- force map -----------------------------------------------------------

void force_map(Check& c) {
  const auto m = plant::ClearanceForceMap::characterized();
  c.expect(plant::force_from_pressure(50.0, 0.0, m) == 8.93,
           fmt::format("F(50,0) = {:.17g}, want exactly 8.93", plant::force_from_pressure(50.0, 0.0, m)));
  c.band("F(50,1)", plant::force_from_pressure(50.0, 1.0, m), 8.5, 0.2);
  c.band("F(50,2)", plant::force_from_pressure(50.0, 2.0, m), 7.7, 0.2);
  c.band("F(50,3)", plant::force_from_pressure(50.0, 3.0, m), 6.6, 0.2);
  for (double kpa = 0.5; kpa <= 60.0; kpa += 0.5) {
    const double r = plant::force_from_pressure(kpa, 2.0, m) / plant::force_from_pressure(kpa, 0.0, m);
    if (std::abs(r - 0.86) > 0.02) {
      c.expect(false, fmt::format("ratio at {} kPa = {:.4f}", kpa, r));
      break;
    }
  }
}

// ---- control -------------------------------------------------------------

protocol::Frame frame(std::uint32_t seq, protocol::Payload p) {
  protocol::Frame f;
  f.seq = seq;
  f.payload = p;
  return f;
}

// Worst deviation of the true fabric temperature from `setpoint` over
// [settle, settle + hold] seconds after the setpoint is applied. In contact
// the pouch presses for 600 s with the heater off first.
double hold_error(double setpoint, bool contact, double settle = 60.0, double hold = 180.0) {
  device::Device d{device::DeviceConfig{}};
  const double hz = d.config().rates.control_hz;
  if (contact) {
    d.receive(1, frame(1, protocol::HoldPressure{10.0f}));
    for (int i = 0; i < static_cast<int>(600 * hz); ++i) d.tick();
  }
  const auto sp = static_cast<float>(setpoint);
  d.receive(1, frame(2, protocol::TempSetpoint{sp, sp}));
  double worst = 0.0;
  const int n = static_cast<int>((settle + hold) * hz);
  for (int i = 0; i < n; ++i) {
    d.tick();
    if (i >= static_cast<int>(settle * hz))
      for (const auto& ch : d.state().channels) worst = std::max(worst, std::abs(ch.thermal.fabric_temp - setpoint));
  }
  return worst;
}

void control_hold(Check& c) {
  for (bool contact : {false, true})
    for (int sp = 30; sp <= 45; ++sp) {
      const double e = hold_error(sp, contact);
      c.expect(e <= 1.0, fmt::format("{} {} °C: worst error {:.2f} °C", contact ? "contact" : "unloaded", sp, e));
    }
}

void safety_gate(Check& c) {
  device::DeviceConfig cfg;
  cfg.control.gains.kp = 100.0;
  cfg.control.gains.ki = 1.0;
  for (bool contact : {false, true}) {
    device::Device d{cfg};
    if (contact) d.receive(1, frame(1, protocol::HoldPressure{10.0f}));
    d.receive(1, frame(2, protocol::TempSetpoint{50.0f, 50.0f}));
    int hot_ticks = 0, violations = 0;
    for (int i = 0; i < 30000; ++i) {
      d.tick();
      for (const auto& ch : d.state().channels)
        if (ch.sensed_temp >= cfg.control.limits.max_temp) {
          ++hot_ticks;
          if (ch.duty != 0.0) ++violations;
        }
    }
    c.expect(hot_ticks > 0, "adversarial run never reached 50 °C");
    c.expect(violations == 0, fmt::format("{} ticks with duty > 0 at ≥ 50 °C", violations));
  }
}

// ---- policy --------------------------------------------------------------

void policy(Check& c) {
  const control::PressurePolicy p;
  const double in[] = {0, 10, 20, 35};
  const double want[] = {0, 10, 20, 20};
  for (int i = 0; i < 4; ++i) {
    const double got = control::indentation_to_pressure(in[i], p);
    c.expect(got == want[i], fmt::format("{} mm -> {} kPa, want {}", in[i], got, want[i]));
  }
}

// ---- protocol ------------------------------------------------------------

float random_float(Rng& rng) {
  switch (rng.below(6)) {
    case 0: return std::numeric_limits<float>::quiet_NaN();
    case 1: return std::bit_cast<float>(static_cast<std::uint32_t>(rng.next_u64()));
    default: return static_cast<float>(rng.uniform(-100.0, 100.0));
  }
}

protocol::Frame random_frame(Rng& rng) {
  protocol::Frame f;
  f.seq = static_cast<std::uint32_t>(rng.next_u64());
  f.timestamp_us = rng.next_u64();
  switch (rng.below(5)) {
    case 0: f.payload = protocol::IndentationUpdate{random_float(rng), random_float(rng)}; break;
    case 1: f.payload = protocol::TempSetpoint{random_float(rng), random_float(rng)}; break;
    case 2: {
      protocol::Telemetry t;
      for (int i = 0; i < 2; ++i) {
        t.temp_c[i] = random_float(rng);
        t.pressure_kpa[i] = random_float(rng);
        t.duty[i] = random_float(rng);
      }
      f.payload = t;
      break;
    }
    case 3: f.payload = protocol::HoldPressure{random_float(rng)}; break;
    default: f.payload = protocol::Ack{static_cast<std::uint32_t>(rng.next_u64())}; break;
  }
  return f;
}

void protocol_codec(Check& c) {
  Rng rng(20240611);
  int mismatches = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto f = random_frame(rng);
    const auto bytes = protocol::encode(f);
    const auto back = protocol::decode(bytes);
    const auto* g = std::get_if<protocol::Frame>(&back);
    if (!g || !(*g == f) || bytes.size() != protocol::frame_size(f.type())) ++mismatches;
  }
  c.expect(mismatches == 0, fmt::format("{} of 100000 round trips differ", mismatches));

  int accepted = 0;
  for (int i = 0; i < 10000; ++i) {
    auto bytes = protocol::encode(random_frame(rng));
    const auto bit = rng.below(bytes.size() * 8);
    bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    if (!std::holds_alternative<protocol::DecodeError>(protocol::decode(bytes))) ++accepted;
  }
  c.expect(accepted == 0, fmt::format("{} of 10000 corrupted frames decoded", accepted));

  protocol::SequenceState s{0xFFFFFFFEu, true};
  c.expect(protocol::accept(s, 0xFFFFFFFFu) == protocol::Acceptance::Keep, "0xFFFFFFFF after 0xFFFFFFFE");
  c.expect(protocol::accept(s, 0) == protocol::Acceptance::Keep, "0 after 0xFFFFFFFF");
  c.expect(protocol::accept(s, 1) == protocol::Acceptance::Keep, "1 after 0");
  c.expect(protocol::accept(s, 0xFFFFFFFFu) == protocol::Acceptance::DropStale, "0xFFFFFFFF after 1 is stale");

  // Same case through the device: the hold pressure sent after the wrap wins.
  device::Device d{device::DeviceConfig{}};
  d.receive(1, frame(0xFFFFFFFFu, protocol::HoldPressure{5.0f}));
  d.tick();
  d.receive(1, frame(0, protocol::HoldPressure{15.0f}));
  d.tick();
  c.expect(d.state().hold_pressure == 15.0, "device kept the pre-wrap frame");
}

// ---- statistics ----------------------------------------------------------

// Two-tailed p by Simpson integration of the t density.
double quadrature_p(double t, double df) {
  const double k = std::exp(std::lgamma(0.5 * (df + 1)) - std::lgamma(0.5 * df)) / std::sqrt(df * std::numbers::pi);
  auto pdf = [&](double x) { return k * std::pow(1.0 + x * x / df, -0.5 * (df + 1)); };
  const double a = std::abs(t);
  const int n = 20000;
  const double h = a / n;
  double s = pdf(0.0) + pdf(a);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * pdf(i * h);
  return 1.0 - 2.0 * s * h / 3.0;
}

double oracle_t(const std::vector<double>& a, const std::vector<double>& b) {
  long double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m += (long double)a[i] - b[i];
  m /= a.size();
  long double v = 0;
  for (std::size_t i = 0; i < a.size(); ++i) v += ((long double)a[i] - b[i] - m) * ((long double)a[i] - b[i] - m);
  v /= (a.size() - 1);
  return static_cast<double>(m / std::sqrt(v / a.size()));
}

void statistics(Check& c) {
  const std::vector<double> a{1, 2, 3}, z{0, 0, 0};
  const auto r = experiments::paired_t_test(a, z);
  c.band("t", r.t, 3.4641, 1e-4);
  c.expect(r.df == 2.0, fmt::format("df = {}", r.df));
  c.band("p vs quadrature", r.p, quadrature_p(r.t, r.df), 1e-4);

  Rng rng(99);
  int bad = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 3 + rng.below(28);
    std::vector<double> x(n), y(n);
    const double shift = rng.uniform(-2.0, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal(10.0, 3.0);
      y[i] = x[i] - shift + rng.normal(0.0, 1.5);
    }
    const auto t = experiments::paired_t_test(x, y);
    const double ot = oracle_t(x, y);
    if (std::abs(t.t - ot) > 1e-9 * std::max(1.0, std::abs(ot)) || t.df != n - 1.0 ||
        std::abs(t.p - quadrature_p(ot, n - 1.0)) > 1e-4)
      ++bad;
  }
  c.expect(bad == 0, fmt::format("{} of 100 sweep datasets disagree with the oracle", bad));
}

// ---- determinism ---------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void determinism(Check& c, const std::string& fthsim) {
  const fs::path root = fs::temp_directory_path() / fmt::format("fth_acceptance_{}", std::random_device{}());
  std::vector<fs::path> dirs{root / "a", root / "b"};
  if (!fthsim.empty()) {
    for (const auto& d : dirs) {
      const std::string cmd = fmt::format("\"{}\" experiment-manip --seed 7 --out-dir \"{}\" > /dev/null", fthsim,
                                          d.string());
      c.expect(std::system(cmd.c_str()) == 0, "fthsim experiment-manip exited non-zero");
    }
  } else {
    // No binary given: the same pipeline in-process.
    for (const auto& d : dirs) {
      fs::create_directories(d);
      const auto study = experiments::run_manip_study(
          7, 1, {experiments::Condition::HF, experiments::Condition::NF}, {}, {}, stepped());
      std::ofstream csv(d / "manip_trials.csv", std::ios::binary);
      experiments::write_manip_csv(csv, study);
      std::ofstream json(d / "manip_summary.json", std::ios::binary);
      json << experiments::manip_summary(study).dump(2) << '\n';
    }
  }
  for (const char* name : {"manip_trials.csv", "manip_summary.json"}) {
    const auto x = slurp(dirs[0] / name), y = slurp(dirs[1] / name);
    c.expect(!x.empty(), fmt::format("{} empty or missing", name));
    c.expect(x == y, fmt::format("{} differs between runs", name));
  }
  std::error_code ec;
  fs::remove_all(root, ec);
}

// ---- substituted human-study properties ----------------------------------

void noiseless_subject(Check& c) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    device::Device d{stepped()};
    const auto recs = experiments::run_thermal_session(experiments::plan_thermal(seed),
                                                       experiments::SubjectModel::noiseless(), d, seed);
    const auto m = experiments::confusion_matrix(recs);
    const int correct = m.counts[0][0] + m.counts[1][1] + m.counts[2][2];
    c.expect(correct == 18 && m.total == 18, fmt::format("seed {}: {}/{} correct", seed, correct, m.total));
  }
}

void hf_vs_nf(Check& c) {
  std::vector<double> hf, nf;
  int hf_success = 0, nf_success = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto study = experiments::run_manip_study(seed, 1, {experiments::Condition::HF, experiments::Condition::NF},
                                                    {}, {}, stepped());
    const auto& h = study.sessions[0].metrics;
    const auto& n = study.sessions[1].metrics;
    c.expect(h.avg_indentation && n.avg_indentation, fmt::format("seed {}: no contact samples", seed));
    if (!h.avg_indentation || !n.avg_indentation) return;
    hf.push_back(*h.avg_indentation);
    nf.push_back(*n.avg_indentation);
    hf_success += h.successes;
    nf_success += n.successes;
  }
  const auto s = experiments::sign_test(nf, hf);
  double hf_mean = 0, nf_mean = 0;
  for (std::size_t i = 0; i < hf.size(); ++i) {
    hf_mean += hf[i] / hf.size();
    nf_mean += nf[i] / nf.size();
  }
  c.expect(hf_success >= nf_success, fmt::format("successes HF {} < NF {}", hf_success, nf_success));
  c.expect(hf_mean < nf_mean, fmt::format("mean indentation HF {:.3f} ≥ NF {:.3f}", hf_mean, nf_mean));
  c.expect(s.p < 0.05 && s.positive > s.negative,
           fmt::format("sign test NF>HF {}/{} p = {:.3g}", s.positive, s.negative, s.p));
  fmt::print("  info: successes HF {}/300 NF {}/300, indentation HF {:.2f} NF {:.2f} mm, sign test {}:{} p={:.2g}\n",
             hf_success, nf_success, hf_mean, nf_mean, s.positive, s.negative, s.p);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string fthsim = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> criteria{
      {"thermal fit, unloaded", 5.0, thermal_unloaded},
      {"thermal fit, contact", 0.0, thermal_contact},
      {"force map", 0.0, force_map},
      {"control: ±1 °C hold over 30-45 °C, both conditions", 0.0, control_hold},
      {"control: safety gate zero duty at ≥ 50 °C", 0.0, safety_gate},
      {"policy: 0/10/20/35 mm -> 0/10/20/20 kPa", 0.0, policy},
      {"protocol: round trip, bit flips, wraparound", 10.0, protocol_codec},
      {"statistics: paired t and oracle sweep", 0.0, statistics},
      {"end-to-end determinism: experiment-manip --seed 7", 0.0, [&](Check& c) { determinism(c, fthsim); }},
      {"noiseless subject scores 18/18", 0.0, noiseless_subject},
      {"HF vs NF: success and indentation over seeds 1-20", 0.0, hf_vs_nf},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.failures.push_back(fmt::format("exception: {}", e.what()));
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.time_limit_s > 0.0 && dt >= cr.time_limit_s)
      c.failures.push_back(fmt::format("runtime {:.2f} s over the {:.0f} s limit", dt, cr.time_limit_s));
    const bool ok = c.failures.empty();
    failed += !ok;
    fmt::print("{} {} ({:.2f} s)\n", ok ? "PASS" : "FAIL", cr.name, dt);
    for (const auto& f : c.failures) fmt::print("  - {}\n", f);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
