#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "fth/errors.hpp"
#include "fth/numerics/rng.hpp"
#include "fth/plant/features.hpp"
#include "fth/plant/fit.hpp"
#include "fth/plant/force_map.hpp"
#include "fth/plant/pneumatic.hpp"
#include "fth/plant/thermal.hpp"
#include "fth/plant/thermistor.hpp"
#include "fth/plant/trace_io.hpp"

using namespace fth::plant;
using fth::numerics::Rng;

namespace {

ThermalState advance(ThermalState s, const ThermalPlantParams& p, double duty, bool contact, double dt,
                     double duration) {
  const int n = static_cast<int>(std::lround(duration / dt));
  for (int i = 0; i < n; ++i) s = thermal_step(s, p, duty, contact, dt);
  return s;
}

// Right-hand side written out independently of the library.
std::pair<double, double> rhs_oracle(double te, double tf, const ThermalPlantParams& p, double u, bool c) {
  const double q_ef = p.conduct_element_fabric * (te - tf);
  const double q_fa = p.conduct_fabric_ambient * (tf - p.ambient_temp);
  const double q_fs = c ? p.conduct_fabric_skin * (tf - p.skin_core_temp) : 0.0;
  return {(u * p.heater_max_power - q_ef) / p.heat_capacity_element,
          (q_ef - q_fa - q_fs) / p.heat_capacity_fabric};
}

std::vector<TraceSample> sampled(double t_end, double period, auto&& f) {
  std::vector<TraceSample> out;
  const int n = static_cast<int>(std::lround(t_end / period));
  for (int i = 0; i <= n; ++i) out.push_back({i * period, f(i * period)});
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("thermal: ambient state is a fixed point without contact") {
  const auto p = ThermalPlantParams::fitted();
  const ThermalState s0{p.ambient_temp, p.ambient_temp, 0.0};
  const auto s = advance(s0, p, 0.0, false, 0.01, 10.0);
  CHECK(s.element_temp == doctest::Approx(p.ambient_temp).epsilon(1e-15));
  CHECK(s.fabric_temp == doctest::Approx(p.ambient_temp).epsilon(1e-15));
  CHECK(s.time == doctest::Approx(10.0));
}

TEST_CASE("thermal: contact equilibrium near 34 °C and strictly between sinks") {
  const auto p = ThermalPlantParams::fitted();
  const auto s = advance({25.0, 25.0, 0.0}, p, 0.0, true, 0.05, 3000.0);
  CHECK(std::abs(s.fabric_temp - 34.0) < 0.5);
  CHECK(s.fabric_temp == doctest::Approx(passive_equilibrium(p, true)).epsilon(1e-6));
  CHECK(s.fabric_temp > p.ambient_temp);
  CHECK(s.fabric_temp < p.skin_core_temp);
  // Unique: a hot start lands on the same point.
  const auto hot = advance({80.0, 60.0, 0.0}, p, 0.0, true, 0.05, 3000.0);
  CHECK(hot.fabric_temp == doctest::Approx(s.fabric_temp).epsilon(1e-6));
}

TEST_CASE("thermal: rates match the energy balance written out by hand") {
  const auto p = ThermalPlantParams::fitted();
  Rng rng(11);
  for (int k = 0; k < 50; ++k) {
    const double te = rng.uniform(20, 90), tf = rng.uniform(20, 50), u = rng.uniform();
    const bool c = k % 2 == 0;
    const auto r = thermal_rates({te, tf, 0.0}, p, u, c);
    const auto [de, df] = rhs_oracle(te, tf, p, u, c);
    CHECK(r.element == doctest::Approx(de).epsilon(1e-12));
    CHECK(r.fabric == doctest::Approx(df).epsilon(1e-12));
  }
  // Full power from ambient: the aggregate rate is all heater power over total capacity.
  const auto agg = aggregate_heating_rate({25.0, 25.0, 0.0}, p, 1.0, false);
  CHECK(agg == doctest::Approx(p.heater_max_power / (p.heat_capacity_element + p.heat_capacity_fabric)));
}

TEST_CASE("thermal: one 0.1 s RK4 step agrees with a fine-step reference") {
  const auto p = ThermalPlantParams::fitted();
  ThermalState s{30.0, 28.0, 0.0};
  double te = s.element_temp, tf = s.fabric_temp;
  const double h = 1e-4;
  for (int i = 0; i < 1000; ++i) {  // forward Euler on the oracle RHS
    const auto [de, df] = rhs_oracle(te, tf, p, 0.7, true);
    te += h * de;
    tf += h * df;
  }
  const auto one = thermal_step(s, p, 0.7, true, 0.1);
  CHECK(one.element_temp == doctest::Approx(te).epsilon(1e-5));
  CHECK(one.fabric_temp == doctest::Approx(tf).epsilon(1e-5));
}

TEST_CASE("thermal: hottest node and stored heat decrease while passively cooling") {
  const auto p = ThermalPlantParams::fitted();
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const bool contact = trial % 2 == 1;
    // Sinks below both nodes: ambient always, skin only matters in contact.
    const double sink = contact ? p.skin_core_temp : p.ambient_temp;
    const double lo = sink + 1.0;
    if (lo > 99.0) continue;
    ThermalState s{rng.uniform(lo, 100.0), rng.uniform(lo, 100.0), 0.0};
    for (int i = 0; i < 200; ++i) {
      const auto n = thermal_step(s, p, 0.0, contact, 0.01);
      if (std::min(n.element_temp, n.fabric_temp) <= sink) break;
      CHECK(std::max(n.element_temp, n.fabric_temp) < std::max(s.element_temp, s.fabric_temp));
      const double e0 = p.heat_capacity_element * s.element_temp + p.heat_capacity_fabric * s.fabric_temp;
      const double e1 = p.heat_capacity_element * n.element_temp + p.heat_capacity_fabric * n.fabric_temp;
      CHECK(e1 < e0);
      s = n;
    }
  }
  // Equal node temperatures: both fall.
  const auto n = thermal_step({45.0, 45.0, 0.0}, p, 0.0, false, 0.01);
  CHECK(n.element_temp < 45.0);
  CHECK(n.fabric_temp < 45.0);
}

TEST_CASE("thermal: halving dt moves a 100 s endpoint by less than 0.05 °C") {
  const auto p = ThermalPlantParams::fitted();
  for (bool contact : {false, true}) {
    auto run = [&](double dt) {
      ThermalState s{25.0, 25.0, 0.0};
      const int n = static_cast<int>(std::lround(100.0 / dt));
      for (int i = 0; i < n; ++i) s = thermal_step(s, p, s.time < 30.0 ? 0.6 : 0.0, contact, dt);
      return s;
    };
    for (double dt : {0.1, 0.01}) {
      const auto a = run(dt), b = run(dt / 2);
      CHECK(std::abs(a.fabric_temp - b.fabric_temp) < 0.05);
      CHECK(std::abs(a.element_temp - b.element_temp) < 0.05);
    }
  }
}

TEST_CASE("thermal: invalid inputs are rejected") {
  const auto p = ThermalPlantParams::fitted();
  CHECK_THROWS_AS(thermal_step({NAN, 25.0, 0.0}, p, 0.0, false, 0.01), fth::InvalidInput);
  CHECK_THROWS_AS(thermal_step({25.0, 25.0, 0.0}, p, 0.0, false, 0.0), fth::InvalidInput);
  CHECK_THROWS_AS(thermal_step({25.0, 25.0, 0.0}, p, 0.0, false, -1.0), fth::InvalidInput);
  CHECK_THROWS_AS(thermal_step({25.0, 25.0, 0.0}, p, 0.0, false, 0.2), fth::InvalidInput);
  CHECK_THROWS_AS(thermal_step({25.0, 25.0, 0.0}, p, 1.5, false, 0.01), fth::InvalidInput);
  auto bad = p;
  bad.skin_core_temp = bad.ambient_temp - 1.0;
  CHECK_THROWS_AS(bad.validate(), fth::InvalidInput);
  bad = p;
  bad.conduct_fabric_skin = 0.0;
  CHECK_THROWS_AS(bad.validate(), fth::InvalidInput);
}

TEST_CASE("features: linear ramp 25 to 40 over 10 s") {
  auto trace = sampled(20.0, 0.2, [](double t) { return t <= 10.0 ? 25.0 + 1.5 * t : 40.0 - (t - 10.0); });
  const auto f = extract_features(trace, 40.0, 25.0, 10.0);
  REQUIRE(f.target_reached());
  CHECK(*f.time_to_target == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(*f.avg_heating_rate == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(*f.peak_heating_rate == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(*f.avg_heating_rate <= *f.peak_heating_rate + 1e-12);
  CHECK(*f.max_cooling_rate == doctest::Approx(1.0).epsilon(1e-9));
  // 40 - (t-10) reaches 26 at t = 24: outside the trace, so not regained.
  CHECK_FALSE(f.cooling_time_to_baseline.has_value());
}

TEST_CASE("features: exponential decay has max cooling rate 15/tau at heater off") {
  const double tau = 20.0, t_off = 10.0;
  auto temp = [&](double t) { return t <= t_off ? 25.0 + 1.5 * t : 25.0 + 15.0 * std::exp(-(t - t_off) / tau); };
  auto trace = sampled(150.0, 0.2, temp);
  const auto f = extract_features(trace, 40.0, 25.0, t_off);
  // The steepest central difference after heater off straddles t_off + 0.2 s.
  const double oracle = (temp(t_off) - temp(t_off + 0.4)) / 0.4;
  CHECK(*f.max_cooling_rate == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(*f.max_cooling_rate == doctest::Approx(15.0 / tau).epsilon(0.02));
  // Return to within 1 °C: 15 e^{-s/tau} = 1.
  REQUIRE(f.cooling_time_to_baseline.has_value());
  CHECK(*f.cooling_time_to_baseline == doctest::Approx(tau * std::log(15.0)).epsilon(1e-3));
}

TEST_CASE("features: unreachable target is reported, not zeroed") {
  auto trace = sampled(60.0, 0.2, [](double t) { return t < 30 ? 25.0 + 0.3 * t : 34.0 - 0.1 * (t - 30); });
  const auto f = extract_features(trace, 40.0, 25.0);
  CHECK_FALSE(f.target_reached());
  CHECK_FALSE(f.time_to_target.has_value());
  CHECK_FALSE(f.avg_heating_rate.has_value());
  CHECK(f.peak_heating_rate.has_value());
}

TEST_CASE("features: invalid traces") {
  std::vector<TraceSample> one{{0.0, 25.0}};
  CHECK_THROWS_AS(extract_features(one, 40.0, 25.0), fth::InvalidInput);
  std::vector<TraceSample> back{{0.0, 25.0}, {1.0, 26.0}, {0.5, 27.0}};
  CHECK_THROWS_AS(extract_features(back, 40.0, 25.0), fth::InvalidInput);
}

TEST_CASE("fit: fitted parameters reproduce the published features") {
  const auto p = ThermalPlantParams::fitted();
  const auto u = protocol_features(p, false, 25.0);
  const auto c = protocol_features(p, true, 34.0);
  CHECK(std::abs(*u.time_to_target - 8.4) <= 0.8);
  CHECK(std::abs(*u.avg_heating_rate - 1.79) <= 0.15);
  CHECK(std::abs(*u.peak_heating_rate - 3.0) <= 0.4);
  CHECK(std::abs(*u.cooling_time_to_baseline - 90.0) <= 15.0);
  CHECK(std::abs(*u.max_cooling_rate - 0.4) <= 0.1);
  CHECK(std::abs(passive_equilibrium(p, true) - 34.0) <= 0.5);
  CHECK(std::abs(*c.time_to_target - 7.6) <= 0.8);
  CHECK(std::abs(*c.avg_heating_rate - 0.79) <= 0.1);
  CHECK(std::abs(*c.cooling_time_to_baseline - 70.0) <= 15.0);
}

TEST_CASE("fit: round trip from features of random parameters") {
  Rng rng(20240612);
  const auto nominal = ThermalPlantParams::fitted();
  for (int trial = 0; trial < 2; ++trial) {
    auto theta = nominal;
    auto jitter = [&](double v) { return v * std::exp(rng.uniform(-0.15, 0.15)); };
    theta.heat_capacity_element = jitter(theta.heat_capacity_element);
    theta.heat_capacity_fabric = jitter(theta.heat_capacity_fabric);
    theta.conduct_element_fabric = jitter(theta.conduct_element_fabric);
    theta.conduct_fabric_ambient = jitter(theta.conduct_fabric_ambient);
    theta.conduct_fabric_skin = jitter(theta.conduct_fabric_skin);
    CAPTURE(trial);

    auto tu = protocol_features(theta, false, theta.ambient_temp);
    const double eq = passive_equilibrium(theta, true);
    auto tc = protocol_features(theta, true, eq);
    tu.baseline_temp = theta.ambient_temp;
    tc.baseline_temp = eq;
    if (!tu.target_reached() || !tc.target_reached() || !tu.cooling_time_to_baseline ||
        !tc.cooling_time_to_baseline)
      continue;

    ThermalFitOptions opt;
    opt.element_temp_ceiling = 200.0;
    const auto fit = fit_thermal_params(tu, tc, opt);
    const auto fu = protocol_features(fit.params, false, theta.ambient_temp);
    const auto fc = protocol_features(fit.params, true, eq);
    CHECK(rel(*fu.peak_heating_rate, *tu.peak_heating_rate) < 0.01);
    CHECK(rel(*fu.time_to_target, *tu.time_to_target) < 0.01);
    CHECK(rel(*fu.cooling_time_to_baseline, *tu.cooling_time_to_baseline) < 0.01);
    CHECK(rel(*fu.max_cooling_rate, *tu.max_cooling_rate) < 0.01);
    CHECK(rel(*fc.time_to_target, *tc.time_to_target) < 0.01);
    CHECK(rel(*fc.cooling_time_to_baseline, *tc.cooling_time_to_baseline) < 0.01);
    CHECK(rel(passive_equilibrium(fit.params, true), eq) < 0.01);
  }
}

TEST_CASE("fit: infeasible targets raise a fit failure carrying the residual") {
  StepFeatures tu;
  tu.peak_heating_rate = 0.05;
  tu.time_to_target = 2.0;  // 15 °C in 2 s with a 0.05 °C/s peak rate
  tu.max_cooling_rate = 40.0;
  tu.cooling_time_to_baseline = 0.5;
  tu.baseline_temp = 25.0;
  StepFeatures tc = tu;
  tc.baseline_temp = 34.0;
  ThermalFitOptions opt;
  opt.max_evaluations = 400;
  opt.initial_guess.conduct_fabric_ambient = 1e-5;
  opt.initial_guess.conduct_element_fabric = 1e-5;
  try {
    fit_thermal_params(tu, tc, opt);
    FAIL("expected FitFailure");
  } catch (const fth::FitFailure& e) {
    CHECK(e.best_residual() > opt.acceptance_threshold);
  }
}

TEST_CASE("thermistor: 50 kΩ at 25 °C") {
  const ThermistorModel m;
  CHECK(thermistor_resistance(25.0, m) == doctest::Approx(50'000.0).epsilon(1e-12));
  CHECK(thermistor_temperature(50'000.0, m) == doctest::Approx(25.0).epsilon(1e-12));
}

TEST_CASE("thermistor: 40 °C against a direct beta-equation evaluation") {
  const ThermistorModel m;
  // R = 50000 * exp(3950 * (1/313.15 - 1/298.15))
  const double oracle = 50000.0 * std::exp(3950.0 * (1.0 / 313.15 - 1.0 / 298.15));
  CHECK(thermistor_resistance(40.0, m) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("thermistor: inverse and monotone over random temperatures") {
  const ThermistorModel m;
  Rng rng(25);
  double prev_t = -1.0, prev_r = 1e300;
  std::vector<double> temps;
  for (int i = 0; i < 100; ++i) temps.push_back(rng.uniform(0.0, 100.0));
  for (double t : temps) CHECK(std::abs(thermistor_temperature(thermistor_resistance(t, m), m) - t) < 1e-9);
  std::sort(temps.begin(), temps.end());
  for (double t : temps) {
    const double r = thermistor_resistance(t, m);
    if (t > prev_t) CHECK(r < prev_r);
    prev_t = t;
    prev_r = r;
  }
  CHECK_THROWS_AS(thermistor_temperature(0.0, m), fth::InvalidInput);
  CHECK_THROWS_AS(thermistor_temperature(-5.0, m), fth::InvalidInput);
  CHECK_THROWS_AS(thermistor_resistance(120.0, m), fth::InvalidInput);
}

TEST_CASE("thermistor: 12-bit front end error stays below 0.1 °C between 25 and 50 °C") {
  const ThermistorModel m;
  const AdcFrontEnd adc;
  for (double t = 25.0; t <= 50.0; t += 0.01) CHECK(std::abs(sensed_temperature(t, m, adc) - t) <= 0.1);
}

TEST_CASE("pneumatic: fixed point, first-order step and clamp") {
  const PneumaticPlantParams p;
  const auto same = pressure_step(15.0, 15.0, p, 0.01);
  CHECK(same.pressure == 15.0);
  CHECK_FALSE(same.clamped);

  double x = 0.0;
  for (int i = 0; i < 10; ++i) x = pressure_step(x, 20.0, p, 0.01).pressure;
  CHECK(x == doctest::Approx(20.0 * (1.0 - std::exp(-1.0))).epsilon(1e-12));
  CHECK(x == doctest::Approx(12.64).epsilon(1e-3));

  const auto hi = pressure_step(0.0, 70.0, p, 0.1);
  CHECK(hi.clamped);
  CHECK(hi.pressure == doctest::Approx(60.0 * (1.0 - std::exp(-1.0))));
  double y = 0.0;
  for (int i = 0; i < 200; ++i) y = pressure_step(y, 70.0, p, 0.01).pressure;
  CHECK(y == doctest::Approx(60.0));
  CHECK(pressure_step(5.0, -3.0, p, 0.01).clamped);
}

TEST_CASE("force map: anchors, zero pressure and 2 mm ratio") {
  const auto m = ClearanceForceMap::characterized();
  CHECK(force_from_pressure(50.0, 0.0, m) == doctest::Approx(8.93).epsilon(1e-12));
  CHECK(force_from_pressure(50.0, 1.0, m) == doctest::Approx(8.5).epsilon(1e-12));
  CHECK(force_from_pressure(50.0, 2.0, m) == doctest::Approx(7.7).epsilon(1e-12));
  CHECK(force_from_pressure(50.0, 3.0, m) == doctest::Approx(6.6).epsilon(1e-12));
  CHECK(force_from_pressure(50.0, 7.0, m) == doctest::Approx(6.6).epsilon(1e-12));
  for (double d : {0.0, 0.5, 2.0, 9.0}) CHECK(force_from_pressure(0.0, d, m) == 0.0);
  for (double p : {5.0, 20.0, 50.0})
    CHECK(force_from_pressure(p, 2.0, m) / force_from_pressure(p, 0.0, m) == doctest::Approx(0.86).epsilon(0.025));
  CHECK(force_from_pressure(50.0, 1.5, m) == doctest::Approx(0.5 * (8.5 + 7.7)).epsilon(1e-12));
  CHECK_THROWS_AS(force_from_pressure(-1.0, 0.0, m), fth::InvalidInput);
  CHECK_THROWS_AS(force_from_pressure(1.0, -0.1, m), fth::InvalidInput);
}

TEST_CASE("force map: linear in pressure, non-increasing in clearance") {
  const auto m = ClearanceForceMap::characterized();
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(0, 50), b = rng.uniform(0, 50), k = rng.uniform(0, 3);
    const double d = rng.uniform(0, 4);
    CHECK(force_from_pressure(a + b, d, m) ==
          doctest::Approx(force_from_pressure(a, d, m) + force_from_pressure(b, d, m)).epsilon(1e-12));
    CHECK(force_from_pressure(k * a, d, m) == doctest::Approx(k * force_from_pressure(a, d, m)).epsilon(1e-12));
    const double d2 = d + rng.uniform(0, 2);
    CHECK(force_from_pressure(a, d2, m) <= force_from_pressure(a, d, m));
  }
}

TEST_CASE("force map: least-squares fit recovers slopes") {
  std::vector<ForceSample> s;
  const auto ref = ClearanceForceMap::characterized();
  for (double d : ref.clearance_grid)
    for (double p = 0; p <= 50; p += 5) s.push_back({p, force_from_pressure(p, d, ref), d});
  const auto m = fit_force_map(s);
  REQUIRE(m.clearance_grid.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(m.slope_per_clearance[i] == doctest::Approx(ref.slope_per_clearance[i]));
  CHECK(force_from_pressure(50.0, 0.0, m) == doctest::Approx(8.93).epsilon(1e-12));
}

TEST_CASE("trace io: thermal and force CSV round trip") {
  std::vector<TraceSample> trace{{0.0, 25.0}, {0.2, 25.123456789}, {0.4, 26.5}};
  std::stringstream ss;
  write_thermal_csv(ss, trace);
  CHECK(ss.str().rfind("time_s,temp_c\n", 0) == 0);
  const auto back = read_thermal_csv(ss);
  REQUIRE(back.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(back[i].time == doctest::Approx(trace[i].time).epsilon(1e-9));
    CHECK(std::abs(back[i].temp - trace[i].temp) <= 5e-7);
  }

  std::vector<ForceSample> fs{{0.0, 0.0, 0.0}, {50.0, 8.93, 0.0}, {50.0, 7.7, 2.0}};
  std::stringstream fss;
  write_force_csv(fss, fs);
  const auto fback = read_force_csv(fss);
  REQUIRE(fback.size() == 3);
  CHECK(fback[1].force_n == 8.93);
  CHECK(fback[2].clearance_mm == 2.0);

  std::stringstream with_comment("# anchors\npressure_kpa,force_n,clearance_mm\n50,8.93,0\n");
  CHECK(read_force_csv(with_comment).size() == 1);
  std::stringstream bad_header("a,b\n1,2\n");
  CHECK_THROWS_AS(read_thermal_csv(bad_header), fth::InvalidInput);
  std::stringstream bad_row("time_s,temp_c\n1,x\n");
  CHECK_THROWS_AS(read_thermal_csv(bad_row), fth::InvalidInput);
}
