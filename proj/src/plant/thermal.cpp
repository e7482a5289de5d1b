#include "fth/plant/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fth/errors.hpp"

namespace fth::plant {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw InvalidInput(std::string("thermal params: ") + name + " must be finite and > 0");
}

bool finite(const ThermalState& s) {
  return std::isfinite(s.element_temp) && std::isfinite(s.fabric_temp) && std::isfinite(s.time);
}

ThermalRates rates_at(double te, double tf, const ThermalPlantParams& p, double duty,
                      bool contact) {
  const double q_ef = p.conduct_element_fabric * (te - tf);
  double q_out = p.conduct_fabric_ambient * (tf - p.ambient_temp);
  if (contact) q_out += p.conduct_fabric_skin * (tf - p.skin_core_temp);
  return {(duty * p.heater_max_power - q_ef) / p.heat_capacity_element,
          (q_ef - q_out) / p.heat_capacity_fabric};
}

}  // namespace

void ThermalPlantParams::validate() const {
  require_positive(heat_capacity_element, "heat_capacity_element");
  require_positive(heat_capacity_fabric, "heat_capacity_fabric");
  require_positive(conduct_element_fabric, "conduct_element_fabric");
  require_positive(conduct_fabric_ambient, "conduct_fabric_ambient");
  require_positive(conduct_fabric_skin, "conduct_fabric_skin");
  require_positive(heater_max_power, "heater_max_power");
  if (!std::isfinite(ambient_temp) || !std::isfinite(skin_core_temp) ||
      !(ambient_temp < skin_core_temp))
    throw InvalidInput("thermal params: ambient_temp must be below skin_core_temp");
}

ThermalPlantParams ThermalPlantParams::fitted() {
  ThermalPlantParams p;
  // Output of fit_thermal_params(published_unloaded_targets(),
  // published_contact_targets()) with default options.
  p.heat_capacity_element = 0.12953379;
  p.heat_capacity_fabric = 0.0201565951;
  p.conduct_element_fabric = 0.00487793819;
  p.conduct_fabric_ambient = 0.0176751687;
  p.conduct_fabric_skin = 0.00105771976;
  p.ambient_temp = 25.0;
  p.skin_core_temp = 187.667074;
  p.heater_max_power = 2.0;
  return p;
}

ThermalRates thermal_rates(const ThermalState& state, const ThermalPlantParams& params,
                           double heater_duty, bool contact) {
  return rates_at(state.element_temp, state.fabric_temp, params, heater_duty, contact);
}

ThermalState thermal_step(const ThermalState& state, const ThermalPlantParams& params,
                          double heater_duty, bool contact, double dt) {
  if (!finite(state)) throw InvalidInput("thermal_step: non-finite state");
  if (!(dt > 0.0) || dt > kMaxThermalStep) throw InvalidInput("thermal_step: dt must be in (0, 0.1] s");
  if (!(heater_duty >= 0.0 && heater_duty <= 1.0))
    throw InvalidInput("thermal_step: duty must be in [0, 1]");

  const double te = state.element_temp, tf = state.fabric_temp;
  const auto k1 = rates_at(te, tf, params, heater_duty, contact);
  const auto k2 = rates_at(te + 0.5 * dt * k1.element, tf + 0.5 * dt * k1.fabric, params,
                           heater_duty, contact);
  const auto k3 = rates_at(te + 0.5 * dt * k2.element, tf + 0.5 * dt * k2.fabric, params,
                           heater_duty, contact);
  const auto k4 = rates_at(te + dt * k3.element, tf + dt * k3.fabric, params, heater_duty,
                           contact);
  ThermalState next;
  next.element_temp = te + dt / 6.0 * (k1.element + 2.0 * k2.element + 2.0 * k3.element + k4.element);
  next.fabric_temp = tf + dt / 6.0 * (k1.fabric + 2.0 * k2.fabric + 2.0 * k3.fabric + k4.fabric);
  next.time = state.time + dt;
  return next;
}

double aggregate_heating_rate(const ThermalState& state, const ThermalPlantParams& params,
                              double heater_duty, bool contact) {
  double q_out = params.conduct_fabric_ambient * (state.fabric_temp - params.ambient_temp);
  if (contact) q_out += params.conduct_fabric_skin * (state.fabric_temp - params.skin_core_temp);
  return (heater_duty * params.heater_max_power - q_out) /
         (params.heat_capacity_element + params.heat_capacity_fabric);
}

double passive_equilibrium(const ThermalPlantParams& params, bool contact) {
  if (!contact) return params.ambient_temp;
  const double ga = params.conduct_fabric_ambient, gs = params.conduct_fabric_skin;
  return (ga * params.ambient_temp + gs * params.skin_core_temp) / (ga + gs);
}

ThermalState equilibrium_state(const ThermalPlantParams& params, bool contact) {
  const double t = passive_equilibrium(params, contact);
  return {t, t, 0.0};
}

double holding_duty(const ThermalPlantParams& params, bool contact, double temp) {
  double q = params.conduct_fabric_ambient * (temp - params.ambient_temp);
  if (contact) q += params.conduct_fabric_skin * (temp - params.skin_core_temp);
  return q / params.heater_max_power;
}

ProtocolRun simulate_step_protocol(const ThermalPlantParams& params, bool contact,
                                   const StepProtocol& protocol) {
  const auto heat_steps = static_cast<long>(std::llround(protocol.heat_duration / protocol.dt));
  const auto total_steps = static_cast<long>(
      std::llround((protocol.heat_duration + protocol.cool_duration) / protocol.dt));
  const auto sample_every = std::max(1L, static_cast<long>(std::llround(protocol.sample_period / protocol.dt)));
  const double feed_forward = holding_duty(params, contact, protocol.target);

  ProtocolRun run;
  run.trace.reserve(static_cast<std::size_t>(total_steps / sample_every + 1));
  run.heater_off_time = static_cast<double>(heat_steps) * protocol.dt;

  ThermalState s = equilibrium_state(params, contact);
  run.max_element_temp = s.element_temp;
  run.max_fabric_temp = s.fabric_temp;
  for (long k = 0; k <= total_steps; ++k) {
    s.time = static_cast<double>(k) * protocol.dt;
    if (k % sample_every == 0) run.trace.push_back({s.time, s.fabric_temp});
    if (k == total_steps) break;
    if (protocol.stop_below && k >= heat_steps && s.fabric_temp < *protocol.stop_below &&
        k % sample_every == 0)
      break;
    double duty = 0.0;
    if (k < heat_steps)
      duty = std::clamp(feed_forward + protocol.regulator_gain * (protocol.target - s.fabric_temp),
                        0.0, 1.0);
    s = thermal_step(s, params, duty, contact, protocol.dt);
    if (!std::isfinite(s.fabric_temp) || !std::isfinite(s.element_temp))
      throw SimulationDiverged("step protocol: non-finite temperature");
    run.max_element_temp = std::max(run.max_element_temp, s.element_temp);
    run.max_fabric_temp = std::max(run.max_fabric_temp, s.fabric_temp);
  }
  return run;
}

}  // namespace fth::plant
