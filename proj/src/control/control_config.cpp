#include "fth/control/control_config.hpp"

namespace fth::control {

ControlConfig load_control_config(const ConfigFile& f) {
  ControlConfig c;
  auto& g = c.gains;
  g.kp = f.get_double("pid.kp", g.kp);
  g.ki = f.get_double("pid.ki", g.ki);
  g.kd = f.get_double("pid.kd", g.kd);
  g.output_min = f.get_double("pid.output_min", g.output_min);
  g.output_max = f.get_double("pid.output_max", g.output_max);
  g.integral_limit = f.get_double("pid.integral_limit", g.integral_limit);

  auto& l = c.limits;
  l.max_temp = f.get_double("safety.max_temp", l.max_temp);
  l.min_setpoint = f.get_double("safety.min_setpoint", l.min_setpoint);
  l.max_setpoint = f.get_double("safety.max_setpoint", l.max_setpoint);
  l.setpoint_tolerance = f.get_double("safety.setpoint_tolerance", l.setpoint_tolerance);
  l.release_hysteresis = f.get_double("safety.release_hysteresis", l.release_hysteresis);

  auto& p = c.policy;
  p.max_pressure = f.get_double("policy.max_pressure", p.max_pressure);
  p.max_indentation = f.get_double("policy.max_indentation", p.max_indentation);
  p.hold_pressure = f.get_double("policy.hold_pressure", p.hold_pressure);

  c.stimuli.warm = f.get_double("stimulus.warm", c.stimuli.warm);
  c.stimuli.hot = f.get_double("stimulus.hot", c.stimuli.hot);

  g.validate();
  l.validate();
  p.validate();
  return c;
}

}  // namespace fth::control
