#include "fth/control/pid.hpp"

#include <algorithm>
#include <cmath>

#include "fth/errors.hpp"

namespace fth::control {

void PidGains::validate() const {
  for (double v : {kp, ki, kd, output_min, output_max, integral_limit})
    if (!std::isfinite(v)) throw InvalidInput("pid gains must be finite");
  if (kp < 0.0 || ki < 0.0 || kd < 0.0) throw InvalidInput("pid gains must be non-negative");
  if (!(output_min < output_max)) throw InvalidInput("pid output_min must be below output_max");
  if (!(integral_limit > 0.0)) throw InvalidInput("pid integral_limit must be positive");
}

PidOutput pid_step(const PidGains& gains, const PidState& state, double setpoint, double measured,
                   double dt) {
  if (!std::isfinite(setpoint) || !std::isfinite(measured) || !std::isfinite(dt) ||
      !std::isfinite(state.integral) || !std::isfinite(state.prev_error))
    throw InvalidInput("pid_step: non-finite input");
  if (!(dt > 0.0)) throw InvalidInput("pid_step: dt must be positive");

  const double error = setpoint - measured;
  PidOutput out;
  out.state.integral = std::clamp(state.integral + gains.ki * error * dt, -gains.integral_limit,
                                  gains.integral_limit);
  const double derivative = state.initialized ? (error - state.prev_error) / dt : 0.0;
  out.state.prev_error = error;
  out.state.initialized = true;

  const double u = gains.kp * error + out.state.integral + gains.kd * derivative;
  out.duty = std::clamp(u, gains.output_min, gains.output_max);
  return out;
}

}  // namespace fth::control
