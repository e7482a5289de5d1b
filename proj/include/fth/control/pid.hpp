#pragma once

namespace fth::control {

struct PidGains {
  double kp = 0.1;              // duty/°C
  double ki = 0.003;            // duty/(°C·s)
  double kd = 0.0;              // duty·s/°C
  double output_min = 0.0;
  double output_max = 1.0;
  double integral_limit = 0.3;  // duty

  void validate() const;
};

struct PidState {
  double integral = 0.0;    // duty
  double prev_error = 0.0;  // °C
  bool initialized = false;
};

struct PidOutput {
  double duty = 0.0;
  PidState state;
};

// Positional PID. The integral term accumulates ki·e·dt and is clamped to
// ±integral_limit; the derivative acts on the error and is zero on the first
// call after (re)initialization.
PidOutput pid_step(const PidGains& gains, const PidState& state, double setpoint, double measured,
                   double dt);

}  // namespace fth::control
