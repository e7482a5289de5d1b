#include "fth/plant/pneumatic.hpp"

#include <algorithm>
#include <cmath>

#include "fth/errors.hpp"

namespace fth::plant {

void PneumaticPlantParams::validate() const {
  if (!(pressure_time_constant > 0.0)) throw InvalidInput("pneumatic: time constant must be > 0");
  if (!(max_pressure >= 50.0)) throw InvalidInput("pneumatic: max_pressure must be >= 50 kPa");
}

PressureStep pressure_step(double current_kpa, double commanded_kpa, const PneumaticPlantParams& params,
                           double dt) {
  params.validate();
  if (!(dt > 0.0) || !std::isfinite(current_kpa) || !std::isfinite(commanded_kpa))
    throw InvalidInput("pressure_step: non-finite input or non-positive dt");
  PressureStep out;
  const double target = std::clamp(commanded_kpa, 0.0, params.max_pressure);
  out.clamped = target != commanded_kpa;
  const double alpha = 1.0 - std::exp(-dt / params.pressure_time_constant);
  out.pressure = std::clamp(current_kpa + (target - current_kpa) * alpha, 0.0, params.max_pressure);
  return out;
}

}  // namespace fth::plant
