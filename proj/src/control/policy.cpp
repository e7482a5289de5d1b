#include "fth/control/policy.hpp"

#include <algorithm>
#include <cmath>

#include "fth/errors.hpp"

namespace fth::control {

void PressurePolicy::validate() const {
  if (!(max_pressure > 0.0) || !(max_indentation > 0.0) || !(hold_pressure > 0.0) ||
      !std::isfinite(max_pressure) || !std::isfinite(max_indentation))
    throw InvalidInput("pressure policy fields must be positive");
  if (hold_pressure > max_pressure) throw InvalidInput("pressure policy: hold_pressure above max_pressure");
}

double indentation_to_pressure(double indentation_mm, const PressurePolicy& policy) {
  if (!(indentation_mm >= 0.0)) throw InvalidInput("indentation_to_pressure: indentation must be >= 0");
  return std::min(indentation_mm * policy.gain(), policy.max_pressure);
}

}  // namespace fth::control
