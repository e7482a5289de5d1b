#pragma once

#include <stdexcept>
#include <string>

namespace fth {

// Precondition violations on public operations (non-finite values,
// out-of-range arguments, malformed configuration).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The model or scene integrated to a non-finite state.
class SimulationDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter identification did not reach its acceptance threshold.
class FitFailure : public std::runtime_error {
 public:
  FitFailure(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace fth
