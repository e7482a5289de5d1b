#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace fth::numerics {

struct NelderMeadOptions {
  int max_evaluations = 4000;
  double initial_step = 0.1;   // simplex edge in each coordinate
  double f_tolerance = 1e-12;  // spread of simplex values
  double x_tolerance = 1e-9;   // simplex diameter
  int restarts = 2;            // re-seed the simplex around the best vertex
  std::uint64_t seed = 0;      // drives restart simplex orientation
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Derivative-free downhill simplex minimization. Non-finite objective values
// are treated as +infinity.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

}  // namespace fth::numerics
