#include "fth/plant/fit.hpp"

#include <cmath>
#include <optional>
#include <vector>

#include "fth/errors.hpp"
#include "fth/numerics/nelder_mead.hpp"

namespace fth::plant {
namespace {

constexpr double kMissingFeaturePenalty = 1e3;

double term(const std::optional<double>& target, const std::optional<double>& actual, double weight) {
  if (!target || weight == 0.0) return 0.0;
  if (!actual) return kMissingFeaturePenalty;
  const double rel = (*actual - *target) / *target;
  return weight * rel * rel;
}

double feature_error(const StepFeatures& target, const StepFeatures& actual, const FeatureWeights& w) {
  return term(target.peak_heating_rate, actual.peak_heating_rate, w.peak_heating_rate) +
         term(target.time_to_target, actual.time_to_target, w.time_to_target) +
         term(target.avg_heating_rate, actual.avg_heating_rate, w.avg_heating_rate) +
         term(target.cooling_time_to_baseline, actual.cooling_time_to_baseline,
              w.cooling_time_to_baseline) +
         term(target.max_cooling_rate, actual.max_cooling_rate, w.max_cooling_rate);
}

std::vector<double> encode(const ThermalPlantParams& p) {
  return {std::log(p.heat_capacity_element), std::log(p.heat_capacity_fabric),
          std::log(p.conduct_element_fabric), std::log(p.conduct_fabric_ambient),
          std::log(p.conduct_fabric_skin),   std::log(p.skin_core_temp - p.ambient_temp)};
}

ThermalPlantParams decode(const std::vector<double>& x, const ThermalPlantParams& fixed) {
  ThermalPlantParams p = fixed;
  p.heat_capacity_element = std::exp(x[0]);
  p.heat_capacity_fabric = std::exp(x[1]);
  p.conduct_element_fabric = std::exp(x[2]);
  p.conduct_fabric_ambient = std::exp(x[3]);
  p.conduct_fabric_skin = std::exp(x[4]);
  p.skin_core_temp = p.ambient_temp + std::exp(x[5]);
  return p;
}

double contact_baseline(const ThermalPlantParams& params, const StepFeatures& targets) {
  return targets.baseline_temp ? *targets.baseline_temp : passive_equilibrium(params, true);
}

struct Evaluation {
  double residual;
  StepFeatures unloaded;
  StepFeatures contact;
};

Evaluation evaluate(const ThermalPlantParams& params, const StepFeatures& tu, const StepFeatures& tc,
                    const ThermalFitOptions& options) {
  const double baseline_u = tu.baseline_temp.value_or(params.ambient_temp);
  const double baseline_c = contact_baseline(params, tc);
  // Nothing after the return to baseline feeds a feature.
  StepProtocol protocol_u = options.protocol, protocol_c = options.protocol;
  protocol_u.stop_below = baseline_u + kBaselineBand - 0.25;
  protocol_c.stop_below = baseline_c + kBaselineBand - 0.25;
  const auto run_u = simulate_step_protocol(params, false, protocol_u);
  const auto run_c = simulate_step_protocol(params, true, protocol_c);
  Evaluation e;
  e.unloaded = extract_features(run_u.trace, options.protocol.target, baseline_u, run_u.heater_off_time);
  e.contact = extract_features(run_c.trace, options.protocol.target, baseline_c, run_c.heater_off_time);
  // The contact baseline feature is the model's own passive equilibrium.
  e.unloaded.baseline_temp = passive_equilibrium(params, false);
  e.contact.baseline_temp = passive_equilibrium(params, true);

  double r = feature_error(tu, e.unloaded, options.weights) + feature_error(tc, e.contact, options.weights);
  r += term(tc.baseline_temp, e.contact.baseline_temp, options.weights.baseline_temp);
  const double hottest = std::max(run_u.max_element_temp, run_c.max_element_temp);
  if (hottest > options.element_temp_ceiling) {
    const double excess = (hottest - options.element_temp_ceiling) / 5.0;
    r += excess * excess;
  }
  e.residual = r;
  return e;
}

}  // namespace

ThermalPlantParams ThermalFitOptions::default_initial_guess() {
  ThermalPlantParams p;
  p.heat_capacity_element = 0.13;
  p.heat_capacity_fabric = 0.02;
  p.conduct_element_fabric = 0.005;
  p.conduct_fabric_ambient = 0.018;
  p.conduct_fabric_skin = 0.001;
  p.ambient_temp = 25.0;
  p.skin_core_temp = 180.0;
  p.heater_max_power = 2.0;
  return p;
}

StepFeatures protocol_features(const ThermalPlantParams& params, bool contact, double baseline,
                               const StepProtocol& protocol) {
  const auto run = simulate_step_protocol(params, contact, protocol);
  auto f = extract_features(run.trace, protocol.target, baseline, run.heater_off_time);
  f.baseline_temp = passive_equilibrium(params, contact);
  return f;
}

double thermal_fit_residual(const ThermalPlantParams& params, const StepFeatures& targets_unloaded,
                            const StepFeatures& targets_contact, const ThermalFitOptions& options) {
  return evaluate(params, targets_unloaded, targets_contact, options).residual;
}

ThermalFitResult fit_thermal_params(const StepFeatures& targets_unloaded,
                                    const StepFeatures& targets_contact,
                                    const ThermalFitOptions& options) {
  ThermalPlantParams fixed = options.initial_guess;
  if (targets_unloaded.baseline_temp) fixed.ambient_temp = *targets_unloaded.baseline_temp;
  if (!(fixed.skin_core_temp > fixed.ambient_temp)) fixed.skin_core_temp = fixed.ambient_temp + 10.0;
  fixed.validate();

  const auto objective = [&](const std::vector<double>& x) {
    const auto p = decode(x, fixed);
    try {
      return evaluate(p, targets_unloaded, targets_contact, options).residual;
    } catch (const SimulationDiverged&) {
      return HUGE_VAL;
    }
  };

  numerics::NelderMeadOptions nm;
  nm.max_evaluations = options.max_evaluations;
  nm.initial_step = 0.15;
  nm.f_tolerance = 1e-9;
  nm.x_tolerance = 1e-7;
  nm.restarts = 2;
  nm.seed = options.seed;
  const auto best = numerics::nelder_mead(objective, encode(fixed), nm);

  ThermalFitResult result;
  result.params = decode(best.x, fixed);
  result.evaluations = best.evaluations;
  const auto e = evaluate(result.params, targets_unloaded, targets_contact, options);
  result.residual = e.residual;
  result.unloaded = e.unloaded;
  result.contact = e.contact;
  if (!(result.residual <= options.acceptance_threshold))
    throw FitFailure("thermal fit residual " + std::to_string(result.residual) +
                         " above threshold " + std::to_string(options.acceptance_threshold),
                     result.residual);
  return result;
}

StepFeatures published_unloaded_targets() {
  StepFeatures f;
  f.peak_heating_rate = 3.0;
  f.time_to_target = 8.4;
  f.avg_heating_rate = 15.0 / 8.4;
  f.cooling_time_to_baseline = 90.0;
  f.max_cooling_rate = 0.4;
  f.baseline_temp = 25.0;
  return f;
}

StepFeatures published_contact_targets() {
  StepFeatures f;
  f.time_to_target = 7.6;
  f.avg_heating_rate = 6.0 / 7.6;
  f.cooling_time_to_baseline = 70.0;
  f.baseline_temp = 34.0;
  return f;
}

}  // namespace fth::plant
