#include "app_config.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "fth/errors.hpp"

namespace fth::cli {

AppConfig load_app_config(const std::optional<std::string>& path) {
  const control::ConfigFile file = path ? control::ConfigFile::load(*path) : control::ConfigFile{};
  AppConfig c;
  c.device = device::load_device_config(file);

  auto& s = c.subject;
  s.sigma = file.get_double("subject.sigma", s.sigma);
  s.boundaries[0] = file.get_double("subject.boundary_cool_warm", s.boundaries[0]);
  s.boundaries[1] = file.get_double("subject.boundary_warm_hot", s.boundaries[1]);
  s.identify_delay_mean = file.get_double("subject.identify_delay_mean", s.identify_delay_mean);
  s.identify_delay_sd = file.get_double("subject.identify_delay_sd", s.identify_delay_sd);
  s.record_delay_mean = file.get_double("subject.record_delay_mean", s.record_delay_mean);
  s.record_delay_sd = file.get_double("subject.record_delay_sd", s.record_delay_sd);
  s.steady_rate = file.get_double("subject.steady_rate", s.steady_rate);
  s.min_exposure = file.get_double("subject.min_exposure", s.min_exposure);
  s.max_exposure = file.get_double("subject.max_exposure", s.max_exposure);
  s.validate();

  auto& a = c.agent;
  a.placement_sd = file.get_double("agent.placement_sd", a.placement_sd);
  a.nf_depth_mean = file.get_double("agent.nf_depth_mean", a.nf_depth_mean);
  a.nf_depth_sd = file.get_double("agent.nf_depth_sd", a.nf_depth_sd);
  a.nf_depth_max = file.get_double("agent.nf_depth_max", a.nf_depth_max);
  a.hf_target_force = file.get_double("agent.hf_target_force", a.hf_target_force);
  a.hf_force_bias_sd = file.get_double("agent.hf_force_bias_sd", a.hf_force_bias_sd);
  a.hf_force_noise_sd = file.get_double("agent.hf_force_noise_sd", a.hf_force_noise_sd);
  a.hf_servo_gain = file.get_double("agent.hf_servo_gain", a.hf_servo_gain);
  a.felt_clearance = file.get_double("agent.felt_clearance", a.felt_clearance);
  a.validate();

  auto& sc = c.scene;
  sc.task.timeout = file.get_double("task.timeout", sc.task.timeout);
  sc.task.dwell = file.get_double("task.dwell", sc.task.dwell);
  sc.task.stable_speed = file.get_double("task.stable_speed", sc.task.stable_speed);
  sc.coupling.spring_stiffness = file.get_double("physics.spring_stiffness", sc.coupling.spring_stiffness);
  sc.coupling.spring_damping = file.get_double("physics.spring_damping", sc.coupling.spring_damping);
  sc.contact.friction_coeff = file.get_double("physics.friction_coeff", sc.contact.friction_coeff);
  sc.physics_dt = file.get_double("physics.dt", sc.physics_dt);
  sc.validate();

  const auto unknown = file.unused_keys();
  if (!unknown.empty()) throw InvalidInput(fmt::format("unknown configuration keys: {}", fmt::join(unknown, ", ")));
  return c;
}

}  // namespace fth::cli
