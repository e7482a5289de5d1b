#include "fth/experiments/manip.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "fth/errors.hpp"
#include "fth/numerics/rng.hpp"

namespace fth::experiments {

using physics::Vec3;

std::string_view to_string(Condition c) { return c == Condition::HF ? "HF" : "NF"; }

std::optional<Condition> parse_condition(std::string_view text) {
  if (text == "HF" || text == "hf") return Condition::HF;
  if (text == "NF" || text == "nf") return Condition::NF;
  return std::nullopt;
}

void AgentParams::validate() const {
  const double durations[] = {approach_time, close_time, squeeze_time, settle_max, lift_time,
                              transport_time, lower_time, release_time, retract_time};
  for (double d : durations)
    if (!(d > 0.0) || !std::isfinite(d)) throw InvalidInput("AgentParams: phase durations must be positive");
  const double nonneg[] = {lift_height, retract_height, open_clearance, place_clearance, placement_sd,
                           nf_depth_sd, hf_force_bias_sd, hf_force_noise_sd, hf_settle_time, felt_clearance};
  for (double v : nonneg)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("AgentParams: lengths and noise levels must be >= 0");
  if (!std::isfinite(nf_depth_mean) || !(nf_depth_max > 0.0)) throw InvalidInput("AgentParams: bad NF depth");
  if (!(hf_target_force > 0.0) || !(hf_servo_gain > 0.0) || !(hf_max_rate > 0.0) || !(hf_settle_band > 0.0))
    throw InvalidInput("AgentParams: HF servo parameters must be positive");
}

AgentParams AgentParams::ideal() {
  AgentParams p;
  p.placement_sd = 0.0;
  p.nf_depth_sd = 0.0;
  p.hf_force_bias_sd = 0.0;
  p.hf_force_noise_sd = 0.0;
  return p;
}

void ManipPlan::validate() const {
  if (trials != 15) throw InvalidInput("ManipPlan: sessions have 15 trials");
  if (!(trial_timeout > 0.0)) throw InvalidInput("ManipPlan: timeout must be positive");
  agent.validate();
}

void ManipSceneConfig::validate() const {
  coupling.validate();
  force_map.validate();
  if (!(physics_dt > 0.0 && physics_dt <= 0.005)) throw InvalidInput("ManipSceneConfig: physics_dt must be in (0, 5 ms]");
  if (substeps < 1) throw InvalidInput("ManipSceneConfig: substeps must be >= 1");
}

namespace {

enum class Phase { Approach, Close, Squeeze, Lift, Transport, Lower, Release, Retract, Done };

double blend(double a, double b, double u) {
  u = std::clamp(u, 0.0, 1.0);
  return a + (b - a) * (0.5 - 0.5 * std::cos(std::numbers::pi * u));
}

Vec3 blend(const Vec3& a, const Vec3& b, double u) {
  return Vec3(blend(a.x(), b.x(), u), blend(a.y(), b.y(), u), blend(a.z(), b.z(), u));
}

struct Observation {
  const physics::Scene* scene = nullptr;
  std::array<double, 2> felt_force{0.0, 0.0};  // N, HF only
};

class ScriptedAgent {
 public:
  ScriptedAgent(const AgentParams& p, Condition c, const physics::Scene& scene, double sphere_radius,
                numerics::Rng& rng)
      : p_(p), cond_(c), half_(scene.cube_half()), radius_(sphere_radius), rng_(rng) {
    grasp_point_ = scene.cube_pos;
    const physics::Stand& t = scene.target_stand;
    aim_ = Vec3(t.center_x + rng_.normal(0.0, 1.0) * p_.placement_sd, t.center_y + rng_.normal(0.0, 1.0) * p_.placement_sd,
                0.0);
    if (cond_ == Condition::NF) {
      grip_ = std::min(p_.nf_depth_max, rng_.normal(p_.nf_depth_mean, p_.nf_depth_sd));
    } else {
      grip_ = 1.0 + rng_.normal(0.0, 1.0) * p_.hf_force_bias_sd;
    }
  }

  void start(const physics::Scene& scene) {
    hand_ = 0.5 * (scene.sphere_pos[0] + scene.sphere_pos[1]);
    depth_ = {-p_.open_clearance, -p_.open_clearance};
    enter(Phase::Approach, 0.0);
  }

  double grip_parameter() const { return grip_; }

  physics::ProxyPair update(double t, const Observation& obs, double dt) {
    const double u = t - t0_;
    switch (phase_) {
      case Phase::Approach:
        hand_ = blend(hand0_, grasp_point_, u / p_.approach_time);
        if (u >= p_.approach_time) enter(Phase::Close, t);
        break;
      case Phase::Close:
        for (int i = 0; i < 2; ++i) depth_[i] = blend(depth0_[i], 0.0, u / p_.close_time);
        if (u >= p_.close_time) enter(Phase::Squeeze, t);
        break;
      case Phase::Squeeze:
        if (cond_ == Condition::NF) {
          for (int i = 0; i < 2; ++i) depth_[i] = blend(depth0_[i], grip_, u / p_.squeeze_time);
          if (u >= p_.squeeze_time) enter(Phase::Lift, t);
        } else {
          servo(obs, dt);
          if (settled_for_ >= p_.hf_settle_time || u >= p_.settle_max) enter(Phase::Lift, t);
        }
        break;
      case Phase::Lift:
        hold(obs, dt);
        hand_.z() = blend(hand0_.z(), hand0_.z() + p_.lift_height, u / p_.lift_time);
        if (u >= p_.lift_time) enter(Phase::Transport, t);
        break;
      case Phase::Transport:
        hold(obs, dt);
        hand_.x() = blend(hand0_.x(), aim_.x(), u / p_.transport_time);
        hand_.y() = blend(hand0_.y(), aim_.y(), u / p_.transport_time);
        if (u >= p_.transport_time) {
          enter(Phase::Lower, t);
          // Keep the grasp offset seen now so the bottom ends just above the top.
          const auto& s = *obs.scene;
          lower_to_ = s.target_stand.top + half_ + p_.place_clearance + (hand_.z() - s.cube_pos.z());
        }
        break;
      case Phase::Lower:
        hold(obs, dt);
        hand_.z() = blend(hand0_.z(), lower_to_, u / p_.lower_time);
        if (u >= p_.lower_time) enter(Phase::Release, t);
        break;
      case Phase::Release:
        for (int i = 0; i < 2; ++i) depth_[i] = blend(depth0_[i], -p_.open_clearance, u / p_.release_time);
        if (u >= p_.release_time) enter(Phase::Retract, t);
        break;
      case Phase::Retract:
        hand_.z() = blend(hand0_.z(), hand0_.z() + p_.retract_height, u / p_.retract_time);
        if (u >= p_.retract_time) enter(Phase::Done, t);
        break;
      case Phase::Done:
        break;
    }
    physics::ProxyPair out;
    out.index_pos = hand_ + Vec3(0.0, half_ + radius_ - depth_[0], 0.0);
    out.thumb_pos = hand_ - Vec3(0.0, half_ + radius_ - depth_[1], 0.0);
    return out;
  }

 private:
  void enter(Phase next, double t) {
    phase_ = next;
    t0_ = t;
    hand0_ = hand_;
    depth0_ = depth_;
    settled_for_ = 0.0;
  }

  void hold(const Observation& obs, double dt) {
    if (cond_ == Condition::HF) servo(obs, dt);
  }

  void servo(const Observation& obs, double dt) {
    bool settled = true;
    for (int i = 0; i < 2; ++i) {
      double felt = grip_ * obs.felt_force[i];
      if (p_.hf_force_noise_sd > 0.0) felt += rng_.normal(0.0, p_.hf_force_noise_sd);
      const double err = p_.hf_target_force - felt;
      const double rate = std::clamp(p_.hf_servo_gain * err, -p_.hf_max_rate, p_.hf_max_rate);
      depth_[i] = std::clamp(depth_[i] + rate * dt, -p_.open_clearance, p_.nf_depth_max);
      if (std::abs(err) > p_.hf_settle_band * p_.hf_target_force) settled = false;
    }
    settled_for_ = settled ? settled_for_ + dt : 0.0;
  }

  const AgentParams& p_;
  Condition cond_;
  double half_;
  double radius_;
  numerics::Rng& rng_;
  Vec3 grasp_point_ = Vec3::Zero();
  Vec3 aim_ = Vec3::Zero();
  double grip_ = 0.0;
  Phase phase_ = Phase::Approach;
  double t0_ = 0.0;
  Vec3 hand_ = Vec3::Zero();
  Vec3 hand0_ = Vec3::Zero();
  std::array<double, 2> depth_{0.0, 0.0};
  std::array<double, 2> depth0_{0.0, 0.0};
  double settled_for_ = 0.0;
  double lower_to_ = 0.0;
};

constexpr device::PeerId kTracker = 1;

}  // namespace

std::vector<ManipTrialRecord> run_manip_session(const ManipPlan& plan, const ManipSceneConfig& cfg,
                                                device::Device* device, std::uint64_t seed) {
  plan.validate();
  cfg.validate();
  const bool hf = plan.condition == Condition::HF;
  if (hf) {
    if (device == nullptr) throw InvalidInput("run_manip_session: HF needs a device");
    if (device->config().clock.kind != device::ClockKind::Stepped)
      throw InvalidInput("run_manip_session: device must use the stepped clock");
    const double period = static_cast<double>(device->config().rates.control_period_us()) * 1e-6;
    if (std::abs(period - cfg.agent_period()) > 1e-12)
      throw InvalidInput("run_manip_session: device control period must equal the agent period");
  }
  physics::TaskParams task = cfg.task;
  task.timeout = plan.trial_timeout;

  std::uint32_t seq = 0;
  std::vector<ManipTrialRecord> records;
  for (int trial = 0; trial < plan.trials; ++trial) {
    numerics::Rng rng(numerics::derive_seed(numerics::derive_seed(seed, static_cast<std::uint64_t>(plan.condition)),
                                            static_cast<std::uint64_t>(trial)));
    physics::Scene scene = physics::Scene::standard();
    scene.contact = cfg.contact;
    scene.support_normal_force = scene.cube_mass * scene.contact.gravity;

    ScriptedAgent agent(plan.agent, plan.condition, scene, cfg.coupling.sphere_radius, rng);
    agent.start(scene);

    physics::ProxyPair prev{scene.sphere_pos[0], scene.sphere_pos[1]};
    physics::TaskStatus status;
    Observation obs;
    obs.scene = &scene;
    std::array<double, 2> pressure{0.0, 0.0};
    double indent_sum = 0.0, indent_max = 0.0;
    int samples = 0;
    std::int64_t step = 0;
    std::int64_t tick = 0;
    const double period = cfg.agent_period();

    while (!status.done()) {
      const double t = static_cast<double>(tick) * period;
      if (hf) {
        for (int i = 0; i < 2; ++i)
          obs.felt_force[i] = plant::force_from_pressure(pressure[i], plan.agent.felt_clearance, cfg.force_map);
      }
      const physics::ProxyPair target = agent.update(t, obs, period);
      for (int k = 1; k <= cfg.substeps && !status.done(); ++k) {
        const double a = static_cast<double>(k) / cfg.substeps;
        physics::ProxyPair p;
        p.index_pos = prev.index_pos + a * (target.index_pos - prev.index_pos);
        p.thumb_pos = prev.thumb_pos + a * (target.thumb_pos - prev.thumb_pos);
        scene = physics::physics_step(scene, p, cfg.coupling, cfg.physics_dt);
        ++step;
        status = physics::task_step(status, scene, static_cast<double>(step) * cfg.physics_dt, task);
      }
      prev = target;
      ++tick;

      std::array<double, 2> ind{};
      for (int i = 0; i < 2; ++i) {
        ind[i] = physics::contact_indentation(target[i], scene.sphere_pos[i], scene.contact_flags[i]);
        if (scene.contact_flags[i]) {
          indent_sum += ind[i];
          indent_max = std::max(indent_max, ind[i]);
          ++samples;
        }
      }
      if (hf) {
        protocol::Frame f;
        f.seq = seq++;
        f.timestamp_us = device->state().time_us(device->config().rates);
        f.payload = protocol::IndentationUpdate{static_cast<float>(ind[0]), static_cast<float>(ind[1])};
        device->receive(kTracker, protocol::encode(f));
        for (const auto& out : device->tick()) {
          if (const auto* tm = std::get_if<protocol::Telemetry>(&out.frame.payload))
            pressure = {tm->pressure_kpa[0], tm->pressure_kpa[1]};
        }
      }
    }

    ManipTrialRecord rec;
    rec.trial = trial;
    rec.condition = plan.condition;
    rec.status = std::string(status.label());
    rec.success = status.phase == physics::TaskPhase::Success;
    rec.duration = status.time;
    rec.contact_samples = samples;
    if (samples > 0) rec.mean_indentation = indent_sum / samples;
    rec.max_indentation = indent_max;
    rec.grip_parameter = agent.grip_parameter();
    records.push_back(std::move(rec));
  }
  return records;
}

ManipMetrics manip_metrics(const std::vector<ManipTrialRecord>& records) {
  ManipMetrics m;
  m.trials = static_cast<int>(records.size());
  double indent_sum = 0.0;
  long long indent_n = 0;
  for (const auto& r : records) {
    if (r.success) ++m.successes;
    m.total_time += r.duration;
    if (r.mean_indentation) {
      indent_sum += *r.mean_indentation * r.contact_samples;
      indent_n += r.contact_samples;
    }
  }
  m.success_rate = m.trials > 0 ? static_cast<double>(m.successes) / m.trials : 0.0;
  if (m.successes > 0) m.avg_time_to_success = m.total_time / m.successes;
  if (indent_n > 0) m.avg_indentation = indent_sum / indent_n;
  return m;
}

}  // namespace fth::experiments
