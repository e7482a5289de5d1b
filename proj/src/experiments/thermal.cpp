#include "fth/experiments/thermal.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "fth/errors.hpp"
#include "fth/numerics/rng.hpp"

namespace fth::experiments {

std::string_view to_string(Stimulus s) {
  switch (s) {
    case Stimulus::Cool: return "cool";
    case Stimulus::Warm: return "warm";
    case Stimulus::Hot: return "hot";
  }
  return "?";
}

std::optional<Stimulus> parse_stimulus(std::string_view text) {
  for (Stimulus s : kStimuli)
    if (to_string(s) == text) return s;
  return std::nullopt;
}

void ThermalPlan::validate() const {
  std::array<int, 3> counts{};
  for (Stimulus s : trials) ++counts[static_cast<int>(s)];
  if (trials.size() != 18 || counts != std::array<int, 3>{6, 6, 6})
    throw InvalidInput("ThermalPlan: expected 18 trials, 6 per stimulus");
  if (!(hold_pressure >= 0.0) || !(deflate_time >= 0.0))
    throw InvalidInput("ThermalPlan: hold pressure and deflate time must be non-negative");
}

ThermalPlan plan_thermal(std::uint64_t seed) {
  ThermalPlan plan;
  for (Stimulus s : kStimuli)
    for (int i = 0; i < 6; ++i) plan.trials.push_back(s);
  numerics::Rng rng(seed);
  for (std::size_t i = plan.trials.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(plan.trials[i], plan.trials[j]);
  }
  return plan;
}

void SubjectModel::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("SubjectModel: sigma must be >= 0");
  if (!(boundaries[0] < boundaries[1])) throw InvalidInput("SubjectModel: boundaries must be ordered");
  if (!(identify_delay_sd >= 0.0) || !(record_delay_sd >= 0.0) || !(min_delay >= 0.0))
    throw InvalidInput("SubjectModel: delay parameters must be non-negative");
  if (!(identify_delay_mean >= 0.0) || !(record_delay_mean >= 0.0))
    throw InvalidInput("SubjectModel: delay means must be non-negative");
  if (!(steady_rate > 0.0) || !(steady_window > 0.0)) throw InvalidInput("SubjectModel: steadiness test must be positive");
  if (!(min_exposure >= 0.0) || !(max_exposure >= min_exposure))
    throw InvalidInput("SubjectModel: need 0 <= min_exposure <= max_exposure");
}

Stimulus SubjectModel::classify(double perceived) const {
  if (perceived < boundaries[0]) return Stimulus::Cool;
  if (perceived < boundaries[1]) return Stimulus::Warm;
  return Stimulus::Hot;
}

SubjectModel SubjectModel::noiseless() {
  SubjectModel s;
  s.sigma = 0.0;
  return s;
}

namespace {

constexpr device::PeerId kExperimenter = 1;

class Experimenter {
 public:
  explicit Experimenter(device::Device& dev) : dev_(dev) {}

  void send(protocol::Payload payload) {
    protocol::Frame f;
    f.seq = seq_++;
    f.timestamp_us = dev_.state().time_us(dev_.config().rates);
    f.payload = std::move(payload);
    dev_.receive(kExperimenter, protocol::encode(f));
  }

  double tick() {
    dev_.tick();
    const auto& ch = dev_.state().channels;
    return 0.5 * (ch[device::kIndex].thermal.fabric_temp + ch[device::kThumb].thermal.fabric_temp);
  }

 private:
  device::Device& dev_;
  std::uint32_t seq_ = 0;
};

std::int64_t to_ticks(double seconds, std::int64_t period_us) {
  return static_cast<std::int64_t>(std::ceil(seconds * 1e6 / static_cast<double>(period_us) - 1e-9));
}

}  // namespace

std::vector<ThermalTrialRecord> run_thermal_session(const ThermalPlan& plan, const SubjectModel& subject,
                                                    device::Device& device, std::uint64_t seed,
                                                    const control::StimulusSetpoints& setpoints) {
  plan.validate();
  subject.validate();
  if (device.config().clock.kind != device::ClockKind::Stepped)
    throw InvalidInput("run_thermal_session: device must use the stepped clock");

  const std::int64_t period_us = device.config().rates.control_period_us();
  const std::int64_t window = std::max<std::int64_t>(1, to_ticks(subject.steady_window, period_us));
  const std::int64_t min_ticks = to_ticks(subject.min_exposure, period_us);
  const std::int64_t max_ticks = std::max(to_ticks(subject.max_exposure, period_us), min_ticks);
  const std::int64_t deflate_ticks = to_ticks(plan.deflate_time, period_us);
  const double window_s = static_cast<double>(window * period_us) * 1e-6;

  numerics::Rng rng(seed);
  Experimenter exp(device);
  std::vector<ThermalTrialRecord> records;
  constexpr float kOff = std::numeric_limits<float>::quiet_NaN();

  for (std::size_t i = 0; i < plan.trials.size(); ++i) {
    const Stimulus stim = plan.trials[i];
    const double sp = stim == Stimulus::Cool ? static_cast<double>(kOff) : stim == Stimulus::Warm ? setpoints.warm : setpoints.hot;
    exp.send(protocol::HoldPressure{static_cast<float>(plan.hold_pressure)});
    exp.send(protocol::TempSetpoint{static_cast<float>(sp), static_cast<float>(sp)});

    // Exposure until the temperature feels steady.
    std::deque<double> history;
    double felt = 0.0;
    std::int64_t ticks = 0;
    while (true) {
      felt = exp.tick();
      ++ticks;
      history.push_back(felt);
      if (static_cast<std::int64_t>(history.size()) > window + 1) history.pop_front();
      if (ticks >= max_ticks) break;
      if (ticks >= min_ticks && static_cast<std::int64_t>(history.size()) == window + 1 &&
          std::abs(history.back() - history.front()) / window_s < subject.steady_rate)
        break;
    }

    ThermalTrialRecord rec;
    rec.trial = static_cast<int>(i);
    rec.stimulus = stim;
    rec.felt_temp = felt;
    rec.perceived_temp = felt + (subject.sigma > 0.0 ? rng.normal(0.0, subject.sigma) : 0.0);
    rec.response = subject.classify(rec.perceived_temp);
    rec.heating_us = ticks * period_us;

    const double identify = std::max(subject.min_delay, rng.normal(subject.identify_delay_mean, subject.identify_delay_sd));
    const double record = std::max(subject.min_delay, rng.normal(subject.record_delay_mean, subject.record_delay_sd));
    const std::int64_t identify_ticks = to_ticks(identify, period_us);
    const std::int64_t record_ticks = to_ticks(record, period_us);
    for (std::int64_t k = 0; k < identify_ticks + record_ticks; ++k) exp.tick();
    rec.identify_us = identify_ticks * period_us;
    rec.record_us = record_ticks * period_us;
    rec.duration_us = rec.heating_us + rec.identify_us + rec.record_us;
    records.push_back(rec);

    exp.send(protocol::TempSetpoint{kOff, kOff});
    exp.send(protocol::HoldPressure{0.0f});
    for (std::int64_t k = 0; k < deflate_ticks; ++k) exp.tick();
  }
  return records;
}

ConfusionMatrix confusion_matrix(const std::vector<ThermalTrialRecord>& records) {
  ConfusionMatrix m;
  int diagonal = 0;
  for (const auto& r : records) {
    ++m.counts[static_cast<int>(r.stimulus)][static_cast<int>(r.response)];
    if (r.stimulus == r.response) ++diagonal;
  }
  m.total = static_cast<int>(records.size());
  for (int s = 0; s < 3; ++s) {
    const int row = m.counts[s][0] + m.counts[s][1] + m.counts[s][2];
    if (row > 0) m.class_accuracy[s] = static_cast<double>(m.counts[s][s]) / row;
  }
  m.overall_accuracy = m.total > 0 ? static_cast<double>(diagonal) / m.total : 0.0;
  return m;
}

}  // namespace fth::experiments
