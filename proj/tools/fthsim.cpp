#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "app_config.hpp"
#include "fth/errors.hpp"
#include "fth/experiments/report.hpp"
#include "fth/experiments/study.hpp"
#include "fth/plant/features.hpp"
#include "fth/plant/fit.hpp"
#include "fth/plant/force_map.hpp"
#include "fth/plant/trace_io.hpp"
#include "fth/service/service.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace fth;

namespace {

// Bad flags or configuration: exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Shared {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format = "csv";
};

void add_shared(CLI::App* sub, Shared& s, bool seed_required) {
  sub->add_option("--config", s.config, "key = value configuration file")->check(CLI::ExistingFile);
  auto* seed = sub->add_option("--seed", s.seed, "RNG seed");
  if (seed_required) seed->required();
  sub->add_option("--out-dir", s.out_dir, "directory for all outputs")->capture_default_str();
  sub->add_option("--format", s.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

cli::AppConfig load_config(const Shared& s) {
  try {
    return cli::load_app_config(s.config);
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
}

fs::path out_path(const Shared& s, const std::string& name) {
  fs::create_directories(s.out_dir);
  return fs::path(s.out_dir) / name;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot write {}", p.string()));
  f << text;
  if (!f) throw std::runtime_error(fmt::format("write failed: {}", p.string()));
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw UsageError(fmt::format("cannot read {}", p.string()));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json features_json(const plant::StepFeatures& f) {
  return {{"peak_heating_rate_c_per_s", opt(f.peak_heating_rate)},
          {"time_to_target_s", opt(f.time_to_target)},
          {"avg_heating_rate_c_per_s", opt(f.avg_heating_rate)},
          {"cooling_time_to_baseline_s", opt(f.cooling_time_to_baseline)},
          {"max_cooling_rate_c_per_s", opt(f.max_cooling_rate)},
          {"baseline_c", opt(f.baseline_temp)}};
}

void print_features(const plant::StepFeatures& f) {
  auto line = [](const char* name, const std::optional<double>& v, const char* unit) {
    if (v) fmt::print("{:<28} {:.3f} {}\n", name, *v, unit);
    else fmt::print("{:<28} n/a\n", name);
  };
  line("peak_heating_rate", f.peak_heating_rate, "C/s");
  line("time_to_target", f.time_to_target, "s");
  line("avg_heating_rate", f.avg_heating_rate, "C/s");
  line("cooling_time_to_baseline", f.cooling_time_to_baseline, "s");
  line("max_cooling_rate", f.max_cooling_rate, "C/s");
  line("baseline", f.baseline_temp, "C");
}

// ---- simulate-thermal ------------------------------------------------------

struct ThermalSimArgs {
  bool contact = false;
  double setpoint = 40.0;
  double heat = 40.0;
  double cool = 150.0;
  std::string mode = "protocol";
};

// Closed loop through the emulated firmware; samples the fabric at 5 Hz.
plant::ProtocolRun device_run(const device::DeviceConfig& base, const ThermalSimArgs& a) {
  device::DeviceConfig cfg = base;
  cfg.clock.kind = device::ClockKind::Stepped;
  device::Device dev(cfg);
  std::uint32_t seq = 0;
  auto send = [&](protocol::Payload p) {
    protocol::Frame f;
    f.seq = seq++;
    f.payload = p;
    dev.receive(1, f);
  };
  const auto period = cfg.rates.control_period_us();
  if (a.contact) {
    // Settle at the contact equilibrium before the step.
    send(protocol::HoldPressure{static_cast<float>(cfg.control.policy.hold_pressure)});
    for (std::int64_t k = 0; k < std::llround(600e6 / static_cast<double>(period)); ++k) dev.tick();
  }
  plant::ProtocolRun run;
  const auto sample_every = cfg.rates.sensing_divider();
  const std::int64_t heat_ticks = std::llround(a.heat * 1e6 / static_cast<double>(period));
  const std::int64_t total = heat_ticks + std::llround(a.cool * 1e6 / static_cast<double>(period));
  send(protocol::TempSetpoint{static_cast<float>(a.setpoint), static_cast<float>(a.setpoint)});
  for (std::int64_t k = 0; k <= total; ++k) {
    if (k == heat_ticks) {
      const float off = std::numeric_limits<float>::quiet_NaN();
      send(protocol::TempSetpoint{off, off});
    }
    if (k % sample_every == 0) {
      const auto& ch = dev.state().channels[device::kIndex];
      run.trace.push_back({static_cast<double>(k * period) * 1e-6, ch.thermal.fabric_temp});
      run.max_fabric_temp = std::max(run.max_fabric_temp, ch.thermal.fabric_temp);
      run.max_element_temp = std::max(run.max_element_temp, ch.thermal.element_temp);
    }
    dev.tick();
  }
  run.heater_off_time = static_cast<double>(heat_ticks * period) * 1e-6;
  return run;
}

int simulate_thermal(const Shared& sh, const ThermalSimArgs& a) {
  const auto cfg = load_config(sh);
  if (!(a.heat > 0) || !(a.cool >= 0)) throw UsageError("durations must be positive");
  plant::ProtocolRun run;
  const double start = plant::passive_equilibrium(cfg.device.thermal, a.contact);
  if (a.mode == "protocol") {
    plant::StepProtocol p;
    p.target = a.setpoint;
    p.heat_duration = a.heat;
    p.cool_duration = a.cool;
    run = plant::simulate_step_protocol(cfg.device.thermal, a.contact, p);
  } else {
    run = device_run(cfg.device, a);
  }
  const double baseline = a.contact ? start : cfg.device.thermal.ambient_temp;
  const auto feats = plant::extract_features(run.trace, a.setpoint, baseline, run.heater_off_time);
  if (sh.format == "csv") {
    std::ostringstream os;
    plant::write_thermal_csv(os, run.trace);
    write_file(out_path(sh, "thermal_trace.csv"), os.str());
  } else {
    ordered_json j;
    j["contact"] = a.contact;
    j["setpoint_c"] = a.setpoint;
    j["heater_off_s"] = run.heater_off_time;
    j["features"] = features_json(feats);
    ordered_json t = ordered_json::array(), v = ordered_json::array();
    for (const auto& s : run.trace) {
      t.push_back(s.time);
      v.push_back(s.temp);
    }
    j["time_s"] = t;
    j["temp_c"] = v;
    write_file(out_path(sh, "thermal_trace.json"), j.dump(2) + "\n");
  }
  fmt::print("condition                    {}\n", a.contact ? "contact" : "unloaded");
  print_features(feats);
  fmt::print("max_element_temp             {:.3f} C\n", run.max_element_temp);
  return 0;
}

// ---- simulate-force / fit-force -----------------------------------------------

int simulate_force(const Shared& sh, std::vector<double> clearances, double max_p, double step) {
  if (!(max_p > 0) || !(step > 0)) throw UsageError("--max-pressure and --step must be positive");
  const auto map = plant::ClearanceForceMap::characterized();
  std::vector<plant::ForceSample> samples;
  for (double c : clearances) {
    if (!(c >= 0)) throw UsageError("clearances must be non-negative");
    for (int i = 0;; ++i) {
      const double p = std::min(max_p, i * step);
      samples.push_back({p, plant::force_from_pressure(p, c, map), c});
      if (p >= max_p) break;
    }
  }
  if (sh.format == "csv") {
    std::ostringstream os;
    plant::write_force_csv(os, samples);
    write_file(out_path(sh, "force_curves.csv"), os.str());
  } else {
    ordered_json j = ordered_json::array();
    for (const auto& s : samples) j.push_back({{"pressure_kpa", s.pressure_kpa}, {"force_n", s.force_n}, {"clearance_mm", s.clearance_mm}});
    write_file(out_path(sh, "force_curves.json"), j.dump(2) + "\n");
  }
  const double f0 = plant::force_from_pressure(max_p, 0.0, map);
  for (double c : clearances) {
    const double f = plant::force_from_pressure(max_p, c, map);
    fmt::print("clearance {:.2f} mm: F({:g} kPa) = {:.3f} N, ratio to 0 mm = {:.3f}\n", c, max_p, f, f / f0);
  }
  return 0;
}

int fit_force(const Shared& sh, const std::string& input) {
  std::istringstream in(read_file(input));
  std::vector<plant::ForceSample> samples;
  try {
    samples = plant::read_force_csv(in);
  } catch (const InvalidInput& e) {
    throw UsageError(fmt::format("{}: {}", input, e.what()));
  }
  const auto map = plant::fit_force_map(samples);
  if (sh.format == "csv") {
    std::string s = "clearance_mm,slope_n_per_kpa,force_at_50kpa_n\n";
    for (std::size_t i = 0; i < map.clearance_grid.size(); ++i)
      s += fmt::format("{:.3f},{:.6f},{:.4f}\n", map.clearance_grid[i], map.slope_per_clearance[i],
                       50.0 * map.slope_per_clearance[i]);
    write_file(out_path(sh, "force_fit.csv"), s);
  } else {
    ordered_json j = ordered_json::array();
    for (std::size_t i = 0; i < map.clearance_grid.size(); ++i)
      j.push_back({{"clearance_mm", map.clearance_grid[i]},
                   {"slope_n_per_kpa", map.slope_per_clearance[i]},
                   {"force_at_50kpa_n", 50.0 * map.slope_per_clearance[i]}});
    write_file(out_path(sh, "force_fit.json"), j.dump(2) + "\n");
  }
  for (std::size_t i = 0; i < map.clearance_grid.size(); ++i)
    fmt::print("clearance {:.2f} mm: slope {:.6f} N/kPa, F(50 kPa) = {:.3f} N\n", map.clearance_grid[i],
               map.slope_per_clearance[i], 50.0 * map.slope_per_clearance[i]);
  return 0;
}

// ---- fit-thermal ----------------------------------------------------------------

int fit_thermal(const Shared& sh) {
  load_config(sh);
  plant::ThermalFitOptions opts;
  if (sh.seed) opts.seed = *sh.seed;
  const auto r = plant::fit_thermal_params(plant::published_unloaded_targets(), plant::published_contact_targets(), opts);
  const auto& p = r.params;
  std::string text = fmt::format(
      "# fitted thermal parameters (residual {:.6f}, {} evaluations)\n"
      "thermal.heat_capacity_element = {:.9g}\n"
      "thermal.heat_capacity_fabric = {:.9g}\n"
      "thermal.conduct_element_fabric = {:.9g}\n"
      "thermal.conduct_fabric_ambient = {:.9g}\n"
      "thermal.conduct_fabric_skin = {:.9g}\n"
      "thermal.skin_core_temp = {:.9g}\n"
      "thermal.heater_max_power = {:.9g}\n"
      "thermal.ambient_temp = {:.9g}\n",
      r.residual, r.evaluations, p.heat_capacity_element, p.heat_capacity_fabric, p.conduct_element_fabric,
      p.conduct_fabric_ambient, p.conduct_fabric_skin, p.skin_core_temp, p.heater_max_power, p.ambient_temp);
  write_file(out_path(sh, "thermal_fit.cfg"), text);
  ordered_json j{{"residual", r.residual},
                 {"evaluations", r.evaluations},
                 {"unloaded", features_json(r.unloaded)},
                 {"contact", features_json(r.contact)}};
  write_file(out_path(sh, "thermal_fit.json"), j.dump(2) + "\n");
  fmt::print("residual {:.6f} after {} evaluations\n", r.residual, r.evaluations);
  fmt::print("-- unloaded\n");
  print_features(r.unloaded);
  fmt::print("-- contact\n");
  print_features(r.contact);
  return 0;
}

// ---- experiments ---------------------------------------------------------------

int experiment_thermal(const Shared& sh, int subjects, std::optional<double> sigma) {
  auto cfg = load_config(sh);
  if (subjects < 1) throw UsageError("--subjects must be >= 1");
  if (sigma) {
    cfg.subject.sigma = *sigma;
    cfg.subject.validate();
  }
  const auto study = experiments::run_thermal_study(*sh.seed, subjects, cfg.subject, cfg.device);
  if (sh.format == "csv") {
    std::ostringstream os;
    experiments::write_thermal_csv(os, study);
    write_file(out_path(sh, "thermal_trials.csv"), os.str());
  } else {
    ordered_json rows = ordered_json::array();
    for (const auto& s : study.subjects)
      for (const auto& r : s.trials)
        rows.push_back({{"subject", s.subject}, {"trial", r.trial}, {"stimulus", experiments::to_string(r.stimulus)},
                        {"response", experiments::to_string(r.response)}, {"duration_s", r.duration_us * 1e-6}});
    write_file(out_path(sh, "thermal_trials.json"), rows.dump(2) + "\n");
  }
  const auto summary = experiments::thermal_summary(study, cfg.subject);
  write_file(out_path(sh, "thermal_summary.json"), summary.dump(2) + "\n");
  const auto m = experiments::confusion_matrix(study.pooled());
  fmt::print("subjects {}  trials {}  overall accuracy {:.4f}\n", subjects, m.total, m.overall_accuracy);
  for (auto s : experiments::kStimuli) {
    const int i = static_cast<int>(s);
    fmt::print("{:<5} -> cool {:3d}  warm {:3d}  hot {:3d}   accuracy {}\n", experiments::to_string(s), m.counts[i][0],
               m.counts[i][1], m.counts[i][2], m.class_accuracy[i] ? fmt::format("{:.4f}", *m.class_accuracy[i]) : "n/a");
  }
  return 0;
}

int experiment_manip(const Shared& sh, const std::string& condition, int subjects, bool ideal) {
  const auto cfg = load_config(sh);
  if (subjects < 1) throw UsageError("--subjects must be >= 1");
  std::vector<experiments::Condition> conds;
  if (condition == "both") conds = {experiments::Condition::HF, experiments::Condition::NF};
  else conds = {*experiments::parse_condition(condition)};
  const auto agent = ideal ? experiments::AgentParams::ideal() : cfg.agent;
  const auto study = experiments::run_manip_study(*sh.seed, subjects, conds, agent, cfg.scene, cfg.device);
  if (sh.format == "csv") {
    std::ostringstream os;
    experiments::write_manip_csv(os, study);
    write_file(out_path(sh, "manip_trials.csv"), os.str());
  } else {
    ordered_json rows = ordered_json::array();
    for (const auto& s : study.sessions)
      for (const auto& r : s.trials)
        rows.push_back({{"subject", s.subject}, {"condition", experiments::to_string(r.condition)}, {"trial", r.trial},
                        {"status", r.status}, {"duration_s", r.duration},
                        {"mean_indentation_mm", opt(r.mean_indentation)}, {"contact_samples", r.contact_samples}});
    write_file(out_path(sh, "manip_trials.json"), rows.dump(2) + "\n");
  }
  const auto summary = experiments::manip_summary(study);
  write_file(out_path(sh, "manip_summary.json"), summary.dump(2) + "\n");
  for (auto c : conds) {
    const auto m = experiments::manip_metrics(study.pooled(c));
    fmt::print("{}: success {}/{} ({:.4f})  avg time to success {}  avg indentation {}\n", experiments::to_string(c),
               m.successes, m.trials, m.success_rate,
               m.avg_time_to_success ? fmt::format("{:.3f} s", *m.avg_time_to_success) : "n/a",
               m.avg_indentation ? fmt::format("{:.3f} mm", *m.avg_indentation) : "n/a");
  }
  if (summary.contains("stats")) {
    const auto& st = summary["stats"]["indentation_nf_minus_hf"];
    if (st.contains("t"))
      fmt::print("indentation paired t = {:.4f}, df = {}, p = {:.4g}\n", st["t"].get<double>(), st["df"].get<double>(),
                 st["p"].get<double>());
  }
  return 0;
}

// ---- serve -----------------------------------------------------------------------

struct ServeArgs {
  std::uint16_t udp_port = 9750;
  std::uint16_t gateway_port = 9751;
  std::optional<std::string> clock;
  std::string bind = "127.0.0.1";
  bool scene = false;
  double run_for = 0.0;
};

int serve(const Shared& sh, const ServeArgs& a) {
  auto cfg = load_config(sh);
  service::ServiceOptions o;
  o.device = cfg.device;
  if (a.clock) {
    try {
      o.device.clock = device::ClockMode::parse(*a.clock);
    } catch (const InvalidInput& e) {
      throw UsageError(e.what());
    }
  }
  o.bind_address = a.bind;
  o.udp_port = a.udp_port;
  o.gateway_port = a.gateway_port;
  o.embedded_scene = a.scene;
  service::Service svc(o);
  svc.start();
  fmt::print("listening udp={} gateway={} clock={} scene={}\n", svc.udp_port(), svc.gateway_port(),
             o.device.clock.to_string(), a.scene ? "on" : "off");
  std::fflush(stdout);

  boost::asio::io_context io;
  boost::asio::signal_set signals(io, SIGINT, SIGTERM);
  signals.async_wait([&](const boost::system::error_code&, int) { io.stop(); });
  boost::asio::steady_timer timer(io);
  if (a.run_for > 0) {
    timer.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(a.run_for)));
    timer.async_wait([&](const boost::system::error_code& ec) {
      if (!ec) io.stop();
    });
  }
  io.run();
  svc.stop();
  return 0;
}

// ---- plot ------------------------------------------------------------------------

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw UsageError(fmt::format("missing column {}", name));
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Table read_table(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty()) t.header = split(line);
    else t.rows.push_back(split(line));
  }
  if (t.header.empty()) throw UsageError("input has no header");
  return t;
}

double num(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw UsageError(fmt::format("bad number '{}'", s));
  }
}

std::string plot_manip(const Table& t, const std::string& metric) {
  const int cc = t.col("condition"), cs = t.col("status"), cd = t.col("duration_s"), ci = t.col("mean_indentation_mm"),
            cn = t.col("contact_samples");
  std::map<std::string, std::array<double, 5>> acc;  // trials, successes, time, Σind·n, Σn
  std::vector<std::string> order;
  for (const auto& r : t.rows) {
    if (!acc.count(r[cc])) order.push_back(r[cc]);
    auto& a = acc[r[cc]];
    a[0] += 1;
    a[1] += r[cs] == "success";
    a[2] += num(r[cd]);
    if (!r[ci].empty()) {
      a[3] += num(r[ci]) * num(r[cn]);
      a[4] += num(r[cn]);
    }
  }
  cli::BarChart b;
  b.categories = order;
  b.groups = {metric};
  b.values.emplace_back();
  for (const auto& c : order) {
    const auto& a = acc[c];
    double v = 0;
    if (metric == "success") v = a[1] / a[0];
    else if (metric == "time") v = a[1] > 0 ? a[2] / a[1] : NAN;
    else v = a[4] > 0 ? a[3] / a[4] : NAN;
    b.values[0].push_back(v);
  }
  b.title = metric == "success" ? "Success rate" : metric == "time" ? "Average time to success" : "Average indentation";
  b.y_label = metric == "success" ? "success rate" : metric == "time" ? "s" : "mm";
  return cli::render_svg(b);
}

std::string plot_thermal_trials(const Table& t) {
  const int cs = t.col("stimulus"), cr = t.col("response");
  std::map<std::string, std::pair<int, int>> acc;
  for (const auto& r : t.rows) {
    auto& a = acc[r[cs]];
    ++a.first;
    a.second += r[cs] == r[cr];
  }
  cli::BarChart b;
  b.title = "Identification accuracy";
  b.y_label = "accuracy";
  b.groups = {"accuracy"};
  b.values.emplace_back();
  for (const char* s : {"cool", "warm", "hot"}) {
    b.categories.push_back(s);
    const auto it = acc.find(s);
    b.values[0].push_back(it == acc.end() ? NAN : static_cast<double>(it->second.second) / it->second.first);
  }
  return cli::render_svg(b);
}

int plot(const Shared& sh, const std::string& input, std::optional<std::string> output, const std::string& metric) {
  const Table t = read_table(read_file(input));
  const auto joined = fmt::format("{}", fmt::join(t.header, ","));
  std::string svg;
  if (joined == "time_s,temp_c") {
    cli::LineChart c{"Fabric temperature", "time (s)", "temperature (C)", {{"", {}}}};
    for (const auto& r : t.rows) c.series[0].points.emplace_back(num(r[0]), num(r[1]));
    svg = cli::render_svg(c);
  } else if (joined == "pressure_kpa,force_n,clearance_mm") {
    cli::LineChart c{"Force vs pressure", "pressure (kPa)", "force (N)", {}};
    std::map<double, std::size_t> idx;
    for (const auto& r : t.rows) {
      const double cl = num(r[2]);
      if (!idx.count(cl)) {
        idx[cl] = c.series.size();
        c.series.push_back({fmt::format("{:g} mm", cl), {}});
      }
      c.series[idx[cl]].points.emplace_back(num(r[0]), num(r[1]));
    }
    svg = cli::render_svg(c);
  } else if (joined.rfind("time_s,index_indent_mm,thumb_indent_mm", 0) == 0) {
    cli::LineChart c{"Indentation", "time (s)", "indentation (mm)", {{"index", {}}, {"thumb", {}}}};
    for (const auto& r : t.rows) {
      c.series[0].points.emplace_back(num(r[0]), num(r[1]));
      c.series[1].points.emplace_back(num(r[0]), num(r[2]));
    }
    svg = cli::render_svg(c);
  } else if (joined.rfind("subject,condition,trial,status", 0) == 0) {
    svg = plot_manip(t, metric);
  } else if (joined.rfind("subject,trial,stimulus,response", 0) == 0) {
    svg = plot_thermal_trials(t);
  } else {
    throw UsageError(fmt::format("unrecognized CSV header '{}'", joined));
  }
  const fs::path dest = output ? fs::path(*output) : out_path(sh, fs::path(input).stem().string() + ".svg");
  if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
  write_file(dest, svg);
  fmt::print("wrote {}\n", dest.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital twin of a fabric thermal-haptic fingertip device"};
  app.require_subcommand(1);

  Shared shared;
  ThermalSimArgs thermal_args;
  auto* sim_thermal = app.add_subcommand("simulate-thermal", "simulate a heating step and extract its features");
  add_shared(sim_thermal, shared, false);
  sim_thermal->add_option("--contact", thermal_args.contact, "finger contact (true/false)")->capture_default_str();
  sim_thermal->add_option("--setpoint", thermal_args.setpoint, "target temperature, C")->capture_default_str();
  sim_thermal->add_option("--heat-duration", thermal_args.heat, "s")->capture_default_str();
  sim_thermal->add_option("--cool-duration", thermal_args.cool, "s")->capture_default_str();
  sim_thermal->add_option("--mode", thermal_args.mode, "protocol: characterization regulator; device: firmware PID")
      ->check(CLI::IsMember({"protocol", "device"}))
      ->capture_default_str();

  std::vector<double> clearances{0, 1, 2, 3};
  double max_pressure = 50, pressure_step = 5;
  auto* sim_force = app.add_subcommand("simulate-force", "force-pressure curves per clearance");
  add_shared(sim_force, shared, false);
  sim_force->add_option("--clearance", clearances, "clearances, mm")->delimiter(',')->capture_default_str();
  sim_force->add_option("--max-pressure", max_pressure, "kPa")->capture_default_str();
  sim_force->add_option("--step", pressure_step, "kPa")->capture_default_str();

  auto* fit_th = app.add_subcommand("fit-thermal", "identify thermal parameters from the published step features");
  add_shared(fit_th, shared, false);

  std::string fit_input;
  auto* fit_f = app.add_subcommand("fit-force", "fit force slopes per clearance from a CSV");
  add_shared(fit_f, shared, false);
  fit_f->add_option("--input", fit_input, "CSV with pressure_kpa,force_n,clearance_mm")->required()->check(CLI::ExistingFile);

  ServeArgs serve_args;
  auto* srv = app.add_subcommand("serve", "run the device emulator service");
  add_shared(srv, shared, false);
  srv->add_option("--udp-port", serve_args.udp_port)->envname("FTH_UDP_PORT")->capture_default_str();
  srv->add_option("--gateway-port", serve_args.gateway_port)->envname("FTH_GATEWAY_PORT")->capture_default_str();
  srv->add_option("--clock", serve_args.clock, "realtime | accel:<factor> | stepped")->envname("FTH_CLOCK");
  srv->add_option("--bind", serve_args.bind)->envname("FTH_BIND")->capture_default_str();
  srv->add_flag("--scene", serve_args.scene, "run the pick-and-place scene inside the loop");
  srv->add_option("--run-for", serve_args.run_for, "stop after this many wall seconds (0: until signalled)");

  int subjects_thermal = 11;
  std::optional<double> sigma;
  auto* exp_th = app.add_subcommand("experiment-thermal", "thermal identification study with synthetic subjects");
  add_shared(exp_th, shared, true);
  exp_th->add_option("--subjects", subjects_thermal)->capture_default_str();
  exp_th->add_option("--sigma", sigma, "perceived-temperature noise, C");

  std::string condition = "both";
  int subjects_manip = 1;
  bool ideal = false;
  auto* exp_m = app.add_subcommand("experiment-manip", "pick-and-place study with scripted agents");
  add_shared(exp_m, shared, true);
  exp_m->add_option("--condition", condition)->check(CLI::IsMember({"HF", "NF", "both"}))->capture_default_str();
  exp_m->add_option("--subjects", subjects_manip)->capture_default_str();
  exp_m->add_flag("--ideal", ideal, "remove all agent noise");

  std::string plot_input;
  std::optional<std::string> plot_output;
  std::string metric = "indentation";
  auto* plt = app.add_subcommand("plot", "render a CSV produced by this tool to SVG");
  add_shared(plt, shared, false);
  plt->add_option("--input", plot_input)->required()->check(CLI::ExistingFile);
  plt->add_option("--output", plot_output, "SVG path (default: <out-dir>/<input stem>.svg)");
  plt->add_option("--metric", metric, "bar metric for manipulation trials")
      ->check(CLI::IsMember({"indentation", "success", "time"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    // Validates keys for every subcommand, including those that ignore them.
    load_config(shared);
    if (*sim_thermal) return simulate_thermal(shared, thermal_args);
    if (*sim_force) return simulate_force(shared, clearances, max_pressure, pressure_step);
    if (*fit_th) return fit_thermal(shared);
    if (*fit_f) return fit_force(shared, fit_input);
    if (*srv) return serve(shared, serve_args);
    if (*exp_th) return experiment_thermal(shared, subjects_thermal, sigma);
    if (*exp_m) return experiment_manip(shared, condition, subjects_manip, ideal);
    if (*plt) return plot(shared, plot_input, plot_output, metric);
  } catch (const UsageError& e) {
    fmt::print(std::cerr, "usage error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 2;
  }
  return 1;
}
