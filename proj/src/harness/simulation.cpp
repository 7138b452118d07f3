#include "bassim/harness/simulation.hpp"

#include <cmath>

#include "bassim/util/format.hpp"
#include "json.hpp"

namespace bassim::harness {

using namespace bassim::attack;

server::PointCatalog build_catalog(const control::TestbedControllers& testbed) {
  server::PointCatalog catalog;
  for (const auto& c : testbed.all) {
    const auto& table = c->device().points();
    for (const auto& [id, p] : table.points()) {
      server::PointInfo info;
      info.id = c->name() + "." + id.to_string();
      info.device = c->name();
      info.device_instance = table.device().instance();
      info.object = id;
      info.name = p.name;
      info.units = p.units;
      info.commandable = p.commandable;
      info.binary = id.type() == bacnet::ObjectType::binary_output || id.type() == bacnet::ObjectType::binary_value;
      catalog.push_back(std::move(info));
    }
  }
  return catalog;
}

namespace {

std::vector<server::DispatchRule> dispatch_rules(const ScenarioConfig& c) {
  std::vector<server::DispatchRule> rules;
  const auto& v = c.controllers.vav;
  for (std::size_t i = 1; i <= c.zones(); ++i) {
    const std::string vav = "vav" + std::to_string(i);
    rules.push_back({vav + ".analog-value:1", v.cool_occupied, v.cool_unoccupied});
    rules.push_back({vav + ".analog-value:2", v.heat_occupied, v.heat_unoccupied});
  }
  const double sat = c.controllers.ahu.sat_setpoint;
  const double chw = c.controllers.chiller.chw_setpoint;
  rules.push_back({"ahu.analog-value:1", sat, sat});
  rules.push_back({"chiller.analog-value:1", chw, chw});
  return rules;
}

server::SupervisorConfig supervisor_config(const ScenarioConfig& c) {
  const auto& s = c.supervisor;
  server::SupervisorConfig cfg;
  cfg.address = c.network.server;
  cfg.router = c.network.router;
  cfg.ip_network = c.network.ip_network;
  cfg.trend_interval_s = s.trend_interval_s;
  cfg.poll_timeout_s = s.poll_timeout_s;
  cfg.poll_retries = s.poll_retries;
  cfg.write_timeout_s = s.write_timeout_s;
  cfg.dispatch_period_s = s.dispatch_period_s;
  cfg.rediscover_period_s = s.rediscover_period_s;
  cfg.monitored_points = s.monitored_points.empty() ? server::default_monitored_points(c.zones()) : s.monitored_points;
  cfg.dispatch = dispatch_rules(c);
  cfg.alarms = server::default_alarms(c.zones());
  for (auto& rule : cfg.alarms) {
    rule.high = s.alarm_high;
    rule.deadband = s.alarm_deadband;
    rule.min_duration_s = s.alarm_duration_s;
  }
  cfg.schedule = c.controllers.ahu.schedule;
  cfg.end = c.end();
  return cfg;
}

net::Fabric::Config fabric_config(const ScenarioConfig& c) {
  net::Fabric::Config f;
  f.ip = c.network.ip;
  f.field = c.network.field;
  f.seed = c.seed;
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFault("cannot open '" + path + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::string& what) {
  if (!out.is_open()) return;
  out.flush();
  const bool ok = static_cast<bool>(out);
  out.close();
  if (!ok) throw RuntimeFault("write failed on " + what);
}

}  // namespace

std::string audit_json_line(const server::AuditRecord& r) {
  nlohmann::ordered_json j;
  j["issued"] = r.issued.seconds();
  j["completed"] = r.completed.seconds();
  j["actor"] = std::string(server::to_string(r.actor));
  j["point"] = r.point;
  j["value"] = r.value;
  j["priority"] = r.priority;
  j["invoke_id"] = r.invoke_id;
  j["outcome"] = std::string(server::to_string(r.outcome.kind));
  if (!r.outcome.detail.empty()) j["detail"] = r.outcome.detail;
  return j.dump();
}

Simulation::Simulation(ScenarioConfig config, SimulationOptions options)
    : config_(std::move(config)),
      options_(std::move(options)),
      fabric_(fabric_config(config_)),
      noise_(config_.plant.noise_sigma, config_.seed) {
  config_.plant.params.validate();
  const double period = config_.controllers.control_period_s;
  if (period < 1.0 || std::floor(period) != period)
    throw ScenarioError(ConfigError{0, "controllers.control_period_s must be a whole number of seconds >= 1"});
  control_period_s_ = static_cast<std::int64_t>(period);
  if (kPlantStep >= plant::euler_stability_bound(config_.plant.params))
    throw ScenarioError(ConfigError{0, "plant parameters are stiff for a 1 s Euler step"});

  net::Router::Config rc;
  rc.ip_network = config_.network.ip_network;
  rc.field_network = config_.network.field_network;
  rc.ip_address = config_.network.router;
  rc.fdt_capacity = config_.network.fdt_capacity;
  router_ = std::make_unique<net::Router>(fabric_, rc);

  const auto& cs = config_.controllers;
  testbed_ = control::make_testbed(config_.zones(), cs.vav, cs.ahu, cs.chiller, cs.reboot_s,
                                   config_.network.field_network, rc.field_station);
  for (auto& c : testbed_.all) c->device().attach(fabric_);

  server::PointCatalog catalog = build_catalog(testbed_);
  if (auto err = validate_attacks(config_.attacks, config_.attack_lines, catalog, config_.end()))
    throw ScenarioError(*err);
  try {
    supervisor_ = std::make_unique<server::Supervisor>(fabric_, supervisor_config(config_), catalog);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(ConfigError{0, e.what()});
  }

  AttackerConfig ac;
  ac.address = config_.network.attacker;
  ac.router = config_.network.router;
  ac.ip_network = config_.network.ip_network;
  for (const auto& c : testbed_.all)
    ac.device_routes[c->name()] =
        bacnet::NetAddress{config_.network.field_network, {c->device().config().station}};
  attacks_ = std::make_unique<AttackEngine>(fabric_, *supervisor_, ac);

  const double first_hour = config_.date.day_of_year() * 24.0;
  auto weather = plant::load_weather(config_.weather, first_hour, config_.duration_s / 3600.0);
  if (!weather) {
    std::string msg = "weather: " + weather.error().message;
    if (weather.error().row) msg += " (row " + std::to_string(weather.error().row) + ")";
    throw ScenarioError(ConfigError{0, msg});
  }
  weather_ = *weather;
  state_ = plant::PlantState::initial(config_.plant.params, weather_.at_hour(first_hour));
  command_ = plant::ControlCommand::idle(config_.zones());
  command_.chw_setpoint = cs.chiller.chw_setpoint;

  const auto& ss = config_.supervisor;
  trend_slack_ = SimTime::from_seconds(ss.poll_timeout_s * (ss.poll_retries + 1) + 1.0);

  capture::CaptureConfig cc;
  cc.epoch_unix_us = epoch_unix_us();
  cc.keep_packets = options_.keep_packets;
  if (!options_.out_dir.empty()) {
    cc.pcap_path = options_.out_dir + "/traffic.pcap";
    cc.jsonl_path = options_.out_dir + "/traffic.jsonl";
    trends_csv_ = open_out(options_.out_dir + "/trends.csv");
    trends_csv_ << server::kTrendCsvHeader << '\n';
    audit_jsonl_ = open_out(options_.out_dir + "/audit.jsonl");
  }
  try {
    capture_ = std::make_unique<capture::Capture>(cc);
  } catch (const std::runtime_error& e) {
    throw RuntimeFault(e.what());
  }
  fabric_.set_tap(capture_->tap());
  supervisor_->on_audit = [this](const server::AuditRecord& r) { write_audit(r); };
}

Simulation::~Simulation() { fabric_.set_tap({}); }

std::int64_t Simulation::epoch_unix_us() const { return config_.date.unix_days() * 86400LL * 1000000LL; }

void Simulation::start() {
  if (started_) return;
  started_ = true;
  supervisor_->start();
  for (const auto& a : config_.attacks) attacks_->launch(a);
}

bool Simulation::step() {
  if (!started_) start();
  if (done()) return false;
  fabric_.step(now_);

  const std::int64_t t = now_.micros() / 1000000;
  if (t % control_period_s_ == 0) {
    const plant::MeasurementSet m = plant::measurement_snapshot(state_, noise_, t);
    for (auto& c : testbed_.all) c->control_step(m, now_, static_cast<double>(control_period_s_));
    // Rebooting devices latch their last outputs, so every device contributes.
    for (const auto& c : testbed_.all) c->apply(command_);
  }

  const double hour = config_.date.day_of_year() * 24.0 + now_.seconds() / 3600.0;
  plant::Exogenous exo{weather_.at_hour(hour), config_.controllers.ahu.schedule.occupied(now_)};
  try {
    state_ = plant::step_physics(config_.plant.params, state_, command_, exo, kPlantStep);
  } catch (const plant::PlantFault& e) {
    throw RuntimeFault(std::string(e.what()) + " at t=" + format_seconds(now_) + " s");
  }
  now_ += SimTime::from_whole_seconds(1);
  flush_trends(false);
  if (on_step) on_step(*this);
  return !done();
}

void Simulation::finish() {
  if (finished_) return;
  finished_ = true;
  // Polls issued before the end still resolve; nothing new is scheduled.
  const SimTime limit = config_.end() + trend_slack_ + SimTime::from_whole_seconds(60);
  while (!supervisor_->idle()) {
    auto due = fabric_.next_due();
    if (!due || *due > limit) break;
    fabric_.step(*due);
  }
  flush_trends(true);
  try {
    capture_->finish();
  } catch (const std::runtime_error& e) {
    throw RuntimeFault(e.what());
  }
  close_out(trends_csv_, "trends.csv");
  close_out(audit_jsonl_, "audit.jsonl");
}

void Simulation::run() {
  start();
  while (step()) {
  }
  finish();
}

void Simulation::flush_trends(bool all) {
  auto& store = supervisor_->trends();
  auto rows = all ? store.drain_all() : store.drain_before(now_ - trend_slack_);
  if (!trends_csv_.is_open()) return;
  for (const auto& row : rows) trends_csv_ << server::format_trend_row(row) << '\n';
  if (!trends_csv_) throw RuntimeFault("write failed on trends.csv");
}

void Simulation::write_audit(const server::AuditRecord& r) {
  if (!audit_jsonl_.is_open()) return;
  audit_jsonl_ << audit_json_line(r) << '\n';
  if (!audit_jsonl_) throw RuntimeFault("write failed on audit.jsonl");
}

}  // namespace bassim::harness
