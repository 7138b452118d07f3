#include "bassim/server/supervisor.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace bassim::server {

using namespace bacnet;

std::string_view to_string(Actor actor) {
  switch (actor) {
    case Actor::operator_: return "operator";
    case Actor::supervisor: return "supervisor";
    case Actor::attacker: return "attacker";
  }
  return "?";
}

std::optional<Actor> actor_from_string(std::string_view s) {
  if (s == "operator") return Actor::operator_;
  if (s == "supervisor") return Actor::supervisor;
  if (s == "attacker") return Actor::attacker;
  return std::nullopt;
}

std::string_view to_string(WriteOutcome::Kind kind) {
  using K = WriteOutcome::Kind;
  switch (kind) {
    case K::ack: return "ack";
    case K::unknown_point: return "unknown-point";
    case K::not_writable: return "not-writable";
    case K::device_unknown: return "device-unknown";
    case K::no_invoke_id: return "no-invoke-id";
    case K::timeout: return "device-timeout";
    case K::device_error: return "device-error";
    case K::reject: return "reject";
  }
  return "?";
}

std::vector<DispatchRule> default_dispatch(std::size_t zones) {
  std::vector<DispatchRule> rules;
  for (std::size_t i = 1; i <= zones; ++i) {
    const std::string vav = "vav" + std::to_string(i);
    rules.push_back({vav + ".analog-value:1", 23.89, 29.44});
    rules.push_back({vav + ".analog-value:2", 21.11, 15.56});
  }
  rules.push_back({"ahu.analog-value:1", 12.78, 12.78});
  rules.push_back({"chiller.analog-value:1", 6.67, 6.67});
  return rules;
}

std::vector<AlarmRule> default_alarms(std::size_t zones) {
  std::vector<AlarmRule> rules;
  for (std::size_t i = 1; i <= zones; ++i) {
    const std::string vav = "vav" + std::to_string(i);
    rules.push_back(AlarmRule{vav + "-zone-temp-high", vav + ".analog-input:1", 26.5, std::nullopt, 0.5, 300.0});
  }
  return rules;
}

std::vector<std::string> default_monitored_points(std::size_t zones) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= zones; ++i) {
    const std::string vav = "vav" + std::to_string(i);
    out.push_back(vav + ".analog-input:1");
    out.push_back(vav + ".analog-input:2");
  }
  for (const char* p : {"ahu.analog-input:1", "ahu.analog-value:1", "ahu.analog-output:1", "ahu.analog-input:2",
                        "chiller.analog-input:1", "chiller.analog-value:1"})
    out.emplace_back(p);
  return out;
}

void SupervisorConfig::validate(const PointCatalog& catalog) const {
  std::set<std::string> ids;
  for (const auto& p : catalog) ids.insert(p.id);
  auto known = [&](const std::string& id, const char* what) {
    if (!ids.contains(id)) throw std::invalid_argument(std::string(what) + " refers to unknown point '" + id + "'");
  };
  std::set<std::string> seen;
  for (const auto& p : monitored_points) {
    known(p, "monitored point");
    if (!seen.insert(p).second) throw std::invalid_argument("monitored point '" + p + "' listed twice");
  }
  for (const auto& d : dispatch) known(d.point, "dispatch rule");
  for (const auto& a : alarms) known(a.point, "alarm rule");
  if (!(trend_interval_s > 0) || !(poll_timeout_s > 0) || poll_retries < 0 || !(write_timeout_s > 0) ||
      !(dispatch_period_s > 0) || !(rediscover_period_s > 0))
    throw std::invalid_argument("supervisor periods and timeouts must be positive");
  // A poll must resolve before the next poll of the same point.
  if (poll_timeout_s * (poll_retries + 1) >= trend_interval_s)
    throw std::invalid_argument("trend interval must exceed poll timeout x attempts");
  schedule.validate();
}

Supervisor::Supervisor(net::Fabric& fabric, SupervisorConfig config, PointCatalog catalog)
    : fabric_(fabric),
      config_(std::move(config)),
      catalog_(std::move(catalog)),
      addr_(net::NodeAddr::ip(config_.ip_network, config_.address)),
      router_addr_(net::NodeAddr::ip(config_.ip_network, config_.router)),
      alarms_(config_.alarms) {
  config_.validate(catalog_);
  for (std::size_t i = 0; i < catalog_.size(); ++i) point_index_[catalog_[i].id] = i;
  for (const auto& p : config_.monitored_points) monitored_.push_back(point_index_.at(p));
  fabric_.attach(net::SegmentId::ip, addr_, [this](const net::Packet& p, SimTime now) { on_packet(p, now); });
}

const PointInfo* Supervisor::find_point(const std::string& id) const {
  auto it = point_index_.find(id);
  return it == point_index_.end() ? nullptr : &catalog_[it->second];
}

const DeviceEntry* Supervisor::device_for(const PointInfo& point) const {
  auto it = devices_.find(point.device_instance);
  return it == devices_.end() ? nullptr : &it->second;
}

void Supervisor::start() {
  fabric_.schedule(SimTime{}, [this](SimTime) { discover(); });

  const double interval = config_.trend_interval_s;
  const double n = static_cast<double>(monitored_.size());
  for (std::size_t i = 0; i < monitored_.size(); ++i) {
    // Polls are spread evenly over the interval so requests never collide.
    const SimTime offset = SimTime::from_seconds((static_cast<double>(i) + 0.5) * interval / n);
    schedule_poll(i, offset);
  }

  const SimTime first_dispatch = SimTime::from_seconds(config_.dispatch_period_s);
  if (first_dispatch < config_.end && !config_.dispatch.empty())
    fabric_.schedule(first_dispatch, [this](SimTime now) { dispatch(now); });

  const SimTime first_check = SimTime::from_seconds(config_.rediscover_period_s);
  if (first_check < config_.end) fabric_.schedule(first_check, [this](SimTime now) { rediscover(now); });
}

void Supervisor::rediscover(SimTime now) {
  // Only needed while some configured device has never answered.
  bool missing = false;
  for (const auto& p : catalog_) missing |= !devices_.contains(p.device_instance);
  if (!missing) return;
  discover();
  const SimTime next = now + SimTime::from_seconds(config_.rediscover_period_s);
  if (next < config_.end) fabric_.schedule(next, [this](SimTime t) { rediscover(t); });
}

void Supervisor::discover() {
  NpduMessage msg{Npdu{false, 0, NetAddress{kGlobalBroadcastNet, {}}, std::nullopt, 255}, build_who_is()};
  auto bytes = encode_frame(OriginalBroadcastNpdu{msg});
  if (!bytes) return;
  ++stats_.who_is_sent;
  fabric_.send(addr_, std::nullopt, std::move(*bytes));
}

std::optional<std::uint8_t> Supervisor::allocate_invoke_id() {
  for (int i = 0; i < 256; ++i) {
    const std::uint8_t id = next_invoke_++;
    if (!pending_.contains(id)) return id;
  }
  return std::nullopt;
}

bool Supervisor::send_request(const NetAddress& route, const Apdu& apdu) {
  NpduMessage msg{Npdu{true, 0, route, std::nullopt, 255}, apdu};
  auto bytes = encode_frame(OriginalUnicastNpdu{msg});
  if (!bytes) return false;
  fabric_.send(addr_, router_addr_, std::move(*bytes));
  return true;
}

// ---------------------------------------------------------------- polling

void Supervisor::schedule_poll(std::size_t monitored_index, SimTime at) {
  if (at >= config_.end) return;
  fabric_.schedule(at, [this, monitored_index, at](SimTime) {
    schedule_poll(monitored_index, at + SimTime::from_seconds(config_.trend_interval_s));
    poll(monitored_index, at, 0);
  });
}

void Supervisor::poll(std::size_t monitored_index, SimTime sample_time, int attempt) {
  const std::size_t pi = monitored_[monitored_index];
  const PointInfo& point = catalog_[pi];
  Transaction tx;
  tx.kind = Transaction::Kind::read;
  tx.device_instance = point.device_instance;
  tx.point_index = pi;
  tx.sample_time = sample_time;
  tx.attempt = attempt;

  const DeviceEntry* dev = device_for(point);
  auto invoke = allocate_invoke_id();
  if (!dev || !invoke) {
    ++stats_.read_errors;
    finish_read(tx, std::nullopt, fabric_.now());
    return;
  }
  tx.route = dev->route;
  if (!send_request(tx.route, build_read_property(point.object, PropertyId::present_value, *invoke))) {
    ++stats_.read_errors;
    finish_read(tx, std::nullopt, fabric_.now());
    return;
  }
  ++stats_.reads_sent;
  const std::uint8_t id = *invoke;
  tx.timeout = fabric_.schedule(fabric_.now() + SimTime::from_seconds(config_.poll_timeout_s),
                                [this, id](SimTime) { poll_timeout(id); });
  pending_.emplace(id, std::move(tx));
}

void Supervisor::poll_timeout(std::uint8_t invoke_id) {
  auto it = pending_.find(invoke_id);
  if (it == pending_.end()) return;
  Transaction tx = std::move(it->second);
  pending_.erase(it);
  ++stats_.read_timeouts;
  if (tx.attempt < config_.poll_retries) {
    for (std::size_t m = 0; m < monitored_.size(); ++m) {
      if (monitored_[m] == tx.point_index) {
        poll(m, tx.sample_time, tx.attempt + 1);
        return;
      }
    }
  }
  finish_read(tx, std::nullopt, fabric_.now());
}

void Supervisor::finish_read(const Transaction& tx, std::optional<float> value, SimTime) {
  const std::string& point = catalog_[tx.point_index].id;
  TrendRecord rec{tx.sample_time, value, value ? Quality::ok : Quality::missing};
  trends_.append(point, rec);
  if (on_trend) on_trend(point, rec);
  if (value) {
    for (const auto& change : alarms_.observe(point, tx.sample_time, *value))
      if (on_alarm) on_alarm(alarms_.events()[change.event], change.opened);
  }
}

// ---------------------------------------------------------------- writes

void Supervisor::write_point(const std::string& point_id, double value, std::optional<std::uint8_t> priority,
                             Actor actor, WriteCallback done) {
  auto fail = [&](WriteOutcome::Kind kind, std::string detail) {
    if (done) done(WriteOutcome{kind, std::move(detail)});
  };
  const PointInfo* point = find_point(point_id);
  if (!point) return fail(WriteOutcome::Kind::unknown_point, "unknown point '" + point_id + "'");
  if (!point->commandable) return fail(WriteOutcome::Kind::not_writable, point_id + " is not commandable");
  const std::uint8_t prio = priority.value_or(16);
  if (prio < 1 || prio > 16) return fail(WriteOutcome::Kind::device_error, "priority must be 1..16");
  if (!std::isfinite(value)) return fail(WriteOutcome::Kind::device_error, "value must be finite");
  const DeviceEntry* dev = device_for(*point);
  if (!dev) return fail(WriteOutcome::Kind::device_unknown, "device " + point->device + " not discovered");
  auto invoke = allocate_invoke_id();
  if (!invoke) return fail(WriteOutcome::Kind::no_invoke_id, "no free invoke id");

  AppValue v = point->binary ? AppValue{Enumerated{value != 0.0 ? 1u : 0u}} : AppValue{Real{static_cast<float>(value)}};
  auto apdu = build_write_property(point->object, PropertyId::present_value, v, prio, *invoke);
  if (!apdu) return fail(WriteOutcome::Kind::device_error, std::string(to_string(apdu.error())));
  if (!send_request(dev->route, *apdu)) return fail(WriteOutcome::Kind::device_error, "encode failed");
  ++stats_.writes_sent;

  Transaction tx;
  tx.kind = Transaction::Kind::write;
  tx.device_instance = point->device_instance;
  tx.route = dev->route;
  tx.point_index = point_index_.at(point_id);
  tx.audit = AuditRecord{fabric_.now(), {}, actor, point_id, value, prio, *invoke, {}};
  tx.done = std::move(done);
  const std::uint8_t id = *invoke;
  tx.timeout = fabric_.schedule(fabric_.now() + SimTime::from_seconds(config_.write_timeout_s),
                                [this, id](SimTime) { write_timeout(id); });
  pending_.emplace(id, std::move(tx));
}

void Supervisor::write_timeout(std::uint8_t invoke_id) {
  auto it = pending_.find(invoke_id);
  if (it == pending_.end()) return;
  Transaction tx = std::move(it->second);
  pending_.erase(it);
  finish_write(std::move(tx), WriteOutcome{WriteOutcome::Kind::timeout, "no response within write timeout"},
               fabric_.now());
}

void Supervisor::finish_write(Transaction tx, WriteOutcome outcome, SimTime now) {
  tx.audit.completed = now;
  tx.audit.outcome = outcome;
  audit_.push_back(tx.audit);
  if (on_audit) on_audit(audit_.back());
  if (tx.done) tx.done(outcome);
}

void Supervisor::dispatch(SimTime now) {
  const bool occupied = config_.schedule.occupied(now);
  for (const auto& rule : config_.dispatch)
    write_point(rule.point, occupied ? rule.occupied : rule.unoccupied, 16, Actor::supervisor);
  const SimTime next = now + SimTime::from_seconds(config_.dispatch_period_s);
  if (next < config_.end) fabric_.schedule(next, [this](SimTime t) { dispatch(t); });
}

// ---------------------------------------------------------------- receive

void Supervisor::on_packet(const net::Packet& packet, SimTime now) {
  auto frame = decode_frame(packet.payload);
  if (!frame) return;
  const NpduMessage* msg = message_of(*frame);
  if (!msg) return;
  const NetAddress source =
      msg->npdu.source.value_or(NetAddress{config_.ip_network, packet.src.mac_bytes()});
  std::visit(
      [&](const auto& apdu) {
        using T = std::decay_t<decltype(apdu)>;
        if constexpr (std::is_same_v<T, UnconfirmedRequest>) {
          if (const auto* iam = std::get_if<IAm>(&apdu.body)) on_i_am(*iam, source, now);
        } else if constexpr (!std::is_same_v<T, ConfirmedRequest>) {
          on_response(apdu.invoke_id, source, msg->apdu, now);
        }
      },
      msg->apdu);
}

void Supervisor::on_i_am(const IAm& iam, const NetAddress& source, SimTime now) {
  const std::uint32_t inst = iam.device.instance();
  std::string name;
  for (const auto& p : catalog_)
    if (p.device_instance == inst) name = p.device;
  if (name.empty()) return;  // not part of the configured point map
  devices_[inst] = DeviceEntry{iam.device, name, source, iam.max_apdu, now};
}

void Supervisor::on_response(std::uint8_t invoke_id, const NetAddress& source, const Apdu& apdu, SimTime now) {
  auto it = pending_.find(invoke_id);
  if (it == pending_.end() || !(it->second.route == source)) return;
  Transaction tx = std::move(it->second);
  pending_.erase(it);
  fabric_.cancel(tx.timeout);
  if (auto dev = devices_.find(tx.device_instance); dev != devices_.end()) dev->second.last_seen = now;

  if (tx.kind == Transaction::Kind::read) {
    std::optional<float> value;
    if (const auto* ack = std::get_if<ComplexAck>(&apdu)) {
      if (const auto* rp = std::get_if<ReadPropertyAck>(&ack->body)) {
        if (const auto* r = std::get_if<Real>(&rp->value)) value = r->value;
        else if (const auto* e = std::get_if<Enumerated>(&rp->value)) value = static_cast<float>(e->value);
      }
    }
    if (!value) ++stats_.read_errors;
    finish_read(tx, value, now);
    return;
  }

  WriteOutcome outcome;
  if (std::holds_alternative<SimpleAck>(apdu)) {
    outcome = WriteOutcome{WriteOutcome::Kind::ack, ""};
  } else if (const auto* err = std::get_if<ErrorPdu>(&apdu)) {
    outcome = WriteOutcome{WriteOutcome::Kind::device_error, "error class " + std::to_string(err->error_class) +
                                                                 " code " + std::to_string(err->error_code)};
  } else if (const auto* rej = std::get_if<RejectPdu>(&apdu)) {
    outcome = WriteOutcome{WriteOutcome::Kind::reject, "reject reason " + std::to_string(rej->reason)};
  } else {
    outcome = WriteOutcome{WriteOutcome::Kind::device_error, "unexpected response " + service_label(apdu)};
  }
  finish_write(std::move(tx), std::move(outcome), now);
}

}  // namespace bassim::server
