#include "bassim/attack/attack_engine.hpp"

#include <algorithm>

namespace bassim::attack {

using namespace bacnet;

std::string_view to_string(AttackState s) {
  switch (s) {
    case AttackState::scheduled: return "scheduled";
    case AttackState::active: return "active";
    case AttackState::finished: return "finished";
    case AttackState::cancelled: return "cancelled";
  }
  return "?";
}

AttackEngine::AttackEngine(net::Fabric& fabric, server::Supervisor& supervisor, AttackerConfig config)
    : fabric_(fabric),
      supervisor_(supervisor),
      config_(std::move(config)),
      addr_(net::NodeAddr::ip(config_.ip_network, config_.address)),
      router_addr_(net::NodeAddr::ip(config_.ip_network, config_.router)) {
  fabric_.attach(net::SegmentId::ip, addr_, [this](const net::Packet& p, SimTime now) { on_packet(p, now); });
}

void AttackEngine::on_packet(const net::Packet&, SimTime) { ++responses_; }

bool AttackEngine::live(std::size_t index, SimTime now) {
  AttackRecord& r = record(index);
  if (r.state == AttackState::cancelled || r.state == AttackState::finished) return false;
  if (now >= attack_end(r.spec)) {
    r.state = AttackState::finished;
    return false;
  }
  r.state = AttackState::active;
  return true;
}

void AttackEngine::arm(std::size_t index, SimTime at, std::function<void(SimTime)> fn) {
  if (at >= attack_end(record(index).spec)) return;
  timers_[index].ids.push_back(fabric_.schedule(at, std::move(fn)));
}

std::string AttackEngine::launch(const AttackSpec& input) {
  AttackSpec spec = input;
  const SimTime now = fabric_.now();
  std::visit(
      [&](auto& a) {
        if (a.start < now) a.start = now;
      },
      spec);
  const std::size_t index = attacks_.size();
  attacks_.push_back(AttackRecord{"a" + std::to_string(index + 1), spec, AttackState::scheduled, 0, 0});

  // Mark the end so the state flips even when the last action came earlier.
  timers_[index].ids.push_back(fabric_.schedule(attack_end(spec), [this, index](SimTime t) { live(index, t); }));

  if (std::holds_alternative<FdiAttack>(spec)) {
    arm(index, attack_start(spec), [this, index](SimTime) { run_fdi(index, 0); });
  } else if (const auto* d = std::get_if<DeviceDos>(&spec)) {
    if (d->register_ttl_s > 0) {
      const std::uint16_t ttl = d->register_ttl_s;
      arm(index, d->start, [this, index, ttl](SimTime) { run_register(index, ttl, 0); });
    }
    arm(index, d->start, [this, index](SimTime) { run_reinit(index, 0); });
  } else if (const auto* r = std::get_if<RogueRegister>(&spec)) {
    const std::uint16_t ttl = r->ttl_s;
    arm(index, r->start, [this, index, ttl](SimTime) { run_register(index, ttl, 0); });
  }
  return attacks_.back().id;
}

bool AttackEngine::cancel(const std::string& id) {
  for (std::size_t i = 0; i < attacks_.size(); ++i) {
    AttackRecord& r = attacks_[i];
    if (r.id != id) continue;
    if (r.state == AttackState::finished || r.state == AttackState::cancelled) return false;
    r.state = AttackState::cancelled;
    for (auto t : timers_[i].ids) fabric_.cancel(t);
    timers_.erase(i);
    return true;
  }
  return false;
}

void AttackEngine::run_fdi(std::size_t index, std::int64_t k) {
  const SimTime now = fabric_.now();
  if (!live(index, now)) return;
  const FdiAttack spec = std::get<FdiAttack>(record(index).spec);
  ++record(index).requests_sent;
  if (spec.via == FdiVia::compromised_server) {
    supervisor_.write_point(spec.target_point, spec.value, spec.priority, server::Actor::attacker,
                            [this, index](const server::WriteOutcome& o) {
                              if (!o.ok()) ++record(index).failures;
                            });
  } else if (const server::PointInfo* p = supervisor_.find_point(spec.target_point)) {
    auto route = config_.device_routes.find(p->device);
    AppValue v = p->binary ? AppValue{Enumerated{spec.value != 0.0 ? 1u : 0u}}
                           : AppValue{Real{static_cast<float>(spec.value)}};
    auto apdu = build_write_property(p->object, PropertyId::present_value, v, spec.priority, next_invoke_++);
    if (route != config_.device_routes.end() && apdu) send_routed(route->second, *apdu);
    else ++record(index).failures;
  } else {
    ++record(index).failures;
  }
  const SimTime next = spec.start + SimTime::from_seconds(static_cast<double>(k + 1) * spec.rewrite_period_s);
  arm(index, next, [this, index, k](SimTime) { run_fdi(index, k + 1); });
}

void AttackEngine::run_reinit(std::size_t index, std::int64_t k) {
  const SimTime now = fabric_.now();
  if (!live(index, now)) return;
  const DeviceDos spec = std::get<DeviceDos>(record(index).spec);
  auto route = config_.device_routes.find(spec.target_device);
  if (route != config_.device_routes.end()) {
    // Fire-and-forget: no retries, no waiting for the device.
    send_routed(route->second, build_reinitialize(spec.state, std::nullopt, next_invoke_++));
    ++record(index).requests_sent;
  }
  const SimTime next = spec.start + SimTime::from_seconds(static_cast<double>(k + 1) / spec.rate);
  arm(index, next, [this, index, k](SimTime) { run_reinit(index, k + 1); });
}

void AttackEngine::run_register(std::size_t index, std::uint16_t ttl, std::int64_t k) {
  const SimTime now = fabric_.now();
  if (!live(index, now)) return;
  send_to_router(RegisterForeignDevice{ttl});
  // Refresh at half the TTL so the entry never lapses inside the window.
  const SimTime next = attack_start(record(index).spec) + SimTime::from_seconds(static_cast<double>(k + 1) * ttl / 2.0);
  arm(index, next, [this, index, ttl, k](SimTime) { run_register(index, ttl, k + 1); });
}

void AttackEngine::send_to_router(const BvllFrame& frame) {
  auto bytes = encode_frame(frame);
  if (bytes) fabric_.send(addr_, router_addr_, std::move(*bytes));
}

void AttackEngine::send_routed(const NetAddress& route, const Apdu& apdu) {
  send_to_router(OriginalUnicastNpdu{NpduMessage{Npdu{true, 0, route, std::nullopt, 255}, apdu}});
}

}  // namespace bassim::attack
