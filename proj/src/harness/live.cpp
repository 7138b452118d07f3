#include "bassim/harness/live.hpp"

#include <iostream>
#include <thread>

#include "bassim/harness/bundle.hpp"
#include "httplib.h"

namespace bassim::harness {

using nlohmann::json;
using server::ApiCommand;
using server::ApiResult;
using server::api_error;

void Pacer::set_speed(std::optional<double> speed, SimTime sim_now) {
  speed_ = speed;
  reset(sim_now);
}

void Pacer::reset(SimTime sim_now) {
  wall0_ = Clock::now();
  sim0_ = sim_now;
}

Pacer::Clock::duration Pacer::remaining(SimTime sim_now) const {
  if (!speed_) return Clock::duration::zero();
  const double wall_s = (sim_now - sim0_).seconds() / *speed_;
  const auto due = wall0_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(wall_s));
  const auto now = Clock::now();
  return due > now ? due - now : Clock::duration::zero();
}

namespace {

json audit_json(const server::AuditRecord& r) { return json::parse(audit_json_line(r)); }

json device_value(const control::Controller& c, const bacnet::ObjectId& id) {
  const control::Point* p = c.device().points().find(id);
  if (!p) return nullptr;
  const auto& v = p->present_value();
  if (const auto* r = std::get_if<bacnet::Real>(&v)) return r->value;
  if (const auto* e = std::get_if<bacnet::Enumerated>(&v)) return e->value;
  return nullptr;
}

}  // namespace

std::shared_ptr<server::ApiSnapshot> make_snapshot(Simulation& sim, std::optional<double> speed, bool running,
                                                   bool paused) {
  auto s = std::make_shared<server::ApiSnapshot>();
  const SimTime now = sim.now();
  s->sim_time = now.seconds();
  s->date = sim.config().date.to_string();
  s->speed = speed;
  s->running = running;
  s->paused = paused;

  auto& sup = sim.supervisor();
  for (const auto& [instance, d] : sup.devices()) {
    std::string mac;
    for (auto b : d.route.mac) mac += (mac.empty() ? "" : ":") + std::to_string(b);
    s->devices.push_back({{"instance", instance},
                          {"name", d.name},
                          {"network", d.route.network},
                          {"mac", mac},
                          {"max_apdu", d.max_apdu},
                          {"last_seen", d.last_seen.seconds()}});
  }

  std::map<std::string, const control::Controller*> by_name;
  for (const auto& c : sim.controllers().all) by_name[c->name()] = c.get();
  for (const auto& p : sup.catalog()) {
    json j{{"id", p.id},
           {"device", p.device},
           {"object", p.object.to_string()},
           {"name", p.name},
           {"units", static_cast<int>(p.units)},
           {"commandable", p.commandable},
           {"monitored", false},
           {"value", nullptr},
           {"quality", "missing"},
           {"time", nullptr}};
    if (const auto* latest = sup.trends().latest(p.id)) {
      j["monitored"] = true;
      j["value"] = latest->value ? json(*latest->value) : json(nullptr);
      j["time"] = latest->time.seconds();
      // Older than two intervals counts as stale for display.
      const bool stale = (now - latest->time).seconds() > 2.0 * sup.config().trend_interval_s;
      j["quality"] = stale ? "stale" : std::string(server::to_string(latest->quality));
    }
    auto c = by_name.find(p.device);
    if (c != by_name.end()) {
      j["device_value"] = device_value(*c->second, p.object);
      if (p.commandable)
        if (const auto* pt = c->second->device().points().find(p.object)) j["active_priority"] = pt->active_priority();
    }
    s->points.push_back(std::move(j));
  }

  const auto& events = sup.alarms().events();
  for (const auto& e : events) {
    json a = alarm_json(e);
    a["active"] = !e.cleared.has_value();
    s->alarms.push_back(std::move(a));
  }
  for (const auto& r : sup.audit()) s->audit.push_back(audit_json(r));
  for (const auto& r : sim.attacks().attacks()) {
    json a = attack_record_json(r);
    s->attacks.push_back(std::move(a));
  }

  json flows = json::array();
  for (const auto& [key, f] : sim.capture().flows().flows())
    flows.push_back({{"src", f.src}, {"dst", f.dst}, {"packets", f.packets}, {"rate_pps", f.rate_pps()}});
  s->traffic = {{"records", sim.capture().jsonl_count()},
                {"ip_packets", sim.capture().pcap_count()},
                {"flows", std::move(flows)}};
  return s;
}

void execute_command(Simulation& sim, ApiCommand c, LiveControl& control) {
  auto answer = [result = c.result](ApiResult r) { result->set_value(std::move(r)); };
  switch (c.kind) {
    case ApiCommand::Kind::write_point: {
      const double value = c.body["value"].get<double>();
      std::optional<std::uint8_t> priority;
      if (c.body.contains("priority")) priority = static_cast<std::uint8_t>(c.body["priority"].get<int>());
      const std::string point = c.target;
      sim.supervisor().write_point(point, value, priority, server::Actor::operator_,
                                   [answer, point](const server::WriteOutcome& o) {
                                     using K = server::WriteOutcome::Kind;
                                     int status = 200;
                                     switch (o.kind) {
                                       case K::ack: status = 200; break;
                                       case K::unknown_point: status = 404; break;
                                       case K::not_writable: status = 409; break;
                                       case K::device_unknown:
                                       case K::no_invoke_id: status = 503; break;
                                       case K::timeout: status = 504; break;
                                       case K::device_error:
                                       case K::reject: status = 502; break;
                                     }
                                     json body{{"point", point}, {"outcome", std::string(server::to_string(o.kind))}};
                                     if (!o.detail.empty()) body["detail"] = o.detail;
                                     if (status != 200) body["error"] = std::string(server::to_string(o.kind));
                                     answer(ApiResult{status, body});
                                   });
      return;
    }
    case ApiCommand::Kind::launch_attack: {
      auto spec = attack::attack_from_json(c.body);
      if (!spec) return answer(api_error(400, spec.error()));
      const SimTime now = sim.fabric().now();
      if (attack::attack_end(*spec) <= now) return answer(api_error(400, "attack window has already ended"));
      if (const auto* d = std::get_if<attack::DeviceDos>(&*spec)) {
        for (const auto& r : sim.attacks().attacks()) {
          const auto* other = std::get_if<attack::DeviceDos>(&r.spec);
          if (!other || other->target_device != d->target_device) continue;
          if (r.state == attack::AttackState::finished || r.state == attack::AttackState::cancelled) continue;
          if (d->start < other->end && other->start < d->end)
            return answer(api_error(409, "overlaps flood " + r.id + " on device '" + d->target_device + "'"));
        }
      }
      if (auto err = attack::validate_attacks({*spec}, {0}, sim.catalog(), sim.config().end()))
        return answer(api_error(400, err->message));
      const std::string id = sim.attacks().launch(*spec);
      for (const auto& r : sim.attacks().attacks())
        if (r.id == id) {
          json body = attack_record_json(r);
          return answer(ApiResult{201, std::move(body)});
        }
      return answer(api_error(500, "launched attack not found"));
    }
    case ApiCommand::Kind::cancel_attack:
      if (!sim.attacks().cancel(c.target)) return answer(api_error(404, "no active attack '" + c.target + "'"));
      return answer(ApiResult{200, json{{"id", c.target}, {"state", "cancelled"}}});
    case ApiCommand::Kind::pause:
      control.paused = true;
      break;
    case ApiCommand::Kind::resume:
      control.paused = false;
      control.speed_changed = true;  // re-anchor pacing
      break;
    case ApiCommand::Kind::speed: {
      const auto& m = c.body["multiplier"];
      control.speed = m.is_string() ? std::nullopt : std::optional<double>(m.get<double>());
      control.speed_changed = true;
      break;
    }
  }
  answer(ApiResult{200, json{{"sim_time", sim.now().seconds()},
                             {"paused", control.paused},
                             {"speed", control.speed ? json(*control.speed) : json("max")}}});
}

int serve(const attack::ScenarioConfig& config, const ServeOptions& options, const std::atomic<bool>& stop) {
  write_resolved(config, options.out_dir);
  Simulation sim(config, SimulationOptions{options.out_dir, false});
  server::ApiState state;
  sim.supervisor().on_trend = [&state](const std::string& point, const server::TrendRecord& r) {
    state.append_trend(point, r);
  };

  httplib::Server http;
  // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  server::ApiRouter router(state, options.token);
  server::mount_api(http, router, state, options.stream_period, options.static_dir);
  int port = options.port;
  if (port == 0) {
    port = http.bind_to_any_port(options.host);
    if (port < 0) {
      std::cerr << "error: cannot bind " << options.host << "\n";
      return 2;
    }
  } else if (!http.bind_to_port(options.host, port)) {
    std::cerr << "error: port " << port << " is busy or not bindable on " << options.host << "\n";
    return 2;
  }
  // Clients connecting right away see the scenario, not an empty default.
  state.publish(make_snapshot(sim, options.speed, true, false));
  std::thread listener([&http] { http.listen_after_bind(); });
  if (options.on_listening) options.on_listening(port);

  LiveControl control;
  control.speed = options.speed;
  Pacer pacer(control.speed);
  bool finalized = false;
  int code = 0;
  auto finalize = [&] {
    if (finalized) return;
    finalized = true;
    sim.finish();
    write_run_outputs(sim, options.out_dir);
  };
  auto last_publish = Pacer::Clock::now() - std::chrono::seconds(1);
  auto publish = [&](bool force) {
    const auto now = Pacer::Clock::now();
    if (!force && now - last_publish < std::chrono::milliseconds(100)) return;
    last_publish = now;
    state.publish(make_snapshot(sim, control.speed, !sim.done() && !stop, control.paused));
  };

  try {
    sim.start();
    publish(true);
    while (!stop) {
      bool changed = false;
      for (auto& c : state.drain()) {
        execute_command(sim, std::move(c), control);
        changed = true;
      }
      if (control.speed_changed) {
        pacer.set_speed(control.speed, sim.now());
        control.speed_changed = false;
      }
      if (sim.done()) {
        if (!finalized) {
          finalize();
          publish(true);
          if (options.exit_at_end) break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        continue;
      }
      if (control.paused) {
        pacer.reset(sim.now());
        if (changed) publish(true);
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        continue;
      }
      const auto wait = pacer.remaining(sim.now() + SimTime::from_whole_seconds(1));
      if (wait > Pacer::Clock::duration::zero()) {
        std::this_thread::sleep_for(std::min<Pacer::Clock::duration>(wait, std::chrono::milliseconds(20)));
        publish(changed);
        continue;
      }
      sim.step();
      publish(changed);
    }
    finalize();
    publish(true);
  } catch (const RuntimeFault& e) {
    std::cerr << "runtime fault: " << e.what() << "\n";
    code = 3;
  } catch (const std::exception& e) {
    std::cerr << "runtime fault: " << e.what() << "\n";
    code = 3;
  }
  state.close();
  http.stop();
  listener.join();
  return code;
}

}  // namespace bassim::harness
