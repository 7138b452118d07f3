#include "doctest.h"

#include <fstream>
#include <sstream>

#include "bassim/attack/attack_engine.hpp"
#include "bassim/attack/scenario.hpp"
#include "bassim/attack/toml_lite.hpp"
#include "bassim/control/controllers.hpp"
#include "bassim/harness/simulation.hpp"
#include "bassim/net/router.hpp"

using namespace bassim;
using namespace bassim::attack;

namespace {

SimTime hms(int h, int m = 0, int s = 0) { return SimTime::from_whole_seconds(h * 3600 + m * 60 + s); }

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Rig {
  net::Fabric fabric;
  net::Router router{fabric, net::Router::Config{}};
  control::TestbedControllers testbed =
      control::make_testbed(5, control::VavConfig{}, control::AhuConfig{}, control::ChillerConfig{}, 10.0);
  std::unique_ptr<server::Supervisor> sup;
  std::unique_ptr<AttackEngine> engine;
  std::vector<net::WireRecord> attacker_packets;

  Rig() {
    for (auto& c : testbed.all) c->device().attach(fabric);
    server::SupervisorConfig cfg;
    cfg.dispatch = server::default_dispatch(5);
    sup = std::make_unique<server::Supervisor>(fabric, cfg, harness::build_catalog(testbed));
    AttackerConfig ac;
    for (auto& c : testbed.all)
      ac.device_routes[c->name()] = bacnet::NetAddress{net::kDefaultFieldNetwork, {c->device().config().station}};
    engine = std::make_unique<AttackEngine>(fabric, *sup, ac);
    fabric.set_tap([this](const net::WireRecord& r) {
      if (r.src == engine->addr()) attacker_packets.push_back(r);
    });
    sup->start();
  }
};

}  // namespace

TEST_CASE("temperature and clock parsing") {
  CHECK(parse_temperature("95F") == doctest::Approx(35.0));
  CHECK(parse_temperature("75F") == doctest::Approx(23.8889).epsilon(1e-4));
  CHECK(parse_temperature("35C") == doctest::Approx(35.0));
  CHECK(parse_temperature("12.78") == doctest::Approx(12.78));
  CHECK_FALSE(parse_temperature("hot").has_value());
  CHECK(parse_clock("10:00") == hms(10));
  CHECK(parse_clock("10:00:30") == hms(10, 0, 30));
  // Multi-day scenarios count hours past midnight of the first day.
  CHECK(parse_clock("25:00") == hms(25));
  CHECK_FALSE(parse_clock("10:60").has_value());
  CHECK_FALSE(parse_clock("10:00x").has_value());
  CHECK_FALSE(parse_clock("36000").has_value());
}

TEST_CASE("dates") {
  const auto d = Date::parse("2023-08-01");
  REQUIRE(d.has_value());
  CHECK(d->day_of_year() == 212);
  CHECK(d->unix_days() == 19570);
  CHECK(d->to_string() == "2023-08-01");
  CHECK_FALSE(Date::parse("2023-02-30").has_value());
}

TEST_CASE("shipped scenarios parse and round-trip through the resolved form") {
  for (const char* name : {"baseline", "fdi", "dos"}) {
    CAPTURE(name);
    auto cfg = load_scenario(std::string(BASSIM_SOURCE_DIR) + "/scenarios/" + name + ".toml");
    REQUIRE_MESSAGE(cfg.has_value(), cfg.error().to_string());
    CHECK(cfg->date.to_string() == "2023-08-01");
    CHECK(cfg->seed == 42);
    CHECK(cfg->duration_s == 86400.0);
    const std::string resolved = resolved_toml(*cfg);
    auto again = parse_scenario(resolved);
    REQUIRE_MESSAGE(again.has_value(), again.error().to_string());
    CHECK(resolved_toml(*again) == resolved);
  }
  auto fdi = load_scenario(std::string(BASSIM_SOURCE_DIR) + "/scenarios/fdi.toml");
  REQUIRE(fdi->attacks.size() == 1);
  const auto& f = std::get<FdiAttack>(fdi->attacks[0]);
  CHECK(f.value == doctest::Approx(35.0));
  CHECK(f.start == hms(10));
  CHECK(f.end == hms(11));
  auto dos = load_scenario(std::string(BASSIM_SOURCE_DIR) + "/scenarios/dos.toml");
  const auto& d = std::get<DeviceDos>(dos->attacks[0]);
  CHECK(d.rate == 1.0);
  CHECK(d.state == bacnet::ReinitState::warmstart);
  CHECK(d.end == hms(11, 30));
}

TEST_CASE("scenario errors carry line numbers") {
  auto bad_type = parse_scenario("name = \"x\"\n\n[[attacks]]\ntype = \"flood\"\n");
  REQUIRE_FALSE(bad_type.has_value());
  CHECK(bad_type.error().line == 4);

  auto syntax = parse_scenario("name = \"x\"\nseed = \n");
  REQUIRE_FALSE(syntax.has_value());
  CHECK(syntax.error().line == 2);

  auto bad_date = parse_scenario("date = \"2023-13-01\"\n");
  REQUIRE_FALSE(bad_date.has_value());
  CHECK(bad_date.error().line == 1);
}

TEST_CASE("attack validation against the testbed") {
  auto cfg = parse_scenario(
      "duration_h = 24\n"
      "[[attacks]]\n"
      "type = \"dos\"\n"
      "target_device = \"ahu\"\n"
      "start = \"11:00\"\n"
      "end = \"10:00\"\n");
  REQUIRE(cfg.has_value());
  Rig rig;
  auto err = validate_attacks(cfg->attacks, cfg->attack_lines, rig.sup->catalog(), cfg->end());
  REQUIRE(err.has_value());
  CHECK(err->line == 2);
  CHECK(err->message == "attack end must be after start");
  CHECK_THROWS_AS(harness::Simulation{*cfg}, harness::ScenarioError);

  std::vector<AttackSpec> overlap{DeviceDos{"ahu", 1.0, bacnet::ReinitState::warmstart, hms(10), hms(11)},
                                  DeviceDos{"ahu", 1.0, bacnet::ReinitState::warmstart, hms(10, 30), hms(12)}};
  CHECK(validate_attacks(overlap, {}, rig.sup->catalog(), hms(24)).has_value());
  std::vector<AttackSpec> ro{FdiAttack{"ahu.analog-input:1", 35.0, hms(10), hms(11)}};
  CHECK(validate_attacks(ro, {}, rig.sup->catalog(), hms(24))->message.find("not commandable") != std::string::npos);
  std::vector<AttackSpec> ok{FdiAttack{"ahu.analog-value:1", 35.0, hms(10), hms(11)}};
  CHECK_FALSE(validate_attacks(ok, {}, rig.sup->catalog(), hms(24)).has_value());
}

TEST_CASE("attack json round-trip") {
  const AttackSpec dos = DeviceDos{"ahu", 0.05, bacnet::ReinitState::coldstart, hms(10), hms(11, 30), 0};
  auto back = attack_from_json(attack_to_json(dos));
  REQUIRE(back.has_value());
  const auto& d = std::get<DeviceDos>(*back);
  CHECK(d.rate == 0.05);
  CHECK(d.state == bacnet::ReinitState::coldstart);
  CHECK(d.start == hms(10));
  CHECK(d.register_ttl_s == 0);
  CHECK_FALSE(attack_from_json(nlohmann::json{{"type", "fdi"}}).has_value());
}

TEST_CASE("dos flood: 5400 requests, nothing outside the window") {
  Rig rig;
  rig.engine->launch(DeviceDos{"ahu", 1.0, bacnet::ReinitState::warmstart, hms(10), hms(11, 30)});
  rig.fabric.step(hms(9, 59, 59));
  CHECK(rig.engine->attacks()[0].state == AttackState::scheduled);
  CHECK(rig.attacker_packets.empty());
  rig.fabric.step(hms(10, 0, 1));
  CHECK(rig.engine->attacks()[0].state == AttackState::active);
  rig.fabric.step(hms(12));
  CHECK(rig.engine->attacks()[0].state == AttackState::finished);
  CHECK(rig.engine->attacks()[0].requests_sent == 5400);

  std::size_t reinit = 0;
  for (const auto& p : rig.attacker_packets) {
    CHECK(p.time >= hms(10));
    CHECK(p.time < hms(11, 30));
    auto f = bacnet::decode_frame(p.raw);
    REQUIRE(f.has_value());
    if (bacnet::service_label(*f) == "reinitialize-device") ++reinit;
  }
  CHECK(reinit == 5400);
  CHECK(rig.testbed.ahu->device().rebooting(hms(11, 29, 59)));
}

TEST_CASE("fdi: writes from 10:00, overrides dispatch, stops at 11:00") {
  Rig rig;
  rig.engine->launch(FdiAttack{"ahu.analog-value:1", 35.0, hms(10), hms(11)});
  auto sat_sp = [&] { return rig.testbed.ahu->device().points().real(control::pts::av(1)); };
  // The 10:00 dispatch lands in the same instant; the next rewrite wins.
  rig.fabric.step(hms(10, 1, 1));
  CHECK(sat_sp() == doctest::Approx(35.0));
  rig.fabric.step(hms(10, 59, 59));
  CHECK(sat_sp() == doctest::Approx(35.0));
  rig.fabric.step(hms(11, 5, 1));
  CHECK(sat_sp() == doctest::Approx(12.78));
  const auto& rec = rig.engine->attacks()[0];
  CHECK(rec.state == AttackState::finished);
  CHECK(rec.requests_sent == 60);
  CHECK(rec.failures == 0);
  std::size_t attacker_audit = 0;
  for (const auto& a : rig.sup->audit())
    if (a.actor == server::Actor::attacker) {
      ++attacker_audit;
      CHECK(a.issued >= hms(10));
      CHECK(a.issued < hms(11));
    }
  CHECK(attacker_audit == 60);

  // Every supervisor dispatch inside the window is overwritten within 60 s.
  int dispatches = 0;
  for (const auto& a : rig.sup->audit()) {
    if (a.actor != server::Actor::supervisor || a.point != "ahu.analog-value:1") continue;
    if (a.completed < hms(10) || a.completed >= hms(10, 59)) continue;
    ++dispatches;
    bool overwritten = false;
    for (const auto& b : rig.sup->audit())
      overwritten |= b.actor == server::Actor::attacker && b.completed >= a.completed &&
                     b.completed <= a.completed + SimTime::from_whole_seconds(60);
    CHECK(overwritten);
  }
  CHECK(dispatches == 12);
}

TEST_CASE("no attacks means no attack timers") {
  Rig rig;
  rig.fabric.step(hms(24));
  CHECK(rig.engine->attacks().empty());
  CHECK(rig.attacker_packets.empty());
}

TEST_CASE("cancelling stops the flood") {
  Rig rig;
  const std::string id = rig.engine->launch(DeviceDos{"ahu", 1.0, bacnet::ReinitState::warmstart, hms(10), hms(11)});
  rig.fabric.step(hms(10, 10));
  CHECK(rig.engine->cancel(id));
  CHECK_FALSE(rig.engine->cancel(id));
  const auto sent = rig.engine->attacks()[0].requests_sent;
  rig.fabric.step(hms(11));
  CHECK(rig.engine->attacks()[0].requests_sent == sent);
  CHECK(rig.engine->attacks()[0].state == AttackState::cancelled);
}

TEST_CASE("toml subset") {
  auto doc = toml::parse("a = 1\nb = \"x\" # c\n[t]\nk = [1, 2,\n 3]\nm = {x = true}\n[[arr]]\nv = 1.5\n[[arr]]\nv = 2\n");
  REQUIRE(doc.has_value());
  CHECK(toml::find(*doc, "a")->integer);
  CHECK(toml::find(*doc, "b")->str() == "x");
  const auto* t = toml::find(*doc, "t");
  REQUIRE(t);
  CHECK(toml::find(t->table(), "k")->arr().size() == 3);
  CHECK(toml::find(*doc, "arr")->arr().size() == 2);
  auto dup = toml::parse("a = 1\na = 2\n");
  REQUIRE_FALSE(dup.has_value());
  CHECK(dup.error().line == 2);
}
