#include "doctest.h"

#include <random>

#include "bassim/control/controllers.hpp"
#include "bassim/harness/simulation.hpp"
#include "bassim/net/router.hpp"
#include "bassim/server/alarm.hpp"
#include "bassim/server/supervisor.hpp"
#include "bassim/server/trend.hpp"

using namespace bassim;
using namespace bassim::server;

namespace {

SimTime hms(int h, int m = 0, int s = 0) { return SimTime::from_whole_seconds(h * 3600 + m * 60 + s); }

// Fabric, router, the seven field devices and a supervisor, without the plant.
struct Rig {
  net::Fabric fabric;
  net::Router router{fabric, net::Router::Config{}};
  control::TestbedControllers testbed =
      control::make_testbed(5, control::VavConfig{}, control::AhuConfig{}, control::ChillerConfig{}, 10.0);
  std::unique_ptr<Supervisor> sup;

  explicit Rig(SupervisorConfig cfg = defaults()) {
    for (auto& c : testbed.all) c->device().attach(fabric);
    sup = std::make_unique<Supervisor>(fabric, std::move(cfg), harness::build_catalog(testbed));
  }

  static SupervisorConfig defaults() {
    SupervisorConfig c;
    c.monitored_points = default_monitored_points(5);
    c.dispatch = default_dispatch(5);
    c.alarms = default_alarms(5);
    return c;
  }

  void run_to(SimTime t) { fabric.step(t); }
};

}  // namespace

TEST_CASE("discovery finds all seven devices and is idempotent") {
  Rig rig;
  rig.sup->discover();
  rig.run_to(hms(0, 0, 1));
  REQUIRE(rig.sup->devices().size() == 7);
  const auto first = rig.sup->devices();
  rig.sup->discover();
  rig.run_to(hms(0, 0, 2));
  REQUIRE(rig.sup->devices().size() == 7);
  for (const auto& [inst, entry] : first) {
    CHECK(rig.sup->devices().at(inst).name == entry.name);
    CHECK(rig.sup->devices().at(inst).route == entry.route);
  }
  const auto& ahu = rig.sup->devices().at(1201);
  CHECK(ahu.route.network == net::kDefaultFieldNetwork);
  CHECK(ahu.route.mac == Bytes{21});
}

TEST_CASE("a rebooting device misses discovery") {
  Rig rig;
  rig.testbed.ahu->device().handle_request(bacnet::build_reinitialize(bacnet::ReinitState::warmstart, {}, 1), SimTime{});
  rig.sup->discover();
  rig.run_to(hms(0, 0, 1));
  CHECK(rig.sup->devices().size() == 6);
  CHECK_FALSE(rig.sup->devices().contains(1201));
}

TEST_CASE("polling a healthy device yields ok records and the expected row count") {
  SupervisorConfig cfg = Rig::defaults();
  cfg.monitored_points.resize(10);
  cfg.dispatch.clear();
  cfg.alarms.clear();
  Rig rig(cfg);
  rig.sup->start();
  rig.run_to(hms(24) + SimTime::from_whole_seconds(10));
  CHECK(rig.sup->trends().size() == 14400);  // 24 h x 60 samples/h x 10 points
  for (const auto& p : rig.sup->trends().points()) CHECK(rig.sup->trends().missing_count(p) == 0);
  CHECK(rig.sup->trends().latest("vav1.analog-input:1")->quality == Quality::ok);
}

TEST_CASE("setpoint dispatch follows the occupancy schedule") {
  Rig rig;
  rig.sup->start();
  rig.run_to(hms(7, 1));
  std::optional<double> at_0655, at_0700;
  for (const auto& a : rig.sup->audit()) {
    if (a.point != "vav1.analog-value:1") continue;
    if (a.issued == hms(6, 55)) at_0655 = a.value;
    if (a.issued == hms(7, 0)) at_0700 = a.value;
    CHECK(a.actor == Actor::supervisor);
    CHECK(a.outcome.ok());
  }
  REQUIRE(at_0655.has_value());
  REQUIRE(at_0700.has_value());
  CHECK(*at_0655 == doctest::Approx(29.44));
  CHECK(*at_0700 == doctest::Approx(23.89));
  CHECK(rig.testbed.vavs[0]->device().points().real(control::pts::av(1)) == doctest::Approx(23.89));
}

TEST_CASE("write outcomes and audit") {
  Rig rig;
  rig.sup->discover();
  rig.run_to(hms(0, 0, 1));

  std::optional<WriteOutcome> got;
  rig.sup->write_point("vav1.analog-value:1", 24.5, std::nullopt, Actor::operator_, [&](const WriteOutcome& o) { got = o; });
  rig.run_to(hms(0, 0, 3));
  REQUIRE(got.has_value());
  CHECK(got->kind == WriteOutcome::Kind::ack);
  REQUIRE(rig.sup->audit().size() == 1);
  const AuditRecord& a = rig.sup->audit().back();
  CHECK(a.actor == Actor::operator_);
  CHECK(a.priority == 16);
  CHECK((a.completed - a.issued).seconds() < 2.0);
  CHECK(rig.testbed.vavs[0]->device().points().real(control::pts::av(1)) == doctest::Approx(24.5));

  got.reset();
  rig.sup->write_point("ahu.analog-value:1", 35.0, std::nullopt, Actor::attacker, [&](const WriteOutcome& o) { got = o; });
  rig.run_to(hms(0, 0, 5));
  CHECK(got->ok());
  CHECK(rig.sup->audit().back().actor == Actor::attacker);

  got.reset();
  rig.sup->write_point("nope.analog-value:1", 1.0, std::nullopt, Actor::operator_, [&](const WriteOutcome& o) { got = o; });
  CHECK(got->kind == WriteOutcome::Kind::unknown_point);
  rig.sup->write_point("vav1.analog-input:1", 1.0, std::nullopt, Actor::operator_, [&](const WriteOutcome& o) { got = o; });
  CHECK(got->kind == WriteOutcome::Kind::not_writable);
  CHECK(rig.sup->audit().size() == 2);  // local failures never reach the wire

  // The target is rebooting: the write times out and is still audited.
  rig.testbed.ahu->device().handle_request(bacnet::build_reinitialize(bacnet::ReinitState::warmstart, {}, 1), hms(0, 0, 5));
  got.reset();
  rig.sup->write_point("ahu.analog-value:1", 12.78, std::nullopt, Actor::operator_, [&](const WriteOutcome& o) { got = o; });
  rig.run_to(hms(0, 0, 10));
  REQUIRE(got.has_value());
  CHECK(got->kind == WriteOutcome::Kind::timeout);
  CHECK(rig.sup->audit().size() == 3);
  CHECK(rig.sup->audit().back().outcome.kind == WriteOutcome::Kind::timeout);
  CHECK(rig.sup->idle());
}

TEST_CASE("every wire write produces exactly one audit record (property)") {
  Rig rig;
  rig.sup->discover();
  rig.run_to(hms(0, 0, 1));
  std::mt19937_64 rng(8);
  const auto& catalog = rig.sup->catalog();
  std::uint64_t callbacks = 0;
  SimTime t = hms(0, 0, 1);
  for (int i = 0; i < 400; ++i) {
    const auto& p = catalog[rng() % catalog.size()];
    if (rng() % 10 == 0) {
      auto& dev = rig.testbed.all[rng() % rig.testbed.all.size()]->device();
      dev.handle_request(bacnet::build_reinitialize(bacnet::ReinitState::warmstart, {}, 1), t);
    }
    rig.sup->write_point(p.id, static_cast<double>(rng() % 30), 1 + rng() % 16, Actor::operator_,
                         [&](const WriteOutcome&) { ++callbacks; });
    t += SimTime::from_micros(250'000);
    rig.run_to(t);
  }
  rig.run_to(t + SimTime::from_whole_seconds(10));
  CHECK(callbacks == 400);
  CHECK(rig.sup->audit().size() == rig.sup->stats().writes_sent);
  CHECK(rig.sup->idle());
}

TEST_CASE("alarm duration and deadband") {
  AlarmEvaluator ev({AlarmRule{"hot", "z", 26.5, std::nullopt, 0.5, 300.0}});
  auto t = [](int s) { return SimTime::from_whole_seconds(s); };
  CHECK(ev.observe("z", t(0), 26.7).empty());
  CHECK(ev.observe("z", t(240), 26.7).empty());
  auto opened = ev.observe("z", t(300), 26.8);
  REQUIRE(opened.size() == 1);
  CHECK(opened[0].opened);
  CHECK(ev.events()[0].exceeded_since == t(0));
  CHECK(ev.events()[0].peak == doctest::Approx(26.8));
  // At the limit minus the deadband the alarm stays open and does not re-trigger.
  CHECK(ev.observe("z", t(360), 26.0).empty());
  CHECK(ev.active_count() == 1);
  auto cleared = ev.observe("z", t(420), 25.9);
  REQUIRE(cleared.size() == 1);
  CHECK_FALSE(cleared[0].opened);
  CHECK(ev.events()[0].cleared == t(420));
  // A short excursion does not open a new alarm.
  CHECK(ev.observe("z", t(480), 27.0).empty());
  CHECK(ev.observe("z", t(540), 26.0).empty());
  CHECK(ev.events().size() == 1);
  CHECK(ev.observe("other", t(600), 99.0).empty());
}

TEST_CASE("trend store ordering and persistence format") {
  TrendStore store;
  store.append("b", TrendRecord{SimTime::from_whole_seconds(60), 22.5f, Quality::ok});
  store.append("a", TrendRecord{SimTime::from_whole_seconds(60), std::nullopt, Quality::missing});
  store.append("a", TrendRecord{SimTime::from_whole_seconds(120), 1.0f, Quality::ok});
  CHECK_THROWS_AS(store.append("a", TrendRecord{SimTime::from_whole_seconds(120), 2.0f, Quality::ok}), std::logic_error);
  CHECK_THROWS_AS(store.append("c", TrendRecord{SimTime::from_whole_seconds(1), std::nullopt, Quality::ok}), std::logic_error);
  CHECK(store.missing_count("a") == 1);

  auto rows = store.drain_before(SimTime::from_whole_seconds(100));
  REQUIRE(rows.size() == 2);
  CHECK(format_trend_row(rows[0]) == "60,a,,missing");
  CHECK(format_trend_row(rows[1]) == "60,b,22.5,ok");
  auto rest = store.drain_all();
  REQUIRE(rest.size() == 1);
  CHECK(format_trend_row(rest[0]) == "120,a,1,ok");
  CHECK(store.series("a").size() == 2);
}
