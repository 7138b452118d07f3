#include "doctest.h"

#include <thread>

#include "bassim/server/http_api.hpp"

using namespace bassim;
using namespace bassim::server;
using nlohmann::json;

namespace {

std::shared_ptr<ApiSnapshot> sample_snapshot() {
  auto s = std::make_shared<ApiSnapshot>();
  s->sim_time = 36000.0;
  s->date = "2023-08-01";
  s->speed = 1.0;
  s->running = true;
  s->devices = json::array({{{"instance", 1201}, {"name", "ahu"}}});
  s->points = json::array({{{"id", "ahu.analog-value:1"}, {"commandable", true}, {"value", 12.78}},
                           {{"id", "ahu.analog-input:1"}, {"commandable", false}, {"value", 13.1}}});
  s->attacks = json::array({{{"id", "a1"}, {"type", "dos"}}});
  return s;
}

ApiRequest get(const std::string& path) { return ApiRequest{"GET", path, {}, "", ""}; }
ApiRequest post(const std::string& path, const std::string& body, const std::string& auth = "Bearer s3cret") {
  return ApiRequest{"POST", path, {}, body, auth};
}

// Stands in for the simulation thread: answers each queued command once.
struct Answerer {
  ApiState& state;
  std::vector<ApiCommand> seen;
  std::atomic<bool> stop{false};
  std::thread worker;
  explicit Answerer(ApiState& s, int status = 200) : state(s) {
    worker = std::thread([this, status] {
      while (!stop) {
        for (auto& c : state.drain()) {
          c.result->set_value(ApiResult{status, json{{"ok", true}}});
          seen.push_back(std::move(c));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
      }
    });
  }
  void finish() {
    stop = true;
    if (worker.joinable()) worker.join();
  }
  ~Answerer() { finish(); }
};

}  // namespace

TEST_CASE("read endpoints") {
  ApiState state;
  state.publish(sample_snapshot());
  ApiRouter router(state, std::string("s3cret"));

  auto sim = router.handle(get("/api/sim"));
  CHECK(sim.status == 200);
  CHECK(sim.body["sim_time"] == 36000.0);
  CHECK(sim.body["running"] == true);
  CHECK(sim.body["speed"] == 1.0);

  CHECK(router.handle(get("/api/devices")).body.size() == 1);
  CHECK(router.handle(get("/api/points")).body.size() == 2);
  CHECK(router.handle(get("/api/points/ahu.analog-value:1")).body["value"] == 12.78);
  CHECK(router.handle(get("/api/points/nope")).status == 404);
  CHECK(router.handle(get("/api/attacks/a1")).status == 200);
  CHECK(router.handle(get("/api/attacks/a9")).status == 404);
  CHECK(router.handle(get("/api/alarms")).status == 200);
  CHECK(router.handle(get("/api/audit")).status == 200);
  CHECK(router.handle(get("/api/unknown")).status == 404);
  CHECK(router.handle(ApiRequest{"DELETE", "/api/points", {}, "", ""}).status == 405);
}

TEST_CASE("trend queries") {
  ApiState state;
  state.publish(sample_snapshot());
  for (int i = 1; i <= 5; ++i)
    state.append_trend("ahu.analog-input:1", TrendRecord{SimTime::from_whole_seconds(60 * i), 13.0f, Quality::ok});
  state.append_trend("ahu.analog-input:1", TrendRecord{SimTime::from_whole_seconds(360), std::nullopt, Quality::missing});
  ApiRouter router(state, std::nullopt);

  auto all = router.handle(get("/api/trends/ahu.analog-input:1"));
  REQUIRE(all.status == 200);
  CHECK(all.body["records"].size() == 6);
  CHECK(all.body["records"][5]["value"].is_null());
  CHECK(all.body["records"][5]["quality"] == "missing");

  ApiRequest ranged = get("/api/trends/ahu.analog-input:1");
  ranged.query = {{"from", "120"}, {"to", "240"}};
  CHECK(router.handle(ranged).body["records"].size() == 3);
  ranged.query = {{"from", "abc"}};
  CHECK(router.handle(ranged).status == 400);
  CHECK(router.handle(get("/api/trends/nope")).status == 404);
}

TEST_CASE("mutations need a configured token and a matching bearer") {
  ApiState state;
  state.publish(sample_snapshot());
  ApiRouter open(state, std::nullopt);
  auto disabled = open.handle(post("/api/sim/pause", ""));
  CHECK(disabled.status == 403);
  CHECK(disabled.body["error"].get<std::string>().find("BAS_SIM_TOKEN") != std::string::npos);

  ApiRouter secured(state, std::string("s3cret"));
  CHECK(secured.handle(post("/api/sim/pause", "", "")).status == 401);
  CHECK(secured.handle(post("/api/sim/pause", "", "Bearer wrong")).status == 401);
  CHECK(secured.handle(post("/api/sim/pause", "", "Bearer s3cret!")).status == 401);
  CHECK(secured.handle(post("/api/points/ahu.analog-value:1/write", R"({"value": 1})", "Basic s3cret")).status == 401);
}

TEST_CASE("write validation happens before anything is queued") {
  ApiState state;
  state.publish(sample_snapshot());
  ApiRouter router(state, std::string("s3cret"), std::chrono::milliseconds(50));
  CHECK(router.handle(post("/api/points/nope/write", R"({"value": 1})")).status == 404);
  CHECK(router.handle(post("/api/points/ahu.analog-input:1/write", R"({"value": 1})")).status == 409);
  CHECK(router.handle(post("/api/points/ahu.analog-value:1/write", R"({"value": "hot"})")).status == 400);
  CHECK(router.handle(post("/api/points/ahu.analog-value:1/write", R"({"value": 1, "priority": 0})")).status == 400);
  CHECK(router.handle(post("/api/points/ahu.analog-value:1/write", R"({"value": 1, "priority": 2.5})")).status == 400);
  CHECK(router.handle(post("/api/points/ahu.analog-value:1/write", "not json")).status == 400);
  CHECK(router.handle(post("/api/sim/speed", R"({"multiplier": -1})")).status == 400);
  CHECK(router.handle(post("/api/sim/speed", R"({"multiplier": "fast"})")).status == 400);
  CHECK(state.drain().empty());
}

TEST_CASE("accepted mutations are handed to the simulation thread") {
  ApiState state;
  state.publish(sample_snapshot());
  ApiRouter router(state, std::string("s3cret"));
  {
    Answerer sim(state);
    auto w = router.handle(post("/api/points/ahu.analog-value:1/write", R"({"value": 24.5, "priority": 8})"));
    CHECK(w.status == 200);
    CHECK(router.handle(post("/api/attacks", R"({"type": "dos"})")).status == 200);
    CHECK(router.handle(ApiRequest{"DELETE", "/api/attacks/a1", {}, "", "Bearer s3cret"}).status == 200);
    CHECK(router.handle(post("/api/sim/speed", R"({"multiplier": "max"})")).status == 200);
    CHECK(router.handle(post("/api/sim/resume", "")).status == 200);
    sim.finish();
    REQUIRE(sim.seen.size() == 5);
    CHECK(sim.seen[0].kind == ApiCommand::Kind::write_point);
    CHECK(sim.seen[0].target == "ahu.analog-value:1");
    CHECK(sim.seen[0].body["priority"] == 8);
    CHECK(sim.seen[1].kind == ApiCommand::Kind::launch_attack);
    CHECK(sim.seen[2].kind == ApiCommand::Kind::cancel_attack);
    CHECK(sim.seen[2].target == "a1");
    CHECK(sim.seen[3].kind == ApiCommand::Kind::speed);
    CHECK(sim.seen[4].kind == ApiCommand::Kind::resume);
  }
}

TEST_CASE("slow answers become 202 and closing answers 503") {
  ApiState state;
  state.publish(sample_snapshot());
  ApiRouter router(state, std::string("s3cret"), std::chrono::milliseconds(20));
  auto pending = router.handle(post("/api/sim/pause", ""));
  CHECK(pending.status == 202);
  CHECK(pending.body["status"] == "pending");
  state.close();
  CHECK(state.closing());
  CHECK(router.handle(post("/api/sim/pause", "")).status == 503);
}

TEST_CASE("stream frames") {
  ApiState state;
  ApiRouter router(state, std::nullopt);
  auto snap = sample_snapshot();
  snap->alarms = json::array({{{"rule", "vav1-zone-temp-high"}}});
  std::size_t seen = 0;
  const std::string first = router.stream_frames(*snap, seen);
  CHECK(first.find("event: tick\n") != std::string::npos);
  CHECK(first.find("event: points\n") != std::string::npos);
  CHECK(first.find("event: alarm\n") != std::string::npos);
  CHECK(seen == 1);
  const std::string second = router.stream_frames(*snap, seen);
  CHECK(second.find("event: alarm\n") == std::string::npos);
}
