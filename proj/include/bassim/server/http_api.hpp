#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bassim/server/trend.hpp"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace bassim::server {

// Read-only view published by the simulation thread. Handlers only ever see
// these; they never touch simulation objects.
struct ApiSnapshot {
  double sim_time = 0.0;
  std::string date;
  std::optional<double> speed;  // nullopt: as fast as possible
  bool running = false;
  bool paused = false;
  nlohmann::json devices = nlohmann::json::array();
  nlohmann::json points = nlohmann::json::array();  // one object per catalog point, with "id"
  nlohmann::json alarms = nlohmann::json::array();
  nlohmann::json audit = nlohmann::json::array();
  nlohmann::json attacks = nlohmann::json::array();
  nlohmann::json traffic = nlohmann::json::object();
};

struct ApiResult {
  int status = 200;
  nlohmann::json body;
};

// Mutation handed to the simulation thread; the result is set there.
struct ApiCommand {
  enum class Kind { write_point, launch_attack, cancel_attack, pause, resume, speed };
  Kind kind = Kind::pause;
  std::string target;  // point id or attack id
  nlohmann::json body;
  std::shared_ptr<std::promise<ApiResult>> result = std::make_shared<std::promise<ApiResult>>();
};

// Shared state between the HTTP threads and the simulation thread.
class ApiState {
 public:
  void publish(std::shared_ptr<const ApiSnapshot> snapshot);
  std::shared_ptr<const ApiSnapshot> snapshot() const;

  // Trend mirror fed from the supervisor's observer on the simulation thread.
  void append_trend(const std::string& point, const TrendRecord& record);
  std::vector<TrendRecord> trends(const std::string& point, std::optional<double> from_s,
                                  std::optional<double> to_s) const;
  bool has_trend_point(const std::string& point) const;

  std::future<ApiResult> enqueue(ApiCommand command);
  std::vector<ApiCommand> drain();

  void close();
  bool closing() const { return closing_.load(); }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const ApiSnapshot> snapshot_ = std::make_shared<ApiSnapshot>();
  std::map<std::string, std::vector<TrendRecord>> trends_;
  std::deque<ApiCommand> queue_;
  std::atomic<bool> closing_{false};
};

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::string authorization;  // raw header value
};

// Routing, auth and request validation. Anything that needs simulation
// state becomes an ApiCommand.
class ApiRouter {
 public:
  // token nullopt: mutations are refused until BAS_SIM_TOKEN is configured.
  ApiRouter(ApiState& state, std::optional<std::string> token,
            std::chrono::milliseconds command_wait = std::chrono::milliseconds(5000));

  ApiResult handle(const ApiRequest& request) const;

  // Server-sent event frames for one stream tick; `alarms_seen` tracks what
  // this subscriber already received.
  std::string stream_frames(const ApiSnapshot& snapshot, std::size_t& alarms_seen) const;

 private:
  std::optional<ApiResult> authorize(const ApiRequest& request) const;
  ApiResult submit(ApiCommand command) const;

  ApiState& state_;
  std::optional<std::string> token_;
  std::chrono::milliseconds wait_;
};

ApiResult api_error(int status, const std::string& message);

// Registers every /api route, including the /api/stream event channel
// (ticks every `stream_period`), and optionally static UI assets.
void mount_api(httplib::Server& server, const ApiRouter& router, ApiState& state,
               std::chrono::milliseconds stream_period = std::chrono::milliseconds(250),
               const std::string& static_dir = "");

}  // namespace bassim::server
