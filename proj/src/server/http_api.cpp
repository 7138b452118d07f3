#include "bassim/server/http_api.hpp"

#include <algorithm>
#include <charconv>
#include <thread>

#include "httplib.h"

namespace bassim::server {

using nlohmann::json;

void ApiState::publish(std::shared_ptr<const ApiSnapshot> snapshot) {
  std::lock_guard lock(mu_);
  snapshot_ = std::move(snapshot);
}

std::shared_ptr<const ApiSnapshot> ApiState::snapshot() const {
  std::lock_guard lock(mu_);
  return snapshot_;
}

void ApiState::append_trend(const std::string& point, const TrendRecord& record) {
  std::lock_guard lock(mu_);
  trends_[point].push_back(record);
}

std::vector<TrendRecord> ApiState::trends(const std::string& point, std::optional<double> from_s,
                                          std::optional<double> to_s) const {
  std::lock_guard lock(mu_);
  std::vector<TrendRecord> out;
  auto it = trends_.find(point);
  if (it == trends_.end()) return out;
  for (const auto& r : it->second) {
    const double t = r.time.seconds();
    if (from_s && t < *from_s) continue;
    if (to_s && t > *to_s) break;
    out.push_back(r);
  }
  return out;
}

bool ApiState::has_trend_point(const std::string& point) const {
  std::lock_guard lock(mu_);
  return trends_.contains(point);
}

std::future<ApiResult> ApiState::enqueue(ApiCommand command) {
  auto future = command.result->get_future();
  std::lock_guard lock(mu_);
  if (closing_) {
    command.result->set_value(api_error(503, "simulation has stopped"));
    return future;
  }
  queue_.push_back(std::move(command));
  return future;
}

std::vector<ApiCommand> ApiState::drain() {
  std::lock_guard lock(mu_);
  std::vector<ApiCommand> out(std::make_move_iterator(queue_.begin()), std::make_move_iterator(queue_.end()));
  queue_.clear();
  return out;
}

void ApiState::close() {
  std::lock_guard lock(mu_);
  closing_ = true;
  for (auto& c : queue_) c.result->set_value(api_error(503, "simulation has stopped"));
  queue_.clear();
}

ApiResult api_error(int status, const std::string& message) { return {status, json{{"error", message}}}; }

ApiRouter::ApiRouter(ApiState& state, std::optional<std::string> token, std::chrono::milliseconds command_wait)
    : state_(state), token_(std::move(token)), wait_(command_wait) {}

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    std::size_t j = path.find('/', i);
    if (j == std::string::npos) j = path.size();
    if (j > i) parts.push_back(path.substr(i, j - i));
    i = j + 1;
  }
  return parts;
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

const json* find_point(const ApiSnapshot& snap, const std::string& id) {
  for (const auto& p : snap.points)
    if (p.value("id", "") == id) return &p;
  return nullptr;
}

bool same_secret(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  unsigned diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff |= static_cast<unsigned char>(a[i] ^ b[i]);
  return diff == 0;
}

json sim_json(const ApiSnapshot& s) {
  return json{{"sim_time", s.sim_time},
              {"date", s.date},
              {"speed", s.speed ? json(*s.speed) : json("max")},
              {"running", s.running},
              {"paused", s.paused}};
}

}  // namespace

std::optional<ApiResult> ApiRouter::authorize(const ApiRequest& req) const {
  if (!token_) return api_error(403, "mutations are disabled: start the server with BAS_SIM_TOKEN set");
  const std::string prefix = "Bearer ";
  if (req.authorization.rfind(prefix, 0) != 0 || !same_secret(req.authorization.substr(prefix.size()), *token_))
    return api_error(401, "missing or invalid bearer token");
  return std::nullopt;
}

ApiResult ApiRouter::submit(ApiCommand command) const {
  auto future = state_.enqueue(std::move(command));
  if (future.wait_for(wait_) != std::future_status::ready) return {202, json{{"status", "pending"}}};
  return future.get();
}

ApiResult ApiRouter::handle(const ApiRequest& req) const {
  const auto parts = split_path(req.path);
  if (parts.empty() || parts[0] != "api") return api_error(404, "not found");
  const auto snap = state_.snapshot();
  const std::string& m = req.method;
  auto method_not_allowed = [] { return api_error(405, "method not allowed"); };
  auto parse_body = [&]() -> std::optional<json> {
    json body = json::parse(req.body.empty() ? "{}" : req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) return std::nullopt;
    return body;
  };

  if (parts.size() == 2 && parts[1] == "devices") {
    if (m != "GET") return method_not_allowed();
    return {200, snap->devices};
  }
  if (parts.size() >= 2 && parts[1] == "points") {
    if (parts.size() == 2) {
      if (m != "GET") return method_not_allowed();
      return {200, snap->points};
    }
    const json* point = find_point(*snap, parts[2]);
    if (parts.size() == 3) {
      if (m != "GET") return method_not_allowed();
      if (!point) return api_error(404, "unknown point '" + parts[2] + "'");
      return {200, *point};
    }
    if (parts.size() == 4 && parts[3] == "write") {
      if (m != "POST") return method_not_allowed();
      if (auto denied = authorize(req)) return *denied;
      if (!point) return api_error(404, "unknown point '" + parts[2] + "'");
      if (!point->value("commandable", false)) return api_error(409, "point '" + parts[2] + "' is not commandable");
      auto body = parse_body();
      if (!body) return api_error(400, "body must be a JSON object");
      if (!body->contains("value") || !(*body)["value"].is_number())
        return api_error(400, "value must be a number");
      if (body->contains("priority")) {
        const auto& pr = (*body)["priority"];
        if (!pr.is_number_integer() || pr.get<int>() < 1 || pr.get<int>() > 16)
          return api_error(400, "priority must be an integer 1..16");
      }
      ApiCommand c;
      c.kind = ApiCommand::Kind::write_point;
      c.target = parts[2];
      c.body = std::move(*body);
      return submit(std::move(c));
    }
    return api_error(404, "not found");
  }
  if (parts.size() == 3 && parts[1] == "trends") {
    if (m != "GET") return method_not_allowed();
    if (!find_point(*snap, parts[2])) return api_error(404, "unknown point '" + parts[2] + "'");
    std::optional<double> from, to;
    for (const auto& [key, dest] : {std::pair{"from", &from}, std::pair{"to", &to}}) {
      auto it = req.query.find(key);
      if (it == req.query.end()) continue;
      *dest = parse_number(it->second);
      if (!*dest) return api_error(400, std::string(key) + " must be simulation seconds");
    }
    json records = json::array();
    for (const auto& r : state_.trends(parts[2], from, to))
      records.push_back({{"t", r.time.seconds()},
                         {"value", r.value ? json(*r.value) : json(nullptr)},
                         {"quality", std::string(to_string(r.quality))}});
    return {200, json{{"point", parts[2]}, {"date", snap->date}, {"records", std::move(records)}}};
  }
  if (parts.size() == 2 && parts[1] == "alarms") {
    if (m != "GET") return method_not_allowed();
    return {200, snap->alarms};
  }
  if (parts.size() == 2 && parts[1] == "audit") {
    if (m != "GET") return method_not_allowed();
    return {200, snap->audit};
  }
  if (parts.size() >= 2 && parts[1] == "attacks") {
    if (parts.size() == 2) {
      if (m == "GET") return {200, snap->attacks};
      if (m != "POST") return method_not_allowed();
      if (auto denied = authorize(req)) return *denied;
      auto body = parse_body();
      if (!body) return api_error(400, "body must be a JSON object");
      ApiCommand c;
      c.kind = ApiCommand::Kind::launch_attack;
      c.body = std::move(*body);
      return submit(std::move(c));
    }
    if (parts.size() == 3) {
      if (m == "GET") {
        for (const auto& a : snap->attacks)
          if (a.value("id", "") == parts[2]) return {200, a};
        return api_error(404, "unknown attack '" + parts[2] + "'");
      }
      if (m != "DELETE") return method_not_allowed();
      if (auto denied = authorize(req)) return *denied;
      ApiCommand c;
      c.kind = ApiCommand::Kind::cancel_attack;
      c.target = parts[2];
      return submit(std::move(c));
    }
    return api_error(404, "not found");
  }
  if (parts.size() >= 2 && parts[1] == "sim") {
    if (parts.size() == 2) {
      if (m != "GET") return method_not_allowed();
      return {200, sim_json(*snap)};
    }
    if (parts.size() == 3) {
      if (m != "POST") return method_not_allowed();
      ApiCommand c;
      if (parts[2] == "pause") {
        c.kind = ApiCommand::Kind::pause;
      } else if (parts[2] == "resume") {
        c.kind = ApiCommand::Kind::resume;
      } else if (parts[2] == "speed") {
        c.kind = ApiCommand::Kind::speed;
      } else {
        return api_error(404, "not found");
      }
      if (auto denied = authorize(req)) return *denied;
      if (c.kind == ApiCommand::Kind::speed) {
        auto body = parse_body();
        if (!body || !body->contains("multiplier")) return api_error(400, "body must be {\"multiplier\": N | \"max\"}");
        const auto& mult = (*body)["multiplier"];
        const bool ok = (mult.is_number() && mult.get<double>() > 0 && mult.get<double>() <= 1e6) ||
                        (mult.is_string() && mult.get<std::string>() == "max");
        if (!ok) return api_error(400, "multiplier must be a positive number or \"max\"");
        c.body = std::move(*body);
      }
      return submit(std::move(c));
    }
  }
  return api_error(404, "not found");
}

std::string ApiRouter::stream_frames(const ApiSnapshot& snap, std::size_t& alarms_seen) const {
  std::string out;
  json tick = sim_json(snap);
  tick["traffic"] = snap.traffic;
  out += "event: tick\ndata: " + tick.dump() + "\n\n";
  json updates = json::array();
  for (const auto& p : snap.points)
    updates.push_back({{"id", p.value("id", "")},
                       {"value", p.contains("value") ? p["value"] : json(nullptr)},
                       {"quality", p.value("quality", "missing")},
                       {"time", p.contains("time") ? p["time"] : json(nullptr)}});
  out += "event: points\ndata: " + updates.dump() + "\n\n";
  for (; alarms_seen < snap.alarms.size(); ++alarms_seen)
    out += "event: alarm\ndata: " + snap.alarms[alarms_seen].dump() + "\n\n";
  return out;
}

void mount_api(httplib::Server& server, const ApiRouter& router, ApiState& state,
               std::chrono::milliseconds stream_period, const std::string& static_dir) {
  server.Get("/api/stream", [&router, &state, stream_period](const httplib::Request&, httplib::Response& res) {
    auto seen = std::make_shared<std::size_t>(0);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [&router, &state, stream_period, seen](std::size_t, httplib::DataSink& sink) {
          if (state.closing()) {
            sink.done();
            return true;
          }
          const std::string frames = router.stream_frames(*state.snapshot(), *seen);
          if (!sink.write(frames.data(), frames.size())) return false;
          std::this_thread::sleep_for(stream_period);
          return true;
        });
  });
  auto forward = [&router](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query[k] = v;
    r.body = req.body;
    r.authorization = req.get_header_value("Authorization");
    const ApiResult result = router.handle(r);
    res.status = result.status;
    res.set_content(result.body.dump(), "application/json");
  };
  server.Get("/api/.*", forward);
  server.Post("/api/.*", forward);
  server.Delete("/api/.*", forward);
  server.Put("/api/.*", forward);
  if (!static_dir.empty()) server.set_mount_point("/", static_dir);
}

}  // namespace bassim::server
