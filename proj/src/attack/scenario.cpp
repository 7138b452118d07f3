#include "bassim/attack/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bassim/attack/toml_lite.hpp"
#include "bassim/util/format.hpp"

namespace bassim::attack {

std::string_view to_string(FdiVia via) {
  return via == FdiVia::compromised_server ? "compromised-server" : "rogue-device";
}

SimTime attack_start(const AttackSpec& a) {
  return std::visit([](const auto& x) { return x.start; }, a);
}
SimTime attack_end(const AttackSpec& a) {
  return std::visit([](const auto& x) { return x.end; }, a);
}
std::string_view attack_type(const AttackSpec& a) {
  if (std::holds_alternative<FdiAttack>(a)) return "fdi";
  if (std::holds_alternative<DeviceDos>(a)) return "dos";
  return "rogue-register";
}

std::string ConfigError::to_string() const {
  return line > 0 ? "line " + std::to_string(line) + ": " + message : message;
}

// ---------------------------------------------------------------- dates

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

namespace {

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : days[m - 1];
}

}  // namespace

int Date::day_of_year() const {
  int n = day - 1;
  for (int m = 1; m < month; ++m) n += days_in_month(year, m);
  return n;
}

std::int64_t Date::unix_days() const {
  // Civil-from-days inverse (proleptic Gregorian).
  const int y = month <= 2 ? year - 1 : year;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned mp = static_cast<unsigned>(month > 2 ? month - 3 : month + 9);
  const unsigned doy = (153 * mp + 2) / 5 + static_cast<unsigned>(day) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::optional<Date> Date::parse(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (std::sscanf(std::string(text).c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3) return std::nullopt;
  if (y < 1900 || y > 2200 || m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
  return Date{y, m, d};
}

// ---------------------------------------------------------------- scalars

std::optional<double> parse_temperature(const std::string& text) {
  std::string t = text;
  t.erase(std::remove_if(t.begin(), t.end(), [](char c) { return c == ' '; }), t.end());
  if (t.empty()) return std::nullopt;
  char unit = 'C';
  if (t.back() == 'F' || t.back() == 'f' || t.back() == 'C' || t.back() == 'c') {
    unit = static_cast<char>(std::toupper(static_cast<unsigned char>(t.back())));
    t.pop_back();
  }
  double v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return unit == 'F' ? (v - 32.0) * 5.0 / 9.0 : v;
}

std::optional<SimTime> parse_clock(const std::string& text) {
  int h = 0, m = 0, s = 0;
  char tail = 0;
  const auto colons = std::count(text.begin(), text.end(), ':');
  if (colons == 1 && std::sscanf(text.c_str(), "%d:%d%c", &h, &m, &tail) == 2) {
  } else if (colons == 2 && std::sscanf(text.c_str(), "%d:%d:%d%c", &h, &m, &s, &tail) == 3) {
  } else {
    return std::nullopt;
  }
  if (h < 0 || m < 0 || m > 59 || s < 0 || s > 59) return std::nullopt;
  return SimTime::from_whole_seconds(static_cast<std::int64_t>(h) * 3600 + m * 60 + s);
}

namespace {

std::string clock_text(SimTime t) {
  const std::int64_t us = t.micros();
  if (us % 1000000 != 0 || us < 0) return format_seconds(t);
  const std::int64_t s = us / 1000000;
  char buf[32];
  std::snprintf(buf, sizeof buf, "\"%02lld:%02lld:%02lld\"", static_cast<long long>(s / 3600),
                static_cast<long long>(s / 60 % 60), static_cast<long long>(s % 60));
  return buf;
}

// ---------------------------------------------------------------- schema

class Reader {
 public:
  Reader(const toml::Table& table, std::string section, int line) : t_(table), section_(std::move(section)), line_(line) {}

  std::optional<ConfigError> err;

  // Unknown keys are schema errors.
  void allow(std::initializer_list<const char*> keys) {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : t_)
      if (!ok.contains(k)) fail(v.line, "unknown key '" + k + "'" + where());
  }

  void number(const char* key, double& out, double lo, double hi) {
    const toml::Value* v = toml::find(t_, key);
    if (!v) return;
    if (!v->is_number()) return fail(v->line, std::string(key) + " must be a number");
    if (!(v->num() >= lo && v->num() <= hi))
      return fail(v->line, std::string(key) + " = " + format_double(v->num()) + " outside [" + format_double(lo) +
                               ", " + format_double(hi) + "]");
    out = v->num();
  }

  template <typename Int>
  void integer(const char* key, Int& out, double lo, double hi) {
    const toml::Value* v = toml::find(t_, key);
    if (!v) return;
    if (!v->is_number() || !v->integer) return fail(v->line, std::string(key) + " must be an integer");
    if (!(v->num() >= lo && v->num() <= hi))
      return fail(v->line, std::string(key) + " outside [" + format_double(lo) + ", " + format_double(hi) + "]");
    out = static_cast<Int>(v->num());
  }

  void string(const char* key, std::string& out) {
    const toml::Value* v = toml::find(t_, key);
    if (!v) return;
    if (!v->is_string()) return fail(v->line, std::string(key) + " must be a string");
    out = v->str();
  }

  void address(const char* key, bacnet::BipAddress& out) {
    std::string s;
    string(key, s);
    if (s.empty()) return;
    auto a = bacnet::BipAddress::parse(s.find(':') == std::string::npos ? s + ":47808" : s);
    if (!a) return fail(toml::find(t_, key)->line, std::string(key) + " is not an IPv4 address");
    out = *a;
  }

  void temperature(const char* key, double& out) {
    const toml::Value* v = toml::find(t_, key);
    if (!v) return;
    if (v->is_number()) {
      out = v->num();
      return;
    }
    if (v->is_string()) {
      if (auto t = parse_temperature(v->str())) {
        out = *t;
        return;
      }
    }
    fail(v->line, std::string(key) + " must be a number or a temperature like \"95F\" / \"35C\"");
  }

  void clock(const char* key, SimTime& out, bool required) {
    const toml::Value* v = toml::find(t_, key);
    if (!v) {
      if (required) fail(line_, "missing required key '" + std::string(key) + "'" + where());
      return;
    }
    if (v->is_number()) {
      if (v->num() < 0) return fail(v->line, std::string(key) + " must not be negative");
      out = SimTime::from_seconds(v->num());
      return;
    }
    if (v->is_string()) {
      if (auto t = parse_clock(v->str())) {
        out = *t;
        return;
      }
    }
    fail(v->line, std::string(key) + " must be \"HH:MM[:SS]\" or seconds");
  }

  void require(const char* key) {
    if (!toml::find(t_, key)) fail(line_, "missing required key '" + std::string(key) + "'" + where());
  }

  void fail(int line, std::string message) {
    if (!err) err = ConfigError{line, std::move(message)};
  }

  const toml::Table& table() const { return t_; }

 private:
  std::string where() const { return section_.empty() ? "" : " in [" + section_ + "]"; }
  const toml::Table& t_;
  std::string section_;
  int line_;
};

const toml::Table* section(const toml::Table& root, const char* name, Reader& top) {
  const toml::Value* v = toml::find(root, name);
  if (!v) return nullptr;
  if (!v->is_table()) {
    top.fail(v->line, std::string("'") + name + "' must be a table");
    return nullptr;
  }
  return &v->table();
}

std::optional<ConfigError> parse_attack(const toml::Table& t, int line, AttackSpec& out) {
  Reader r(t, "attacks", line);
  std::string type;
  r.require("type");
  r.string("type", type);
  if (r.err) return r.err;
  if (type == "fdi") {
    r.allow({"type", "target_point", "value", "start", "end", "via", "rewrite_period_s", "priority"});
    FdiAttack a;
    r.require("target_point");
    r.require("value");
    r.string("target_point", a.target_point);
    r.temperature("value", a.value);
    r.clock("start", a.start, true);
    r.clock("end", a.end, true);
    std::string via = "compromised-server";
    r.string("via", via);
    if (via == "compromised-server") a.via = FdiVia::compromised_server;
    else if (via == "rogue-device") a.via = FdiVia::rogue_device;
    else r.fail(toml::find(t, "via")->line, "via must be \"compromised-server\" or \"rogue-device\"");
    r.number("rewrite_period_s", a.rewrite_period_s, 1e-3, 1e9);
    r.integer("priority", a.priority, 1, 16);
    out = a;
  } else if (type == "dos") {
    r.allow({"type", "target_device", "rate", "reinit_state", "start", "end", "register_ttl_s"});
    DeviceDos a;
    r.require("target_device");
    r.string("target_device", a.target_device);
    r.number("rate", a.rate, 1e-6, 1000.0);
    std::string state = "warmstart";
    r.string("reinit_state", state);
    if (state == "warmstart") a.state = bacnet::ReinitState::warmstart;
    else if (state == "coldstart") a.state = bacnet::ReinitState::coldstart;
    else r.fail(toml::find(t, "reinit_state")->line, "reinit_state must be \"warmstart\" or \"coldstart\"");
    r.clock("start", a.start, true);
    r.clock("end", a.end, true);
    r.integer("register_ttl_s", a.register_ttl_s, 0, 65535);
    out = a;
  } else if (type == "rogue-register") {
    r.allow({"type", "ttl_s", "start", "end"});
    RogueRegister a;
    r.integer("ttl_s", a.ttl_s, 1, 65535);
    r.clock("start", a.start, true);
    r.clock("end", a.end, true);
    out = a;
  } else {
    return ConfigError{toml::find(t, "type")->line, "unknown attack type '" + type + "' (fdi, dos, rogue-register)"};
  }
  return r.err;
}

}  // namespace

Expected<ScenarioConfig, ConfigError> parse_scenario(const std::string& text, const std::string& base_dir) {
  auto doc = toml::parse(text);
  if (!doc) return Unexpected{ConfigError{doc.error().line, doc.error().message}};
  const toml::Table& root = *doc;
  ScenarioConfig c;
  Reader top(root, "", 1);
  top.allow({"name", "date", "duration_h", "seed", "weather", "speed", "network", "plant", "controllers", "schedule",
             "supervisor", "attacks"});
  top.string("name", c.name);
  std::string date;
  top.string("date", date);
  if (!date.empty()) {
    if (auto d = Date::parse(date)) c.date = *d;
    else top.fail(toml::find(root, "date")->line, "date must be YYYY-MM-DD");
  }
  double hours = 24.0;
  top.number("duration_h", hours, 1.0 / 60.0, 24.0 * 366.0);
  c.duration_s = std::round(hours * 3600.0);
  top.integer("seed", c.seed, 0, 9007199254740991.0);
  top.string("weather", c.weather);
  if (c.weather != "synthetic" && !base_dir.empty() && std::filesystem::path(c.weather).is_relative())
    c.weather = (std::filesystem::path(base_dir) / c.weather).string();
  if (const toml::Value* v = toml::find(root, "speed")) {
    if (v->is_string() && v->str() == "max") c.speed.reset();
    else if (v->is_number() && v->num() > 0) c.speed = v->num();
    else top.fail(v->line, "speed must be \"max\" or a positive multiplier");
  }
  if (top.err) return Unexpected{*top.err};

  if (const auto* t = section(root, "network", top)) {
    Reader r(*t, "network", toml::find(root, "network")->line);
    r.allow({"ip_latency_s", "ip_jitter_s", "field_latency_s", "field_jitter_s", "server_ip", "router_ip",
             "attacker_ip", "ip_network", "field_network", "fdt_capacity"});
    r.number("ip_latency_s", c.network.ip.base_latency_s, 0.0, 10.0);
    r.number("ip_jitter_s", c.network.ip.jitter_s, 0.0, 10.0);
    r.number("field_latency_s", c.network.field.base_latency_s, 0.0, 10.0);
    r.number("field_jitter_s", c.network.field.jitter_s, 0.0, 10.0);
    r.address("server_ip", c.network.server);
    r.address("router_ip", c.network.router);
    r.address("attacker_ip", c.network.attacker);
    r.integer("ip_network", c.network.ip_network, 1, 65534);
    r.integer("field_network", c.network.field_network, 1, 65534);
    r.integer("fdt_capacity", c.network.fdt_capacity, 0, 4096);
    if (!r.err && (c.network.ip.jitter_s > c.network.ip.base_latency_s ||
                   c.network.field.jitter_s > c.network.field.base_latency_s))
      r.fail(toml::find(root, "network")->line, "jitter must not exceed base latency");
    if (!r.err && c.network.ip_network == c.network.field_network)
      r.fail(toml::find(root, "network")->line, "ip_network and field_network must differ");
    if (!r.err && (c.network.server == c.network.router || c.network.attacker == c.network.router ||
                   c.network.attacker == c.network.server))
      r.fail(toml::find(root, "network")->line, "server, router and attacker addresses must be distinct");
    if (r.err) return Unexpected{*r.err};
  }

  if (const auto* t = section(root, "plant", top)) {
    Reader r(*t, "plant", toml::find(root, "plant")->line);
    r.allow({"capacitance_j_per_k", "ua_out_w_per_k", "ua_core_w_per_k", "q_occ_w", "q_unocc_w", "v_min_kg_s",
             "v_cool_max_kg_s", "reheat_delta_max_k", "fan_delta_t_k", "coil_approach_k", "chiller_capacity_w",
             "chw_flow_capacitance_w_per_k", "actuator_tau_s", "initial_zone_temp_c", "noise_sigma_k"});
    auto& p = c.plant.params;
    auto& z0 = p.zones.front();
    double cz = z0.capacitance, ua = z0.ua_out, uc = z0.ua_core, qo = z0.q_occ, qu = z0.q_unocc, vmin = z0.v_min,
           vmax = z0.v_cool_max;
    r.number("capacitance_j_per_k", cz, 1.0, 1e12);
    r.number("ua_out_w_per_k", ua, 0.0, 1e6);
    r.number("ua_core_w_per_k", uc, 0.0, 1e6);
    r.number("q_occ_w", qo, 0.0, 1e6);
    r.number("q_unocc_w", qu, 0.0, 1e6);
    r.number("v_min_kg_s", vmin, 0.0, 100.0);
    r.number("v_cool_max_kg_s", vmax, 0.0, 100.0);
    for (std::size_t i = 0; i < p.zones.size(); ++i) {
      auto& z = p.zones[i];
      const bool interior = static_cast<int>(i) == p.interior_zone;
      z.capacitance = cz;
      z.ua_out = interior ? 0.0 : ua;
      z.ua_core = interior ? 0.0 : uc;
      z.q_occ = qo;
      z.q_unocc = qu;
      z.v_min = vmin;
      z.v_cool_max = vmax;
    }
    r.number("reheat_delta_max_k", p.reheat_delta_max, 0.0, 50.0);
    r.number("fan_delta_t_k", p.fan_delta_t, 0.0, 10.0);
    r.number("coil_approach_k", p.coil_approach, 0.0, 20.0);
    r.number("chiller_capacity_w", p.chiller_capacity, 0.0, 1e9);
    r.number("chw_flow_capacitance_w_per_k", p.chw_flow_capacitance, 1.0, 1e9);
    r.number("actuator_tau_s", p.actuator_tau, 1e-3, 1e6);
    r.number("initial_zone_temp_c", p.initial_zone_temp, -40.0, 60.0);
    r.number("noise_sigma_k", c.plant.noise_sigma, 0.0, 10.0);
    if (!r.err && vmax < vmin) r.fail(toml::find(root, "plant")->line, "v_cool_max_kg_s must be >= v_min_kg_s");
    if (r.err) return Unexpected{*r.err};
  }
  c.controllers.vav.v_min = c.plant.params.zones.front().v_min;
  c.controllers.vav.v_cool_max = c.plant.params.zones.front().v_cool_max;

  if (const auto* t = section(root, "controllers", top)) {
    Reader r(*t, "controllers", toml::find(root, "controllers")->line);
    r.allow({"reboot_s", "control_period_s", "vav_kp", "vav_ki", "ahu_kp", "ahu_ki", "cooling_occupied_c",
             "cooling_unoccupied_c", "heating_occupied_c", "heating_unoccupied_c", "sat_setpoint_c", "oa_frac_min",
             "chw_setpoint_c"});
    auto& k = c.controllers;
    r.number("reboot_s", k.reboot_s, 0.0, 3600.0);
    r.number("control_period_s", k.control_period_s, 1.0, 3600.0);
    r.number("vav_kp", k.vav.gains.kp, 0.0, 100.0);
    r.number("vav_ki", k.vav.gains.ki, 0.0, 100.0);
    r.number("ahu_kp", k.ahu.gains.kp, 0.0, 100.0);
    r.number("ahu_ki", k.ahu.gains.ki, 0.0, 100.0);
    r.temperature("cooling_occupied_c", k.vav.cool_occupied);
    r.temperature("cooling_unoccupied_c", k.vav.cool_unoccupied);
    r.temperature("heating_occupied_c", k.vav.heat_occupied);
    r.temperature("heating_unoccupied_c", k.vav.heat_unoccupied);
    r.temperature("sat_setpoint_c", k.ahu.sat_setpoint);
    r.number("oa_frac_min", k.ahu.oa_frac_min, 0.0, 1.0);
    r.temperature("chw_setpoint_c", k.chiller.chw_setpoint);
    if (!r.err && std::fmod(k.control_period_s, 1.0) != 0.0)
      r.fail(toml::find(*t, "control_period_s")->line, "control_period_s must be a whole number of seconds");
    if (!r.err) {
      try {
        k.vav.validate();
      } catch (const std::exception& e) {
        r.fail(toml::find(root, "controllers")->line, e.what());
      }
    }
    if (r.err) return Unexpected{*r.err};
  }

  if (const auto* t = section(root, "schedule", top)) {
    Reader r(*t, "schedule", toml::find(root, "schedule")->line);
    r.allow({"occupied_start", "occupied_end"});
    SimTime s = SimTime::from_whole_seconds(c.controllers.ahu.schedule.occupied_start_s);
    SimTime e = SimTime::from_whole_seconds(c.controllers.ahu.schedule.occupied_end_s);
    r.clock("occupied_start", s, false);
    r.clock("occupied_end", e, false);
    c.controllers.ahu.schedule.occupied_start_s = static_cast<int>(s.micros() / 1000000);
    c.controllers.ahu.schedule.occupied_end_s = static_cast<int>(e.micros() / 1000000);
    try {
      if (!r.err) c.controllers.ahu.schedule.validate();
    } catch (const std::exception& ex) {
      r.fail(toml::find(root, "schedule")->line, ex.what());
    }
    if (r.err) return Unexpected{*r.err};
  }

  if (const auto* t = section(root, "supervisor", top)) {
    Reader r(*t, "supervisor", toml::find(root, "supervisor")->line);
    r.allow({"trend_interval_s", "poll_timeout_s", "poll_retries", "write_timeout_s", "dispatch_period_s",
             "rediscover_period_s", "monitored_points", "alarm_high_c", "alarm_deadband_k", "alarm_duration_s"});
    auto& s = c.supervisor;
    r.number("trend_interval_s", s.trend_interval_s, 1.0, 86400.0);
    r.number("poll_timeout_s", s.poll_timeout_s, 0.01, 600.0);
    r.integer("poll_retries", s.poll_retries, 0, 10);
    r.number("write_timeout_s", s.write_timeout_s, 0.01, 600.0);
    r.number("dispatch_period_s", s.dispatch_period_s, 1.0, 86400.0);
    r.number("rediscover_period_s", s.rediscover_period_s, 1.0, 86400.0);
    r.temperature("alarm_high_c", s.alarm_high);
    r.number("alarm_deadband_k", s.alarm_deadband, 0.0, 50.0);
    r.number("alarm_duration_s", s.alarm_duration_s, 0.0, 86400.0);
    if (const toml::Value* v = toml::find(*t, "monitored_points")) {
      if (!v->is_array()) {
        r.fail(v->line, "monitored_points must be an array of point ids");
      } else {
        for (const auto& item : v->arr()) {
          if (!item.is_string()) {
            r.fail(item.line, "monitored_points entries must be strings");
            break;
          }
          s.monitored_points.push_back(item.str());
        }
      }
    }
    if (!r.err && s.poll_timeout_s * (s.poll_retries + 1) >= s.trend_interval_s)
      r.fail(toml::find(root, "supervisor")->line, "trend_interval_s must exceed poll_timeout_s x (poll_retries + 1)");
    if (r.err) return Unexpected{*r.err};
  }

  if (const toml::Value* v = toml::find(root, "attacks")) {
    if (!v->is_array()) return Unexpected{ConfigError{v->line, "attacks must be an array of tables ([[attacks]])"}};
    for (const auto& item : v->arr()) {
      if (!item.is_table()) return Unexpected{ConfigError{item.line, "each attack must be a table"}};
      AttackSpec spec;
      if (auto e = parse_attack(item.table(), item.line, spec)) return Unexpected{*e};
      c.attacks.push_back(spec);
      c.attack_lines.push_back(item.line);
    }
  }
  if (top.err) return Unexpected{*top.err};
  try {
    c.plant.params.validate();
  } catch (const std::exception& e) {
    return Unexpected{ConfigError{0, e.what()}};
  }
  return c;
}

Expected<ScenarioConfig, ConfigError> load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) return Unexpected{ConfigError{0, "cannot open scenario '" + path + "'"}};
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_scenario(buf.str(), std::filesystem::path(path).parent_path().string());
}

// ---------------------------------------------------------------- output

std::string resolved_toml(const ScenarioConfig& c) {
  std::ostringstream o;
  auto num = [](double v) {
    std::string s = format_double(v);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
  };
  auto ip = [](const bacnet::BipAddress& a) { return toml::quote(a.to_string()); };
  o << "name = " << toml::quote(c.name) << "\n";
  o << "date = " << toml::quote(c.date.to_string()) << "\n";
  o << "duration_h = " << num(c.duration_s / 3600.0) << "\n";
  o << "seed = " << c.seed << "\n";
  o << "weather = " << toml::quote(c.weather) << "\n";
  o << "speed = " << (c.speed ? num(*c.speed) : std::string("\"max\"")) << "\n";

  o << "\n[network]\n";
  o << "ip_latency_s = " << num(c.network.ip.base_latency_s) << "\n";
  o << "ip_jitter_s = " << num(c.network.ip.jitter_s) << "\n";
  o << "field_latency_s = " << num(c.network.field.base_latency_s) << "\n";
  o << "field_jitter_s = " << num(c.network.field.jitter_s) << "\n";
  o << "server_ip = " << ip(c.network.server) << "\n";
  o << "router_ip = " << ip(c.network.router) << "\n";
  o << "attacker_ip = " << ip(c.network.attacker) << "\n";
  o << "ip_network = " << c.network.ip_network << "\n";
  o << "field_network = " << c.network.field_network << "\n";
  o << "fdt_capacity = " << c.network.fdt_capacity << "\n";

  const auto& p = c.plant.params;
  const auto& z = p.zones.front();
  o << "\n[plant]\n";
  o << "capacitance_j_per_k = " << num(z.capacitance) << "\n";
  o << "ua_out_w_per_k = " << num(z.ua_out) << "\n";
  o << "ua_core_w_per_k = " << num(z.ua_core) << "\n";
  o << "q_occ_w = " << num(z.q_occ) << "\n";
  o << "q_unocc_w = " << num(z.q_unocc) << "\n";
  o << "v_min_kg_s = " << num(z.v_min) << "\n";
  o << "v_cool_max_kg_s = " << num(z.v_cool_max) << "\n";
  o << "reheat_delta_max_k = " << num(p.reheat_delta_max) << "\n";
  o << "fan_delta_t_k = " << num(p.fan_delta_t) << "\n";
  o << "coil_approach_k = " << num(p.coil_approach) << "\n";
  o << "chiller_capacity_w = " << num(p.chiller_capacity) << "\n";
  o << "chw_flow_capacitance_w_per_k = " << num(p.chw_flow_capacitance) << "\n";
  o << "actuator_tau_s = " << num(p.actuator_tau) << "\n";
  o << "initial_zone_temp_c = " << num(p.initial_zone_temp) << "\n";
  o << "noise_sigma_k = " << num(c.plant.noise_sigma) << "\n";

  const auto& k = c.controllers;
  o << "\n[controllers]\n";
  o << "reboot_s = " << num(k.reboot_s) << "\n";
  o << "control_period_s = " << num(k.control_period_s) << "\n";
  o << "vav_kp = " << num(k.vav.gains.kp) << "\n";
  o << "vav_ki = " << num(k.vav.gains.ki) << "\n";
  o << "ahu_kp = " << num(k.ahu.gains.kp) << "\n";
  o << "ahu_ki = " << num(k.ahu.gains.ki) << "\n";
  o << "cooling_occupied_c = " << num(k.vav.cool_occupied) << "\n";
  o << "cooling_unoccupied_c = " << num(k.vav.cool_unoccupied) << "\n";
  o << "heating_occupied_c = " << num(k.vav.heat_occupied) << "\n";
  o << "heating_unoccupied_c = " << num(k.vav.heat_unoccupied) << "\n";
  o << "sat_setpoint_c = " << num(k.ahu.sat_setpoint) << "\n";
  o << "oa_frac_min = " << num(k.ahu.oa_frac_min) << "\n";
  o << "chw_setpoint_c = " << num(k.chiller.chw_setpoint) << "\n";

  o << "\n[schedule]\n";
  o << "occupied_start = " << clock_text(SimTime::from_whole_seconds(k.ahu.schedule.occupied_start_s)) << "\n";
  o << "occupied_end = " << clock_text(SimTime::from_whole_seconds(k.ahu.schedule.occupied_end_s)) << "\n";

  const auto& s = c.supervisor;
  o << "\n[supervisor]\n";
  o << "trend_interval_s = " << num(s.trend_interval_s) << "\n";
  o << "poll_timeout_s = " << num(s.poll_timeout_s) << "\n";
  o << "poll_retries = " << s.poll_retries << "\n";
  o << "write_timeout_s = " << num(s.write_timeout_s) << "\n";
  o << "dispatch_period_s = " << num(s.dispatch_period_s) << "\n";
  o << "rediscover_period_s = " << num(s.rediscover_period_s) << "\n";
  const auto monitored = s.monitored_points.empty() ? server::default_monitored_points(c.zones()) : s.monitored_points;
  o << "monitored_points = [\n";
  for (const auto& m : monitored) o << "  " << toml::quote(m) << ",\n";
  o << "]\n";
  o << "alarm_high_c = " << num(s.alarm_high) << "\n";
  o << "alarm_deadband_k = " << num(s.alarm_deadband) << "\n";
  o << "alarm_duration_s = " << num(s.alarm_duration_s) << "\n";

  for (const auto& a : c.attacks) {
    o << "\n[[attacks]]\n";
    o << "type = " << toml::quote(std::string(attack_type(a))) << "\n";
    if (const auto* f = std::get_if<FdiAttack>(&a)) {
      o << "target_point = " << toml::quote(f->target_point) << "\n";
      o << "value = " << num(f->value) << "\n";
      o << "start = " << clock_text(f->start) << "\n";
      o << "end = " << clock_text(f->end) << "\n";
      o << "via = " << toml::quote(std::string(to_string(f->via))) << "\n";
      o << "rewrite_period_s = " << num(f->rewrite_period_s) << "\n";
      o << "priority = " << static_cast<int>(f->priority) << "\n";
    } else if (const auto* d = std::get_if<DeviceDos>(&a)) {
      o << "target_device = " << toml::quote(d->target_device) << "\n";
      o << "rate = " << num(d->rate) << "\n";
      o << "reinit_state = " << (d->state == bacnet::ReinitState::warmstart ? "\"warmstart\"" : "\"coldstart\"") << "\n";
      o << "start = " << clock_text(d->start) << "\n";
      o << "end = " << clock_text(d->end) << "\n";
      o << "register_ttl_s = " << d->register_ttl_s << "\n";
    } else if (const auto* r = std::get_if<RogueRegister>(&a)) {
      o << "ttl_s = " << r->ttl_s << "\n";
      o << "start = " << clock_text(r->start) << "\n";
      o << "end = " << clock_text(r->end) << "\n";
    }
  }
  return o.str();
}

// ---------------------------------------------------------------- checks

std::optional<ConfigError> validate_attacks(const std::vector<AttackSpec>& attacks, const std::vector<int>& lines,
                                            const server::PointCatalog& catalog, SimTime run_end) {
  std::set<std::string> devices;
  for (const auto& p : catalog) devices.insert(p.device);
  std::map<std::string, std::vector<std::pair<SimTime, SimTime>>> floods;
  for (std::size_t i = 0; i < attacks.size(); ++i) {
    const int line = i < lines.size() ? lines[i] : 0;
    const AttackSpec& a = attacks[i];
    const SimTime start = attack_start(a), end = attack_end(a);
    if (!(start < end)) return ConfigError{line, "attack end must be after start"};
    if (end > run_end) return ConfigError{line, "attack window ends after the scenario duration"};
    if (const auto* f = std::get_if<FdiAttack>(&a)) {
      auto it = std::find_if(catalog.begin(), catalog.end(), [&](const auto& p) { return p.id == f->target_point; });
      if (it == catalog.end()) return ConfigError{line, "unknown target_point '" + f->target_point + "'"};
      if (!it->commandable) return ConfigError{line, "target_point '" + f->target_point + "' is not commandable"};
      if (!(f->rewrite_period_s > 0)) return ConfigError{line, "rewrite_period_s must be positive"};
      if (f->priority < 1 || f->priority > 16) return ConfigError{line, "priority must be 1..16"};
    } else if (const auto* d = std::get_if<DeviceDos>(&a)) {
      if (!devices.contains(d->target_device)) return ConfigError{line, "unknown target_device '" + d->target_device + "'"};
      if (!(d->rate > 0)) return ConfigError{line, "rate must be positive"};
      for (const auto& [s, e] : floods[d->target_device])
        if (start < e && s < end) return ConfigError{line, "overlapping DoS windows on device '" + d->target_device + "'"};
      floods[d->target_device].emplace_back(start, end);
    } else if (const auto* r = std::get_if<RogueRegister>(&a)) {
      if (r->ttl_s == 0) return ConfigError{line, "ttl_s must be positive"};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- JSON

namespace {

std::optional<SimTime> json_clock(const nlohmann::json& v) {
  if (v.is_number()) {
    const double s = v.get<double>();
    if (!std::isfinite(s) || s < 0) return std::nullopt;
    return SimTime::from_seconds(s);
  }
  if (v.is_string()) return parse_clock(v.get<std::string>());
  return std::nullopt;
}

}  // namespace

Expected<AttackSpec, std::string> attack_from_json(const nlohmann::json& j) {
  if (!j.is_object()) return Unexpected{std::string("attack spec must be a JSON object")};
  auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string()) return Unexpected{std::string("type: required string")};
  const std::string type = type_it->get<std::string>();
  auto allowed = [&](std::initializer_list<const char*> keys) -> std::optional<std::string> {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!ok.contains(it.key())) return it.key() + ": unknown field";
    return std::nullopt;
  };
  auto window = [&](SimTime& start, SimTime& end) -> std::optional<std::string> {
    if (!j.contains("start")) return std::string("start: required");
    if (!j.contains("end")) return std::string("end: required");
    auto s = json_clock(j["start"]);
    auto e = json_clock(j["end"]);
    if (!s) return std::string("start: expected \"HH:MM[:SS]\" or seconds");
    if (!e) return std::string("end: expected \"HH:MM[:SS]\" or seconds");
    if (!(*s < *e)) return std::string("end: must be after start");
    start = *s;
    end = *e;
    return std::nullopt;
  };
  if (type == "fdi") {
    if (auto e = allowed({"type", "target_point", "value", "start", "end", "via", "rewrite_period_s", "priority"}))
      return Unexpected{*e};
    FdiAttack a;
    if (!j.contains("target_point") || !j["target_point"].is_string())
      return Unexpected{std::string("target_point: required string")};
    a.target_point = j["target_point"].get<std::string>();
    if (!j.contains("value")) return Unexpected{std::string("value: required")};
    if (j["value"].is_number()) {
      a.value = j["value"].get<double>();
    } else if (j["value"].is_string()) {
      auto t = parse_temperature(j["value"].get<std::string>());
      if (!t) return Unexpected{std::string("value: expected number or \"95F\" / \"35C\"")};
      a.value = *t;
    } else {
      return Unexpected{std::string("value: expected number or \"95F\" / \"35C\"")};
    }
    if (auto e = window(a.start, a.end)) return Unexpected{*e};
    if (j.contains("via")) {
      const auto via = j["via"].is_string() ? j["via"].get<std::string>() : "";
      if (via == "compromised-server") a.via = FdiVia::compromised_server;
      else if (via == "rogue-device") a.via = FdiVia::rogue_device;
      else return Unexpected{std::string("via: expected \"compromised-server\" or \"rogue-device\"")};
    }
    if (j.contains("rewrite_period_s")) {
      if (!j["rewrite_period_s"].is_number() || !(j["rewrite_period_s"].get<double>() > 0))
        return Unexpected{std::string("rewrite_period_s: expected positive number")};
      a.rewrite_period_s = j["rewrite_period_s"].get<double>();
    }
    if (j.contains("priority")) {
      if (!j["priority"].is_number_integer() || j["priority"].get<int>() < 1 || j["priority"].get<int>() > 16)
        return Unexpected{std::string("priority: expected integer 1..16")};
      a.priority = static_cast<std::uint8_t>(j["priority"].get<int>());
    }
    return AttackSpec{a};
  }
  if (type == "dos") {
    if (auto e = allowed({"type", "target_device", "rate", "reinit_state", "start", "end", "register_ttl_s"}))
      return Unexpected{*e};
    DeviceDos a;
    if (!j.contains("target_device") || !j["target_device"].is_string())
      return Unexpected{std::string("target_device: required string")};
    a.target_device = j["target_device"].get<std::string>();
    if (j.contains("rate")) {
      if (!j["rate"].is_number() || !(j["rate"].get<double>() > 0) || j["rate"].get<double>() > 1000)
        return Unexpected{std::string("rate: expected number in (0, 1000]")};
      a.rate = j["rate"].get<double>();
    }
    if (j.contains("reinit_state")) {
      const auto s = j["reinit_state"].is_string() ? j["reinit_state"].get<std::string>() : "";
      if (s == "warmstart") a.state = bacnet::ReinitState::warmstart;
      else if (s == "coldstart") a.state = bacnet::ReinitState::coldstart;
      else return Unexpected{std::string("reinit_state: expected \"warmstart\" or \"coldstart\"")};
    }
    if (j.contains("register_ttl_s")) {
      if (!j["register_ttl_s"].is_number_integer() || j["register_ttl_s"].get<long>() < 0 ||
          j["register_ttl_s"].get<long>() > 65535)
        return Unexpected{std::string("register_ttl_s: expected integer 0..65535")};
      a.register_ttl_s = static_cast<std::uint16_t>(j["register_ttl_s"].get<long>());
    }
    if (auto e = window(a.start, a.end)) return Unexpected{*e};
    return AttackSpec{a};
  }
  if (type == "rogue-register") {
    if (auto e = allowed({"type", "ttl_s", "start", "end"})) return Unexpected{*e};
    RogueRegister a;
    if (j.contains("ttl_s")) {
      if (!j["ttl_s"].is_number_integer() || j["ttl_s"].get<long>() < 1 || j["ttl_s"].get<long>() > 65535)
        return Unexpected{std::string("ttl_s: expected integer 1..65535")};
      a.ttl_s = static_cast<std::uint16_t>(j["ttl_s"].get<long>());
    }
    if (auto e = window(a.start, a.end)) return Unexpected{*e};
    return AttackSpec{a};
  }
  return Unexpected{"type: unknown attack type '" + type + "'"};
}

nlohmann::json attack_to_json(const AttackSpec& a) {
  nlohmann::json j;
  j["type"] = std::string(attack_type(a));
  j["start"] = attack_start(a).seconds();
  j["end"] = attack_end(a).seconds();
  if (const auto* f = std::get_if<FdiAttack>(&a)) {
    j["target_point"] = f->target_point;
    j["value"] = f->value;
    j["via"] = std::string(to_string(f->via));
    j["rewrite_period_s"] = f->rewrite_period_s;
    j["priority"] = f->priority;
  } else if (const auto* d = std::get_if<DeviceDos>(&a)) {
    j["target_device"] = d->target_device;
    j["rate"] = d->rate;
    j["reinit_state"] = d->state == bacnet::ReinitState::warmstart ? "warmstart" : "coldstart";
    j["register_ttl_s"] = d->register_ttl_s;
  } else if (const auto* r = std::get_if<RogueRegister>(&a)) {
    j["ttl_s"] = r->ttl_s;
  }
  return j;
}

}  // namespace bassim::attack
