#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bassim/bacnet/types.hpp"
#include "bassim/control/controllers.hpp"
#include "bassim/net/fabric.hpp"
#include "bassim/plant/plant.hpp"
#include "bassim/server/supervisor.hpp"
#include "bassim/util/expected.hpp"
#include "json.hpp"

namespace bassim::attack {

enum class FdiVia { compromised_server, rogue_device };
std::string_view to_string(FdiVia via);

struct FdiAttack {
  std::string target_point;
  double value = 0.0;  // SI (C for temperatures)
  SimTime start;
  SimTime end;
  FdiVia via = FdiVia::compromised_server;
  double rewrite_period_s = 60.0;
  std::uint8_t priority = 16;
};

struct DeviceDos {
  std::string target_device;
  double rate = 1.0;  // requests per second
  bacnet::ReinitState state = bacnet::ReinitState::warmstart;
  SimTime start;
  SimTime end;
  std::uint16_t register_ttl_s = 300;  // foreign-device registration first; 0 skips it
};

// Foreign-device registration on its own, refreshed at ttl/2 inside the window.
struct RogueRegister {
  std::uint16_t ttl_s = 300;
  SimTime start;
  SimTime end;
};

using AttackSpec = std::variant<FdiAttack, DeviceDos, RogueRegister>;
SimTime attack_start(const AttackSpec& a);
SimTime attack_end(const AttackSpec& a);
std::string_view attack_type(const AttackSpec& a);

struct Date {
  int year = 2023;
  int month = 8;
  int day = 1;
  std::string to_string() const;
  int day_of_year() const;       // 0-based
  std::int64_t unix_days() const;  // days since 1970-01-01
  static std::optional<Date> parse(std::string_view text);
};

struct NetworkSettings {
  net::LinkModel ip{0.001, 0.0005};
  net::LinkModel field{0.005, 0.001};
  bacnet::BipAddress server{{10, 13, 254, 2}, bacnet::kBacnetIpPort};
  bacnet::BipAddress router{{10, 13, 254, 5}, bacnet::kBacnetIpPort};
  bacnet::BipAddress attacker{{192, 168, 1, 66}, bacnet::kBacnetIpPort};
  std::uint16_t ip_network = net::kDefaultIpNetwork;
  std::uint16_t field_network = net::kDefaultFieldNetwork;
  std::size_t fdt_capacity = 16;
};

struct PlantSettings {
  plant::PlantParams params = plant::PlantParams::five_zone_office();
  double noise_sigma = 0.05;
};

struct ControllerSettings {
  control::VavConfig vav;
  control::AhuConfig ahu;
  control::ChillerConfig chiller;
  double reboot_s = 10.0;
  double control_period_s = 5.0;
};

struct SupervisorSettings {
  double trend_interval_s = 60.0;
  double poll_timeout_s = 3.0;
  int poll_retries = 1;
  double write_timeout_s = 3.0;
  double dispatch_period_s = 300.0;
  double rediscover_period_s = 600.0;
  std::vector<std::string> monitored_points;  // empty: defaults
  double alarm_high = 26.5;
  double alarm_deadband = 0.5;
  double alarm_duration_s = 300.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  Date date;
  double duration_s = 86400.0;
  std::uint64_t seed = 42;
  std::string weather = "synthetic";
  std::optional<double> speed;  // nullopt: as fast as possible
  NetworkSettings network;
  PlantSettings plant;
  ControllerSettings controllers;
  SupervisorSettings supervisor;
  std::vector<AttackSpec> attacks;
  std::vector<int> attack_lines;  // source line of each attack, 0 when not from a file

  SimTime end() const { return SimTime::from_seconds(duration_s); }
  std::size_t zones() const { return plant.params.zones.size(); }
};

struct ConfigError {
  int line = 0;  // 0 when not tied to a line
  std::string message;
  std::string to_string() const;
};

// Parses and schema-checks a scenario document. Relative weather paths are
// resolved against base_dir.
Expected<ScenarioConfig, ConfigError> parse_scenario(const std::string& text, const std::string& base_dir = "");
Expected<ScenarioConfig, ConfigError> load_scenario(const std::string& path);

// Fully resolved document (every default written out) that parses back to
// the same configuration.
std::string resolved_toml(const ScenarioConfig& config);

// "95F" / "35C" / plain number (C).
std::optional<double> parse_temperature(const std::string& text);
// "10:00", "10:00:30" or seconds.
std::optional<SimTime> parse_clock(const std::string& text);

// Semantic checks against the testbed: targets exist, windows inside the
// run, rates positive, no overlapping floods on one device.
std::optional<ConfigError> validate_attacks(const std::vector<AttackSpec>& attacks, const std::vector<int>& lines,
                                            const server::PointCatalog& catalog, SimTime run_end);

// JSON form used by the HTTP API; same keys as the scenario tables.
Expected<AttackSpec, std::string> attack_from_json(const nlohmann::json& j);
nlohmann::json attack_to_json(const AttackSpec& a);

}  // namespace bassim::attack
