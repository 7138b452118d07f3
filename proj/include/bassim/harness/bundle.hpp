#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bassim/harness/simulation.hpp"
#include "json.hpp"

namespace bassim::harness {

inline constexpr std::array<std::string_view, 7> kBundleFiles = {
    "scenario.resolved", "trends.csv", "audit.jsonl", "traffic.pcap", "traffic.jsonl", "flows.json", "summary.json"};

nlohmann::ordered_json alarm_json(const server::AlarmEvent& event);
nlohmann::ordered_json attack_record_json(const attack::AttackRecord& record);

// Writes scenario.resolved before the run starts.
void write_resolved(const attack::ScenarioConfig& config, const std::string& out_dir);
// After Simulation::finish(): flows.json and summary.json (digests of the
// other six files, per-point statistics, alarms, attacks).
void write_run_outputs(const Simulation& sim, const std::string& out_dir);

// Empty when every file exists and matches the digest in summary.json.
std::vector<std::string> verify_bundle(const std::string& dir);

struct TrendSample {
  std::int64_t time_us = 0;
  std::optional<double> value;
  std::string quality;
};
using TrendTable = std::map<std::string, std::vector<TrendSample>>;

struct CsvError {
  std::size_t line = 0;
  std::string message;
};
Expected<TrendTable, CsvError> read_trends_csv(const std::string& path);

// Decimal seconds to µs without going through binary floating point.
std::optional<std::int64_t> parse_seconds_us(std::string_view text);

}  // namespace bassim::harness
