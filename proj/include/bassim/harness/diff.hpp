#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bassim/harness/bundle.hpp"
#include "json.hpp"

namespace bassim::harness {

inline constexpr double kRecoveryBand = 0.5;        // |deviation| limit, point units
inline constexpr double kRecoverySustainS = 600.0;  // how long it must hold

struct WindowCounts {
  std::size_t pre = 0;
  std::size_t during = 0;
  std::size_t post = 0;
};

struct PointDiff {
  std::string point;
  double max_abs_dev = 0.0;
  std::optional<std::int64_t> peak_time_us;
  double max_dev = 0.0;  // most positive attack - baseline
  double min_dev = 0.0;  // most negative
  double window_max_abs_dev = 0.0;  // inside the attack window only
  double window_max_dev = 0.0;
  // First sample at or after the attack window end from which |dev| stays
  // under the band for the sustain period; nullopt when it never does.
  std::optional<std::int64_t> recovered_at_us;
  // recovered_at - window end; 0 without attacks.
  std::optional<double> recovery_s;
  WindowCounts baseline_missing;
  WindowCounts attack_missing;
};

struct PairedRow {
  std::int64_t time_us = 0;
  std::string point;
  std::optional<double> baseline;
  std::optional<double> attack;
};

struct DiffReport {
  std::optional<std::int64_t> window_start_us;  // union of attack windows
  std::optional<std::int64_t> window_end_us;
  std::vector<PointDiff> points;
  std::vector<PairedRow> rows;

  const PointDiff* find(const std::string& point) const;
  nlohmann::ordered_json to_json() const;
  // sim_time_s,point,baseline,attack,deviation
  std::string csv() const;
};

// Both bundles must share date, seed, duration, points and sample times.
Expected<DiffReport, std::string> diff_bundles(const std::string& baseline_dir, const std::string& attack_dir);
Expected<DiffReport, std::string> diff_tables(const TrendTable& baseline, const TrendTable& attack,
                                              std::optional<std::int64_t> window_start_us,
                                              std::optional<std::int64_t> window_end_us);

}  // namespace bassim::harness
