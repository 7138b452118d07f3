#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bassim/util/sim_time.hpp"

namespace bassim::server {

enum class Quality { ok, missing, stale };
std::string_view to_string(Quality q);

struct TrendRecord {
  SimTime time;
  std::optional<float> value;  // absent exactly when quality is missing
  Quality quality = Quality::ok;
};

struct TrendRow {
  std::string point;
  TrendRecord record;
};

inline constexpr std::string_view kTrendCsvHeader = "sim_time_s,point,value,quality";
std::string format_trend_row(const TrendRow& row);

// Per-point trend history plus a queue of rows not yet persisted, released in
// (time, point) order.
class TrendStore {
 public:
  // Throws std::logic_error when time does not advance for the point or the
  // value/quality pairing is inconsistent.
  void append(const std::string& point, const TrendRecord& record);

  const std::vector<TrendRecord>& series(const std::string& point) const;
  std::vector<std::string> points() const;
  const TrendRecord* latest(const std::string& point) const;
  std::size_t missing_count(const std::string& point) const;
  std::size_t size() const { return total_; }

  // Rows with time < horizon, sorted by (time, point), removed from the queue.
  std::vector<TrendRow> drain_before(SimTime horizon);
  std::vector<TrendRow> drain_all();

 private:
  std::map<std::string, std::vector<TrendRecord>> series_;
  std::map<std::pair<std::int64_t, std::string>, TrendRecord> unwritten_;
  std::size_t total_ = 0;
};

}  // namespace bassim::server
