#include "bassim/server/trend.hpp"

#include <stdexcept>

#include "bassim/util/format.hpp"

namespace bassim::server {

std::string_view to_string(Quality q) {
  switch (q) {
    case Quality::ok: return "ok";
    case Quality::missing: return "missing";
    case Quality::stale: return "stale";
  }
  return "?";
}

std::string format_trend_row(const TrendRow& row) {
  std::string line = format_seconds(row.record.time);
  line += ',';
  line += row.point;
  line += ',';
  if (row.record.value) line += format_float(*row.record.value);
  line += ',';
  line += to_string(row.record.quality);
  return line;
}

void TrendStore::append(const std::string& point, const TrendRecord& record) {
  if ((record.quality == Quality::missing) == record.value.has_value())
    throw std::logic_error("trend record for " + point + ": quality missing must coincide with an absent value");
  auto& s = series_[point];
  if (!s.empty() && record.time <= s.back().time)
    throw std::logic_error("trend record for " + point + " is not strictly after the previous one");
  s.push_back(record);
  unwritten_.emplace(std::make_pair(record.time.micros(), point), record);
  ++total_;
}

const std::vector<TrendRecord>& TrendStore::series(const std::string& point) const {
  static const std::vector<TrendRecord> empty;
  auto it = series_.find(point);
  return it == series_.end() ? empty : it->second;
}

std::vector<std::string> TrendStore::points() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : series_) out.push_back(name);
  return out;
}

const TrendRecord* TrendStore::latest(const std::string& point) const {
  auto it = series_.find(point);
  return it == series_.end() || it->second.empty() ? nullptr : &it->second.back();
}

std::size_t TrendStore::missing_count(const std::string& point) const {
  std::size_t n = 0;
  for (const auto& r : series(point)) n += r.quality == Quality::missing;
  return n;
}

std::vector<TrendRow> TrendStore::drain_before(SimTime horizon) {
  std::vector<TrendRow> rows;
  auto it = unwritten_.begin();
  for (; it != unwritten_.end() && it->first.first < horizon.micros(); ++it)
    rows.push_back(TrendRow{it->first.second, it->second});
  unwritten_.erase(unwritten_.begin(), it);
  return rows;
}

std::vector<TrendRow> TrendStore::drain_all() {
  std::vector<TrendRow> rows;
  for (auto& [key, rec] : unwritten_) rows.push_back(TrendRow{key.second, rec});
  unwritten_.clear();
  return rows;
}

}  // namespace bassim::server
