#include "bassim/harness/diff.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "bassim/util/format.hpp"

namespace bassim::harness {

namespace fs = std::filesystem;

const PointDiff* DiffReport::find(const std::string& point) const {
  for (const auto& p : points)
    if (p.point == point) return &p;
  return nullptr;
}

namespace {

nlohmann::ordered_json opt_seconds(const std::optional<std::int64_t>& us) {
  if (!us) return nullptr;
  return static_cast<double>(*us) / 1e6;
}

nlohmann::ordered_json counts_json(const WindowCounts& c) {
  return {{"pre", c.pre}, {"during", c.during}, {"post", c.post}};
}

}  // namespace

nlohmann::ordered_json DiffReport::to_json() const {
  nlohmann::ordered_json j;
  j["window"] = {{"start_s", opt_seconds(window_start_us)}, {"end_s", opt_seconds(window_end_us)}};
  nlohmann::ordered_json pts = nlohmann::ordered_json::object();
  for (const auto& p : points) {
    nlohmann::ordered_json e;
    e["max_abs_dev"] = p.max_abs_dev;
    e["peak_time_s"] = opt_seconds(p.peak_time_us);
    e["max_dev"] = p.max_dev;
    e["min_dev"] = p.min_dev;
    e["window_max_abs_dev"] = p.window_max_abs_dev;
    e["window_max_dev"] = p.window_max_dev;
    e["recovered_at_s"] = opt_seconds(p.recovered_at_us);
    e["recovery_s"] = p.recovery_s ? nlohmann::ordered_json(*p.recovery_s) : nlohmann::ordered_json(nullptr);
    e["missing"] = {{"baseline", counts_json(p.baseline_missing)}, {"attack", counts_json(p.attack_missing)}};
    pts[p.point] = std::move(e);
  }
  j["points"] = std::move(pts);
  return j;
}

std::string DiffReport::csv() const {
  std::string out = "sim_time_s,point,baseline,attack,deviation\n";
  for (const auto& r : rows) {
    out += format_seconds(SimTime::from_micros(r.time_us));
    out += ',' + r.point + ',';
    if (r.baseline) out += format_double(*r.baseline);
    out += ',';
    if (r.attack) out += format_double(*r.attack);
    out += ',';
    if (r.baseline && r.attack) out += format_double(*r.attack - *r.baseline);
    out += '\n';
  }
  return out;
}

Expected<DiffReport, std::string> diff_tables(const TrendTable& baseline, const TrendTable& attack,
                                              std::optional<std::int64_t> ws, std::optional<std::int64_t> we) {
  if (baseline.size() != attack.size()) return Unexpected{std::string("bundles trend different point sets")};
  DiffReport report;
  report.window_start_us = ws;
  report.window_end_us = we;
  for (const auto& [point, base] : baseline) {
    auto it = attack.find(point);
    if (it == attack.end()) return Unexpected{"point '" + point + "' missing from the attack bundle"};
    const auto& atk = it->second;
    if (atk.size() != base.size())
      return Unexpected{"point '" + point + "' has " + std::to_string(base.size()) + " vs " +
                        std::to_string(atk.size()) + " records"};
    PointDiff d;
    d.point = point;
    auto window_of = [&](std::int64_t t) -> int {
      if (!ws) return 0;
      if (t < *ws) return 0;
      return t < *we ? 1 : 2;
    };
    auto count = [&](WindowCounts& c, std::int64_t t) {
      switch (window_of(t)) {
        case 0: ++c.pre; break;
        case 1: ++c.during; break;
        default: ++c.post; break;
      }
    };
    for (std::size_t i = 0; i < base.size(); ++i) {
      const auto& b = base[i];
      const auto& a = atk[i];
      if (b.time_us != a.time_us)
        return Unexpected{"point '" + point + "' record " + std::to_string(i) + " is not time-aligned"};
      if (!b.value) count(d.baseline_missing, b.time_us);
      if (!a.value) count(d.attack_missing, a.time_us);
      report.rows.push_back(PairedRow{b.time_us, point, b.value, a.value});
      if (!b.value || !a.value) continue;
      const double dev = *a.value - *b.value;
      if (std::abs(dev) > d.max_abs_dev) {
        d.max_abs_dev = std::abs(dev);
        d.peak_time_us = b.time_us;
      }
      d.max_dev = std::max(d.max_dev, dev);
      d.min_dev = std::min(d.min_dev, dev);
      if (window_of(b.time_us) == 1) {
        d.window_max_abs_dev = std::max(d.window_max_abs_dev, std::abs(dev));
        d.window_max_dev = std::max(d.window_max_dev, dev);
      }
    }
    if (we) {
      // Recovery starts at the first in-band sample of a run that stays in
      // band for the sustain period; a run cut short by the end of data
      // does not count.
      const auto sustain = static_cast<std::int64_t>(kRecoverySustainS * 1e6);
      std::optional<std::int64_t> candidate;
      for (std::size_t i = 0; i < base.size() && !d.recovered_at_us; ++i) {
        const std::int64_t t = base[i].time_us;
        if (t < *we) continue;
        const bool inside = base[i].value && atk[i].value && std::abs(*atk[i].value - *base[i].value) < kRecoveryBand;
        if (!inside) {
          candidate.reset();
          continue;
        }
        if (!candidate) candidate = t;
        if (t - *candidate >= sustain) d.recovered_at_us = candidate;
      }
      if (d.recovered_at_us) d.recovery_s = static_cast<double>(*d.recovered_at_us - *we) / 1e6;
    } else {
      d.recovery_s = 0.0;
    }
    report.points.push_back(std::move(d));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const PairedRow& a, const PairedRow& b) {
    return a.time_us != b.time_us ? a.time_us < b.time_us : a.point < b.point;
  });
  return report;
}

namespace {

Expected<nlohmann::json, std::string> read_summary(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "summary.json");
  if (!in) return Unexpected{"no summary.json in '" + dir + "'"};
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) return Unexpected{"unreadable summary.json in '" + dir + "'"};
  return j;
}

}  // namespace

Expected<DiffReport, std::string> diff_bundles(const std::string& baseline_dir, const std::string& attack_dir) {
  auto bs = read_summary(baseline_dir);
  if (!bs) return Unexpected{bs.error()};
  auto as = read_summary(attack_dir);
  if (!as) return Unexpected{as.error()};
  for (const char* key : {"date", "seed", "duration_s"}) {
    if (!bs->contains(key) || !as->contains(key) || (*bs)[key] != (*as)[key])
      return Unexpected{std::string("bundles differ in ") + key};
  }
  std::optional<std::int64_t> ws, we;
  for (const auto& a : (*as)["attacks"]) {
    const auto& spec = a["spec"];
    const auto s = static_cast<std::int64_t>(std::llround(spec["start"].get<double>() * 1e6));
    const auto e = static_cast<std::int64_t>(std::llround(spec["end"].get<double>() * 1e6));
    ws = ws ? std::min(*ws, s) : s;
    we = we ? std::max(*we, e) : e;
  }
  auto bt = read_trends_csv((fs::path(baseline_dir) / "trends.csv").string());
  if (!bt) return Unexpected{"baseline trends.csv line " + std::to_string(bt.error().line) + ": " + bt.error().message};
  auto at = read_trends_csv((fs::path(attack_dir) / "trends.csv").string());
  if (!at) return Unexpected{"attack trends.csv line " + std::to_string(at.error().line) + ": " + at.error().message};
  return diff_tables(*bt, *at, ws, we);
}

}  // namespace bassim::harness
