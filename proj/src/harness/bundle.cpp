#include "bassim/harness/bundle.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "bassim/util/digest.hpp"

namespace bassim::harness {

namespace fs = std::filesystem;

nlohmann::ordered_json alarm_json(const server::AlarmEvent& e) {
  nlohmann::ordered_json j;
  j["rule"] = e.rule;
  j["point"] = e.point;
  j["exceeded_since"] = e.exceeded_since.seconds();
  j["onset"] = e.onset.seconds();
  j["cleared"] = e.cleared ? nlohmann::ordered_json(e.cleared->seconds()) : nlohmann::ordered_json(nullptr);
  j["peak"] = e.peak;
  return j;
}

nlohmann::ordered_json attack_record_json(const attack::AttackRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["type"] = std::string(attack::attack_type(r.spec));
  j["state"] = std::string(attack::to_string(r.state));
  j["requests_sent"] = r.requests_sent;
  j["failures"] = r.failures;
  j["spec"] = attack::attack_to_json(r.spec);
  return j;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw RuntimeFault("cannot write '" + path.string() + "'");
}

}  // namespace

void write_resolved(const attack::ScenarioConfig& config, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw RuntimeFault("cannot create '" + out_dir + "': " + ec.message());
  write_text(fs::path(out_dir) / "scenario.resolved", attack::resolved_toml(config));
}

void write_run_outputs(const Simulation& sim, const std::string& out_dir) {
  const fs::path dir(out_dir);
  write_text(dir / "flows.json", sim.capture().flows().dump());

  const auto& cfg = sim.config();
  const auto& sup = sim.supervisor();
  nlohmann::ordered_json s;
  s["v"] = 1;
  s["scenario"] = cfg.name;
  s["date"] = cfg.date.to_string();
  s["seed"] = cfg.seed;
  s["duration_s"] = cfg.duration_s;
  s["sim_end_s"] = sim.now().seconds();

  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (auto name : kBundleFiles) {
    if (name == "summary.json") continue;
    try {
      files[std::string(name)] = sha256_file(dir / name);
    } catch (const std::runtime_error& e) {
      throw RuntimeFault(e.what());
    }
  }
  s["sha256"] = std::move(files);

  nlohmann::ordered_json points = nlohmann::ordered_json::object();
  for (const auto& id : sup.config().monitored_points) {
    const auto& series = sup.trends().series(id);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : series) {
      if (!r.value) continue;
      lo = std::min<double>(lo, *r.value);
      hi = std::max<double>(hi, *r.value);
      sum += *r.value;
      ++n;
    }
    nlohmann::ordered_json p;
    p["records"] = series.size();
    p["missing"] = sup.trends().missing_count(id);
    p["min"] = n ? nlohmann::ordered_json(lo) : nlohmann::ordered_json(nullptr);
    p["max"] = n ? nlohmann::ordered_json(hi) : nlohmann::ordered_json(nullptr);
    p["mean"] = n ? nlohmann::ordered_json(sum / static_cast<double>(n)) : nlohmann::ordered_json(nullptr);
    points[id] = std::move(p);
  }
  s["points"] = std::move(points);

  nlohmann::ordered_json alarms = nlohmann::ordered_json::array();
  for (const auto& e : sup.alarms().events()) alarms.push_back(alarm_json(e));
  s["alarms"] = std::move(alarms);

  nlohmann::ordered_json attacks = nlohmann::ordered_json::array();
  for (const auto& a : sim.attacks().attacks()) attacks.push_back(attack_record_json(a));
  s["attacks"] = std::move(attacks);

  const auto& st = sup.stats();
  s["supervisor"] = {{"reads_sent", st.reads_sent},   {"read_timeouts", st.read_timeouts},
                     {"read_errors", st.read_errors}, {"writes_sent", st.writes_sent},
                     {"who_is_sent", st.who_is_sent}, {"audit_records", sup.audit().size()}};
  s["traffic"] = {{"records", sim.capture().jsonl_count()}, {"ip_packets", sim.capture().pcap_count()}};
  write_text(dir / "summary.json", s.dump(2) + "\n");
}

std::vector<std::string> verify_bundle(const std::string& dir) {
  std::vector<std::string> problems;
  for (auto name : kBundleFiles)
    if (!fs::exists(fs::path(dir) / name)) problems.push_back("missing " + std::string(name));
  if (!problems.empty()) return problems;
  std::ifstream in(fs::path(dir) / "summary.json");
  nlohmann::json summary = nlohmann::json::parse(in, nullptr, false);
  if (summary.is_discarded() || !summary.contains("sha256")) return {"summary.json unreadable"};
  for (auto name : kBundleFiles) {
    if (name == "summary.json") continue;
    const std::string key(name);
    if (!summary["sha256"].contains(key)) {
      problems.push_back("no digest for " + key);
    } else if (summary["sha256"][key].get<std::string>() != sha256_file(fs::path(dir) / name)) {
      problems.push_back("digest mismatch for " + key);
    }
  }
  return problems;
}

std::optional<std::int64_t> parse_seconds_us(std::string_view text) {
  bool neg = false;
  if (!text.empty() && text.front() == '-') {
    neg = true;
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() || frac.size() > 6 || (dot != std::string_view::npos && frac.empty())) return std::nullopt;
  std::int64_t w = 0;
  auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
  if (ec != std::errc{} || p != whole.data() + whole.size()) return std::nullopt;
  std::int64_t f = 0;
  for (char ch : frac) {
    if (ch < '0' || ch > '9') return std::nullopt;
    f = f * 10 + (ch - '0');
  }
  for (std::size_t i = frac.size(); i < 6; ++i) f *= 10;
  const std::int64_t us = w * 1000000 + f;
  return neg ? -us : us;
}

Expected<TrendTable, CsvError> read_trends_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Unexpected{CsvError{0, "cannot open '" + path + "'"}};
  TrendTable table;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (n == 1) {
      if (line != server::kTrendCsvHeader) return Unexpected{CsvError{1, "unexpected header"}};
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (line.back() == ',') cols.emplace_back();
    if (cols.size() != 4) return Unexpected{CsvError{n, "expected 4 columns"}};
    TrendSample s;
    auto t = parse_seconds_us(cols[0]);
    if (!t) return Unexpected{CsvError{n, "bad sim_time_s '" + cols[0] + "'"}};
    s.time_us = *t;
    if (!cols[2].empty()) {
      double v = 0;
      auto [p, ec] = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(), v);
      if (ec != std::errc{} || p != cols[2].data() + cols[2].size())
        return Unexpected{CsvError{n, "bad value '" + cols[2] + "'"}};
      s.value = v;
    }
    s.quality = cols[3];
    table[cols[1]].push_back(std::move(s));
  }
  if (n == 0) return Unexpected{CsvError{0, "empty file"}};
  return table;
}

}  // namespace bassim::harness
