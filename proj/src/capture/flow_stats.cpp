#include "bassim/capture/flow_stats.hpp"

#include "bassim/bacnet/codec.hpp"

namespace bassim::capture {

double Flow::rate_pps() const {
  if (packets < 2 || last_us <= first_us) return 0.0;
  return static_cast<double>(packets - 1) / (static_cast<double>(last_us - first_us) / 1e6);
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

void FlowStats::add(const UdpDatagram& d, std::int64_t unix_us) {
  const std::string src = d.src.to_string();
  const std::string dst = d.dst.to_string();
  auto [it, inserted] = flows_.try_emplace({src, dst});
  Flow& f = it->second;
  if (inserted) {
    f.src = src;
    f.dst = dst;
    f.first_us = unix_us;
  }
  ++f.packets;
  f.bytes += d.payload.size();
  f.last_us = unix_us;
  ++f.services[bvll_service(d.payload)];
  ++f.per_minute[floor_div(unix_us, 60'000'000)];
}

std::uint64_t FlowStats::total_packets() const {
  std::uint64_t n = 0;
  for (const auto& [_, f] : flows_) n += f.packets;
  return n;
}

std::uint64_t FlowStats::total_bytes() const {
  std::uint64_t n = 0;
  for (const auto& [_, f] : flows_) n += f.bytes;
  return n;
}

nlohmann::ordered_json FlowStats::to_json() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [key, f] : flows_) {
    nlohmann::ordered_json j;
    j["src"] = f.src;
    j["dst"] = f.dst;
    j["packets"] = f.packets;
    j["bytes"] = f.bytes;
    j["first_ts_us"] = f.first_us;
    j["last_ts_us"] = f.last_us;
    j["rate_pps"] = f.rate_pps();
    nlohmann::ordered_json services = nlohmann::ordered_json::object();
    for (const auto& [name, n] : f.services) services[name] = n;
    j["services"] = std::move(services);
    // Dense series from the first to the last active minute.
    nlohmann::ordered_json counts = nlohmann::ordered_json::array();
    const std::int64_t first_minute = f.per_minute.begin()->first;
    const std::int64_t last_minute = f.per_minute.rbegin()->first;
    for (std::int64_t m = first_minute; m <= last_minute; ++m) {
      auto c = f.per_minute.find(m);
      counts.push_back(c == f.per_minute.end() ? 0 : c->second);
    }
    j["per_minute"] = {{"start_unix_minute", first_minute}, {"counts", std::move(counts)}};
    out[key.first + " -> " + key.second] = std::move(j);
  }
  return out;
}

std::string FlowStats::dump() const { return to_json().dump(2) + "\n"; }

std::string bvll_service(ByteView bvll) {
  auto frame = bacnet::decode_frame(bvll);
  if (!frame) return "malformed";
  return bacnet::service_label(*frame);
}

std::string npdu_service(ByteView npdu) {
  auto message = bacnet::decode_npdu_message(npdu);
  if (!message) return "malformed";
  return bacnet::service_label(message->apdu);
}

Expected<FlowStats, PcapError> summarize_pcap(const std::vector<PcapPacket>& packets) {
  FlowStats stats;
  for (std::size_t i = 0; i < packets.size(); ++i) {
    auto d = parse_frame(packets[i].data);
    if (!d) return Unexpected{PcapError{i, "packet " + std::to_string(i) + ": " + d.error()}};
    stats.add(*d, packets[i].unix_us);
  }
  return stats;
}

}  // namespace bassim::capture
