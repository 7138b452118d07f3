#include "bassim/capture/capture.hpp"

#include <stdexcept>

#include "bassim/util/format.hpp"

namespace bassim::capture {

std::string jsonl_line(const CapturedPacket& p) {
  // Every field is ASCII without quotes or backslashes, so no escaping.
  std::string line = "{\"v\":1,\"t\":";
  line += format_seconds(p.sim_time);
  line += ",\"segment\":\"";
  line += net::to_string(p.segment);
  line += "\",\"src\":\"";
  line += p.src.to_string();
  line += "\",\"dst\":\"";
  line += p.dst ? p.dst->to_string() : std::string("broadcast");
  line += "\",\"len\":";
  line += std::to_string(p.raw.size());
  line += ",\"service\":\"";
  line += p.service;
  line += "\",\"verdict\":\"";
  line += p.verdict == net::Verdict::delivered ? "delivered" : "dropped";
  line += "\"}";
  return line;
}

Capture::Capture(CaptureConfig config) : config_(std::move(config)) {
  if (!config_.pcap_path.empty()) pcap_ = PcapWriter(config_.pcap_path);
  if (!config_.jsonl_path.empty()) {
    jsonl_.open(config_.jsonl_path, std::ios::binary | std::ios::trunc);
    if (!jsonl_) throw std::runtime_error("cannot open capture log '" + config_.jsonl_path + "'");
  }
}

void Capture::on_record(const net::WireRecord& r) {
  if (last_time_ && r.time < *last_time_) throw std::logic_error("capture tap went back in time");
  last_time_ = r.time;

  CapturedPacket p{r.time, r.segment, r.src, r.dst, r.raw, r.verdict, {}};
  p.service = r.segment == net::SegmentId::ip ? bvll_service(r.raw) : npdu_service(r.raw);

  if (jsonl_.is_open()) {
    jsonl_ << jsonl_line(p) << '\n';
    if (!jsonl_) throw std::runtime_error("write failed on '" + config_.jsonl_path + "'");
  }
  ++jsonl_count_;

  if (r.segment == net::SegmentId::ip && r.src.is_ip()) {
    std::optional<bacnet::BipAddress> dst;
    if (r.dst) dst = r.dst->bip();
    const Bytes frame = synthesize_frame(r.src.bip(), dst, r.raw, static_cast<std::uint16_t>(pcap_count_ & 0xFFFF),
                                         config_.subnet_prefix);
    const std::int64_t unix_us = config_.epoch_unix_us + r.time.micros();
    if (pcap_.is_open()) pcap_.write(unix_us, frame);
    ++pcap_count_;
    auto d = parse_frame(frame);
    if (!d) throw std::logic_error("synthesized frame does not parse: " + d.error());
    flows_.add(*d, unix_us);
  }
  if (config_.keep_packets) packets_.push_back(std::move(p));
}

void Capture::finish() {
  pcap_.close();
  if (jsonl_.is_open()) {
    jsonl_.flush();
    const bool ok = static_cast<bool>(jsonl_);
    jsonl_.close();
    if (!ok) throw std::runtime_error("flush failed on '" + config_.jsonl_path + "'");
  }
}

}  // namespace bassim::capture
