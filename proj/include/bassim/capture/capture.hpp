#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "bassim/capture/flow_stats.hpp"
#include "bassim/capture/pcap.hpp"
#include "bassim/net/fabric.hpp"

namespace bassim::capture {

struct CapturedPacket {
  SimTime sim_time;
  net::SegmentId segment = net::SegmentId::ip;
  net::NodeAddr src;
  std::optional<net::NodeAddr> dst;
  Bytes raw;
  net::Verdict verdict = net::Verdict::delivered;
  std::string service;

  std::size_t length() const { return raw.size(); }
};

// {"v":1,"t":...,"segment":...,"src":...,"dst":...,"len":...,"service":...,"verdict":...}
std::string jsonl_line(const CapturedPacket& packet);

struct CaptureConfig {
  std::int64_t epoch_unix_us = 0;  // scenario date 00:00 UTC
  std::uint8_t subnet_prefix = 24;
  std::string pcap_path;   // empty: no pcap file
  std::string jsonl_path;  // empty: no JSONL file
  bool keep_packets = false;
};

// Tap sink. Writes incrementally on the simulation thread; finish() flushes
// and must be called before the run reports success.
class Capture {
 public:
  explicit Capture(CaptureConfig config);
  Capture(const Capture&) = delete;
  Capture& operator=(const Capture&) = delete;

  void on_record(const net::WireRecord& record);
  net::Fabric::Tap tap() {
    return [this](const net::WireRecord& r) { on_record(r); };
  }
  void finish();

  const FlowStats& flows() const { return flows_; }
  const std::vector<CapturedPacket>& packets() const { return packets_; }
  std::uint64_t jsonl_count() const { return jsonl_count_; }
  std::uint64_t pcap_count() const { return pcap_count_; }

 private:
  CaptureConfig config_;
  PcapWriter pcap_;
  std::ofstream jsonl_;
  FlowStats flows_;
  std::vector<CapturedPacket> packets_;
  std::uint64_t jsonl_count_ = 0;
  std::uint64_t pcap_count_ = 0;
  std::optional<SimTime> last_time_;
};

}  // namespace bassim::capture
