#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bassim/capture/pcap.hpp"
#include "json.hpp"

namespace bassim::capture {

struct Flow {
  std::string src;  // "ip:port"
  std::string dst;
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;  // BVLL bytes (UDP payload)
  std::int64_t first_us = 0;  // unix µs
  std::int64_t last_us = 0;
  std::map<std::string, std::uint64_t> services;
  std::map<std::int64_t, std::uint64_t> per_minute;  // unix minute -> packets

  // (packets - 1) / (last - first); 0 with fewer than two packets or no span.
  double rate_pps() const;
};

// Per (src, dst) UDP endpoint pair aggregation of IP-segment traffic. Fed
// either from the live tap or from a re-parsed pcap; both paths see the same
// synthesized datagrams so the JSON matches byte for byte.
class FlowStats {
 public:
  void add(const UdpDatagram& datagram, std::int64_t unix_us);
  const std::map<std::pair<std::string, std::string>, Flow>& flows() const { return flows_; }
  std::uint64_t total_packets() const;
  std::uint64_t total_bytes() const;

  // Object keyed "src -> dst"; an empty capture gives {}.
  nlohmann::ordered_json to_json() const;
  std::string dump() const;

 private:
  std::map<std::pair<std::string, std::string>, Flow> flows_;
};

// Best-effort service label of a BVLL payload; "malformed" when undecodable.
std::string bvll_service(ByteView bvll);
// Same for a bare NPDU (field-segment payload).
std::string npdu_service(ByteView npdu);

Expected<FlowStats, PcapError> summarize_pcap(const std::vector<PcapPacket>& packets);

}  // namespace bassim::capture
