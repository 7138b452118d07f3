#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "bassim/bacnet/types.hpp"
#include "bassim/util/bytes.hpp"
#include "bassim/util/expected.hpp"

namespace bassim::capture {

inline constexpr std::uint32_t kPcapMagic = 0xA1B2C3D4;
inline constexpr std::uint32_t kPcapSnaplen = 65535;
inline constexpr std::uint32_t kLinktypeEthernet = 1;

// Ones-complement sum over a header with its checksum field zeroed.
std::uint16_t ipv4_checksum(ByteView header);

// Locally administered MAC derived from the IPv4 address: 02:00:a.b.c.d.
std::array<std::uint8_t, 6> mac_for(const bacnet::BipAddress& addr);

// Ethernet II + IPv4 + UDP around a BVLL frame. dst nullopt: link and subnet
// broadcast of the sender's /prefix.
Bytes synthesize_frame(const bacnet::BipAddress& src, const std::optional<bacnet::BipAddress>& dst, ByteView bvll,
                       std::uint16_t ip_id, std::uint8_t prefix = 24);

struct UdpDatagram {
  bacnet::BipAddress src;
  bacnet::BipAddress dst;
  Bytes payload;
};
// Inverse of synthesize_frame; checks header checksum and lengths.
Expected<UdpDatagram, std::string> parse_frame(ByteView frame);

class PcapWriter {
 public:
  PcapWriter() = default;
  explicit PcapWriter(const std::string& path);
  bool is_open() const { return out_.is_open(); }
  void write(std::int64_t unix_us, ByteView frame);
  void close();

 private:
  std::ofstream out_;
  std::string path_;
};

struct PcapPacket {
  std::int64_t unix_us = 0;
  Bytes data;
};

struct PcapError {
  std::size_t offset = 0;
  std::string message;
};

Expected<std::vector<PcapPacket>, PcapError> read_pcap(ByteView file);
Expected<std::vector<PcapPacket>, PcapError> read_pcap_file(const std::string& path);

}  // namespace bassim::capture
