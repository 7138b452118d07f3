#include "bassim/capture/pcap.hpp"

#include <sstream>
#include <stdexcept>

namespace bassim::capture {

namespace {

void put16be(Bytes& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v >> 8));
  b.push_back(static_cast<std::uint8_t>(v));
}

void put32le(std::ostream& o, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 24)};
  o.write(b, 4);
}

std::uint16_t get16be(ByteView b, std::size_t at) { return static_cast<std::uint16_t>(b[at] << 8 | b[at + 1]); }

std::uint32_t get32(ByteView b, std::size_t at, bool swap) {
  std::uint32_t v = static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
                    static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
  if (swap) v = (v >> 24) | ((v >> 8) & 0xFF00) | ((v << 8) & 0xFF0000) | (v << 24);
  return v;
}

}  // namespace

std::uint16_t ipv4_checksum(ByteView header) {
  std::uint32_t sum = 0;
  for (std::size_t i = 0; i + 1 < header.size(); i += 2) sum += static_cast<std::uint32_t>(header[i] << 8 | header[i + 1]);
  if (header.size() % 2) sum += static_cast<std::uint32_t>(header.back() << 8);
  while (sum >> 16) sum = (sum & 0xFFFF) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

std::array<std::uint8_t, 6> mac_for(const bacnet::BipAddress& addr) {
  return {0x02, 0x00, addr.ip[0], addr.ip[1], addr.ip[2], addr.ip[3]};
}

Bytes synthesize_frame(const bacnet::BipAddress& src, const std::optional<bacnet::BipAddress>& dst, ByteView bvll,
                       std::uint16_t ip_id, std::uint8_t prefix) {
  if (bvll.size() > 65535 - 28) throw std::length_error("BVLL payload too large for one UDP datagram");
  bacnet::BipAddress to;
  std::array<std::uint8_t, 6> dst_mac{0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF};
  if (dst) {
    to = *dst;
    dst_mac = mac_for(*dst);
  } else {
    const std::uint32_t ip = static_cast<std::uint32_t>(src.ip[0]) << 24 | static_cast<std::uint32_t>(src.ip[1]) << 16 |
                             static_cast<std::uint32_t>(src.ip[2]) << 8 | src.ip[3];
    const std::uint32_t host_mask = prefix >= 32 ? 0 : (0xFFFFFFFFu >> prefix);
    const std::uint32_t bcast = ip | host_mask;
    to.ip = {static_cast<std::uint8_t>(bcast >> 24), static_cast<std::uint8_t>(bcast >> 16),
             static_cast<std::uint8_t>(bcast >> 8), static_cast<std::uint8_t>(bcast)};
    to.port = src.port;
  }
  Bytes f;
  f.reserve(42 + bvll.size());
  f.insert(f.end(), dst_mac.begin(), dst_mac.end());
  const auto smac = mac_for(src);
  f.insert(f.end(), smac.begin(), smac.end());
  put16be(f, 0x0800);

  const std::size_t ip_at = f.size();
  const auto udp_len = static_cast<std::uint16_t>(8 + bvll.size());
  f.push_back(0x45);  // version 4, IHL 5
  f.push_back(0x00);
  put16be(f, static_cast<std::uint16_t>(20 + udp_len));
  put16be(f, ip_id);
  put16be(f, 0x4000);  // don't fragment
  f.push_back(64);     // TTL
  f.push_back(17);     // UDP
  put16be(f, 0);
  f.insert(f.end(), src.ip.begin(), src.ip.end());
  f.insert(f.end(), to.ip.begin(), to.ip.end());
  const std::uint16_t csum = ipv4_checksum(ByteView(f).subspan(ip_at, 20));
  f[ip_at + 10] = static_cast<std::uint8_t>(csum >> 8);
  f[ip_at + 11] = static_cast<std::uint8_t>(csum);

  put16be(f, src.port);
  put16be(f, to.port);
  put16be(f, udp_len);
  put16be(f, 0);  // checksum not computed
  f.insert(f.end(), bvll.begin(), bvll.end());
  return f;
}

Expected<UdpDatagram, std::string> parse_frame(ByteView f) {
  if (f.size() < 14) return Unexpected{std::string("frame shorter than an Ethernet header")};
  if (get16be(f, 12) != 0x0800) return Unexpected{std::string("not an IPv4 frame")};
  ByteView ip = f.subspan(14);
  if (ip.size() < 20 || (ip[0] >> 4) != 4) return Unexpected{std::string("bad IPv4 header")};
  const std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0F) * 4;
  if (ihl < 20 || ip.size() < ihl) return Unexpected{std::string("bad IPv4 header length")};
  if (ipv4_checksum(ip.subspan(0, ihl)) != 0) return Unexpected{std::string("IPv4 header checksum mismatch")};
  const std::size_t total = get16be(ip, 2);
  if (total < ihl + 8 || total > ip.size()) return Unexpected{std::string("IPv4 total length out of range")};
  if (ip[9] != 17) return Unexpected{std::string("not UDP")};
  ByteView udp = ip.subspan(ihl, total - ihl);
  const std::size_t ulen = get16be(udp, 4);
  if (ulen < 8 || ulen > udp.size()) return Unexpected{std::string("UDP length out of range")};
  UdpDatagram d;
  std::copy(ip.begin() + 12, ip.begin() + 16, d.src.ip.begin());
  std::copy(ip.begin() + 16, ip.begin() + 20, d.dst.ip.begin());
  d.src.port = get16be(udp, 0);
  d.dst.port = get16be(udp, 2);
  d.payload.assign(udp.begin() + 8, udp.begin() + static_cast<std::ptrdiff_t>(ulen));
  return d;
}

PcapWriter::PcapWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
  if (!out_) throw std::runtime_error("cannot open pcap output '" + path + "'");
  put32le(out_, kPcapMagic);
  const char version[4] = {2, 0, 4, 0};
  out_.write(version, 4);
  put32le(out_, 0);  // thiszone
  put32le(out_, 0);  // sigfigs
  put32le(out_, kPcapSnaplen);
  put32le(out_, kLinktypeEthernet);
}

void PcapWriter::write(std::int64_t unix_us, ByteView frame) {
  if (unix_us < 0) throw std::invalid_argument("pcap timestamp before 1970");
  put32le(out_, static_cast<std::uint32_t>(unix_us / 1000000));
  put32le(out_, static_cast<std::uint32_t>(unix_us % 1000000));
  put32le(out_, static_cast<std::uint32_t>(frame.size()));
  put32le(out_, static_cast<std::uint32_t>(frame.size()));
  out_.write(reinterpret_cast<const char*>(frame.data()), static_cast<std::streamsize>(frame.size()));
  if (!out_) throw std::runtime_error("write failed on '" + path_ + "'");
}

void PcapWriter::close() {
  if (!out_.is_open()) return;
  out_.flush();
  const bool ok = static_cast<bool>(out_);
  out_.close();
  if (!ok) throw std::runtime_error("flush failed on '" + path_ + "'");
}

Expected<std::vector<PcapPacket>, PcapError> read_pcap(ByteView file) {
  if (file.size() < 24) return Unexpected{PcapError{file.size(), "file shorter than the 24-byte pcap global header"}};
  bool swap = false;
  const std::uint32_t magic = get32(file, 0, false);
  if (magic == kPcapMagic) swap = false;
  else if (magic == 0xD4C3B2A1) swap = true;
  else return Unexpected{PcapError{0, "bad pcap magic (only microsecond classic pcap is supported)"}};
  const std::uint32_t linktype = get32(file, 20, swap);
  if (linktype != kLinktypeEthernet) return Unexpected{PcapError{20, "unsupported linktype " + std::to_string(linktype)}};
  std::vector<PcapPacket> out;
  std::size_t at = 24;
  while (at < file.size()) {
    if (file.size() - at < 16)
      return Unexpected{PcapError{at, "truncated record header (" + std::to_string(file.size() - at) + " bytes left)"}};
    const std::uint32_t sec = get32(file, at, swap);
    const std::uint32_t usec = get32(file, at + 4, swap);
    const std::uint32_t incl = get32(file, at + 8, swap);
    if (usec >= 1000000) return Unexpected{PcapError{at + 4, "ts_usec out of range"}};
    if (incl > kPcapSnaplen) return Unexpected{PcapError{at + 8, "incl_len exceeds snaplen"}};
    if (file.size() - at - 16 < incl)
      return Unexpected{PcapError{at + 16, "truncated packet data (need " + std::to_string(incl) + " bytes)"}};
    PcapPacket p;
    p.unix_us = static_cast<std::int64_t>(sec) * 1000000 + usec;
    p.data.assign(file.begin() + static_cast<std::ptrdiff_t>(at + 16),
                  file.begin() + static_cast<std::ptrdiff_t>(at + 16 + incl));
    out.push_back(std::move(p));
    at += 16 + incl;
  }
  return out;
}

Expected<std::vector<PcapPacket>, PcapError> read_pcap_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Unexpected{PcapError{0, "cannot open '" + path + "'"}};
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string s = buf.str();
  return read_pcap(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

}  // namespace bassim::capture
