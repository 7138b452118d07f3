#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "bassim/bacnet/codec.hpp"
#include "bassim/capture/capture.hpp"
#include "bassim/capture/flow_stats.hpp"
#include "bassim/capture/pcap.hpp"

using namespace bassim;
using namespace bassim::capture;
using bacnet::BipAddress;

namespace {

const BipAddress kServer{{10, 13, 254, 2}, bacnet::kBacnetIpPort};
const BipAddress kRouter{{10, 13, 254, 5}, bacnet::kBacnetIpPort};

// Independent ones-complement check: sums octet pairs with a 64-bit
// accumulator and folds once at the end. A valid header sums to 0xFFFF.
std::uint32_t ones_complement_sum(ByteView header) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < header.size(); ++i) acc += (i % 2 == 0) ? std::uint64_t{header[i]} * 256 : header[i];
  while (acc > 0xFFFF) acc = (acc >> 16) + (acc & 0xFFFF);
  return static_cast<std::uint32_t>(acc);
}

std::uint16_t be16(const Bytes& b, std::size_t at) { return static_cast<std::uint16_t>(b[at] << 8 | b[at + 1]); }

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("bassim-unit-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(f, line);) out.push_back(line);
  return out;
}

net::NodeAddr ip(const BipAddress& a) { return net::NodeAddr::ip(1, a); }

}  // namespace

TEST_CASE("who-is frame lengths") {
  const Bytes who_is = from_hex("81 0B 00 08 01 00 10 08");
  const Bytes frame = synthesize_frame(kServer, std::nullopt, who_is, 7);
  REQUIRE(frame.size() == 14 + 20 + 8 + 8);
  CHECK(be16(frame, 12) == 0x0800);
  CHECK(be16(frame, 14 + 2) == 36);      // IPv4 total length
  CHECK(be16(frame, 14 + 20 + 4) == 16);  // UDP length
  CHECK(be16(frame, 14 + 20) == 47808);
  CHECK(be16(frame, 14 + 20 + 2) == 47808);
  // Broadcast: all-ones MAC and the /24 directed broadcast address.
  for (int i = 0; i < 6; ++i) CHECK(frame[i] == 0xFF);
  CHECK(frame[14 + 16] == 10);
  CHECK(frame[14 + 19] == 255);
  auto back = parse_frame(frame);
  REQUIRE(back.has_value());
  CHECK(back->src == kServer);
  CHECK(back->payload == who_is);
  CHECK(bvll_service(back->payload) == "who-is");
}

TEST_CASE("ipv4 checksum agrees with an independent routine (property)") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 5000; ++i) {
    BipAddress a, b;
    for (auto& o : a.ip) o = static_cast<std::uint8_t>(rng());
    for (auto& o : b.ip) o = static_cast<std::uint8_t>(rng());
    Bytes payload(4 + rng() % 600);
    for (auto& x : payload) x = static_cast<std::uint8_t>(rng());
    const std::optional<BipAddress> dst = rng() % 5 ? std::optional<BipAddress>(b) : std::nullopt;
    const Bytes frame = synthesize_frame(a, dst, payload, static_cast<std::uint16_t>(rng()), static_cast<std::uint8_t>(8 + rng() % 23));
    const ByteView header(frame.data() + 14, 20);
    CHECK(ones_complement_sum(header) == 0xFFFF);
    Bytes zeroed(header.begin(), header.end());
    zeroed[10] = zeroed[11] = 0;
    CHECK(ipv4_checksum(zeroed) == be16(frame, 14 + 10));
    CHECK(parse_frame(frame).has_value());
  }
  // A corrupted header no longer verifies.
  Bytes frame = synthesize_frame(kServer, kRouter, from_hex("81 05 00 06 00 3C"), 1);
  frame[14 + 8] ^= 0x01;
  CHECK(ones_complement_sum(ByteView(frame.data() + 14, 20)) != 0xFFFF);
  CHECK_FALSE(parse_frame(frame).has_value());
}

TEST_CASE("mac derivation") {
  const auto mac = mac_for(kServer);
  CHECK(to_hex(mac) == "02 00 0A 0D FE 02");
}

TEST_CASE("pcap writer and reader round-trip, reader errors carry offsets") {
  const auto dir = temp_dir("pcap");
  const std::string path = (dir / "t.pcap").string();
  {
    PcapWriter w(path);
    w.write(1'690'848'000'000'001, synthesize_frame(kServer, kRouter, from_hex("81 05 00 06 00 3C"), 1));
    w.write(1'690'848'000'500'000, synthesize_frame(kRouter, kServer, from_hex("81 00 00 06 00 00"), 2));
    w.close();
  }
  auto packets = read_pcap_file(path);
  REQUIRE(packets.has_value());
  REQUIRE(packets->size() == 2);
  CHECK((*packets)[0].unix_us == 1'690'848'000'000'001);
  CHECK((*packets)[1].data.size() == 14 + 20 + 8 + 6);

  std::ifstream f(path, std::ios::binary);
  Bytes file((std::istreambuf_iterator<char>(f)), {});
  CHECK(be16(file, 0) == 0xD4C3);  // little-endian A1B2C3D4

  auto short_header = read_pcap(ByteView(file.data(), 10));
  REQUIRE_FALSE(short_header.has_value());
  CHECK(short_header.error().offset == 10);  // where the bytes ran out

  Bytes bad_magic = file;
  bad_magic[0] = 0;
  CHECK_FALSE(read_pcap(bad_magic).has_value());

  auto truncated = read_pcap(ByteView(file.data(), file.size() - 3));
  REQUIRE_FALSE(truncated.has_value());
  CHECK(truncated.error().offset == 24 + 16 + 48 + 16);  // second record's data
  CHECK(truncated.error().message.find("truncated") != std::string::npos);

  auto header_only = read_pcap(ByteView(file.data(), 24));
  REQUIRE(header_only.has_value());
  CHECK(header_only->empty());
  auto empty_summary = summarize_pcap(*header_only);
  REQUIRE(empty_summary.has_value());
  CHECK(empty_summary->to_json().dump() == "{}");
  std::filesystem::remove_all(dir);
}

TEST_CASE("flow statistics arithmetic") {
  FlowStats stats;
  Bytes payload = *bacnet::encode_frame(bacnet::OriginalUnicastNpdu{bacnet::NpduMessage{
      bacnet::Npdu{true, 0, bacnet::NetAddress{2001, {21}}, {}, 255},
      *bacnet::build_write_property(bacnet::ObjectId(bacnet::ObjectType::analog_value, 1),
                                    bacnet::PropertyId::present_value, bacnet::CharString{std::string(33, 'x')},
                                    std::nullopt, 1)}});
  REQUIRE(payload.size() == 60);
  const std::int64_t t0 = 1'690'884'000'000'000;
  for (int i = 0; i < 10; ++i) stats.add(UdpDatagram{kServer, kRouter, payload}, t0 + i * 6'000'000LL);
  const Flow& f = stats.flows().begin()->second;
  CHECK(f.packets == 10);
  CHECK(f.bytes == 600);
  CHECK(f.rate_pps() == doctest::Approx(1.0 / 6.0));
  CHECK(std::abs(f.rate_pps() - 0.167) < 0.0005);
  CHECK(f.services.at("write-property") == 10);
  const auto j = stats.to_json();
  REQUIRE(j.contains("10.13.254.2:47808 -> 10.13.254.5:47808"));
  CHECK(j["10.13.254.2:47808 -> 10.13.254.5:47808"]["packets"] == 10);
  CHECK(FlowStats{}.to_json().dump() == "{}");
  CHECK(bvll_service(from_hex("81 0B 00 09 01")) == "malformed");
}

TEST_CASE("capture writes jsonl for both segments and pcap for ip only") {
  const auto dir = temp_dir("cap");
  CaptureConfig cfg;
  cfg.epoch_unix_us = 1'690'848'000'000'000;
  cfg.pcap_path = (dir / "traffic.pcap").string();
  cfg.jsonl_path = (dir / "traffic.jsonl").string();
  cfg.keep_packets = true;
  Capture cap(cfg);

  const Bytes reinit = *bacnet::encode_frame(bacnet::OriginalUnicastNpdu{bacnet::NpduMessage{
      bacnet::Npdu{true, 0, bacnet::NetAddress{2001, {21}}, {}, 255},
      bacnet::build_reinitialize(bacnet::ReinitState::warmstart, std::nullopt, 1)}});
  const BipAddress attacker{{192, 168, 1, 66}, bacnet::kBacnetIpPort};
  cap.on_record(net::WireRecord{SimTime::from_whole_seconds(36000), net::SegmentId::ip, ip(attacker), ip(kRouter), reinit,
                                net::Verdict::delivered});
  cap.on_record(net::WireRecord{SimTime::from_micros(36'000'000'250LL), net::SegmentId::ip, ip(kServer),
                                ip(BipAddress{{10, 13, 254, 77}, bacnet::kBacnetIpPort}), reinit, net::Verdict::dropped});
  cap.on_record(net::WireRecord{SimTime::from_whole_seconds(36001), net::SegmentId::ip, ip(attacker), ip(kRouter),
                                Bytes{0x81, 0x0A, 0xFF}, net::Verdict::delivered});
  cap.on_record(net::WireRecord{SimTime::from_whole_seconds(36002), net::SegmentId::field, net::NodeAddr::station(2001, 254),
                                net::NodeAddr::station(2001, 21), Bytes{0x01, 0x00, 0x10, 0x08}, net::Verdict::delivered});
  CHECK_THROWS_AS(cap.on_record(net::WireRecord{SimTime::from_whole_seconds(1), net::SegmentId::ip, ip(kServer), std::nullopt,
                                                reinit, net::Verdict::delivered}),
                  std::logic_error);
  cap.finish();

  const auto lines = lines_of(dir / "traffic.jsonl");
  REQUIRE(lines.size() == 4);
  auto j0 = nlohmann::json::parse(lines[0]);
  CHECK(j0["v"] == 1);
  CHECK(j0["service"] == "reinitialize-device");
  CHECK(j0["verdict"] == "delivered");
  CHECK(j0["src"] == "192.168.1.66:47808");
  CHECK(j0["len"] == reinit.size());
  CHECK(lines[1].find("\"verdict\":\"dropped\"") != std::string::npos);
  CHECK(lines[1].find("\"t\":36000.00025") != std::string::npos);
  CHECK(nlohmann::json::parse(lines[2])["service"] == "malformed");
  auto j3 = nlohmann::json::parse(lines[3]);
  CHECK(j3["segment"] == "field");
  CHECK(j3["service"] == "who-is");

  CHECK(cap.jsonl_count() == 4);
  CHECK(cap.pcap_count() == 3);
  auto pcap = read_pcap_file(cfg.pcap_path);
  REQUIRE(pcap.has_value());
  REQUIRE(pcap->size() == 3);
  CHECK((*pcap)[0].unix_us == cfg.epoch_unix_us + 36'000'000'000LL);
  // The in-run flow table equals a re-summarized pcap.
  CHECK(summarize_pcap(*pcap)->dump() == cap.flows().dump());
  std::filesystem::remove_all(dir);
}
