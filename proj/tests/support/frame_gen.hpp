#pragma once

// Random valid BACnet values for round-trip and fuzz tests.

#include <array>
#include <cstring>
#include <random>
#include <string>

#include "bassim/bacnet/codec.hpp"

namespace bassim::testing {

class FrameGen {
 public:
  explicit FrameGen(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  std::uint32_t u32() { return static_cast<std::uint32_t>(rng_()); }
  std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(rng_() % n); }
  bool coin() { return rng_() & 1; }
  std::uint8_t byte() { return static_cast<std::uint8_t>(rng_()); }

  // Unsigned values biased toward encoding-length boundaries.
  std::uint32_t varied_u32() {
    static constexpr std::uint32_t edges[] = {0, 1, 0xFF, 0x100, 0xFFFF, 0x10000, 0xFFFFFF, 0x1000000, 0xFFFFFFFF};
    switch (below(3)) {
      case 0:
        return edges[below(9)];
      case 1:
        return below(256);
      default:
        return u32() >> below(32);
    }
  }

  Bytes bytes(std::size_t max_len) {
    Bytes b(below(static_cast<std::uint32_t>(max_len) + 1));
    for (auto& x : b) x = byte();
    return b;
  }

  bacnet::ObjectId object_id() {
    static constexpr bacnet::ObjectType types[] = {
        bacnet::ObjectType::analog_input, bacnet::ObjectType::analog_output, bacnet::ObjectType::analog_value,
        bacnet::ObjectType::binary_output, bacnet::ObjectType::binary_value, bacnet::ObjectType::device};
    return bacnet::ObjectId(types[below(6)], coin() ? below(64) : below(bacnet::kMaxInstance + 1));
  }

  float real() {
    float f;
    do {
      std::uint32_t bits = u32();
      std::memcpy(&f, &bits, 4);
    } while (f != f);  // NaN never compares equal
    return coin() ? f : static_cast<float>(static_cast<int>(below(2000)) - 1000) / 8.0f;
  }

  std::string text(std::size_t max_len) {
    std::string s(below(static_cast<std::uint32_t>(max_len) + 1), ' ');
    for (auto& c : s) c = static_cast<char>(coin() ? 'a' + below(26) : byte());
    return s;
  }

  bacnet::AppValue app_value() {
    using namespace bacnet;
    switch (below(9)) {
      case 0:
        return Null{};
      case 1:
        return Boolean{coin()};
      case 2:
        return Unsigned{varied_u32()};
      case 3:
        return Signed{static_cast<std::int32_t>(varied_u32())};
      case 4:
        return Real{real()};
      case 5:
        return Enumerated{varied_u32()};
      case 6:
        return CharString{text(40)};
      case 7: {
        BitString b;
        b.bits = bytes(4);
        if (b.bits.empty()) b.bits.push_back(byte());
        b.unused_bits = static_cast<std::uint8_t>(below(8));
        return b;
      }
      default:
        return object_id();
    }
  }

  bacnet::PropertyId property() {
    static constexpr std::uint32_t common[] = {75, 77, 85, 87, 104, 111, 117};
    return static_cast<bacnet::PropertyId>(coin() ? common[below(7)] : below(4194304));
  }

  std::optional<std::uint32_t> array_index() {
    if (below(4)) return std::nullopt;
    return varied_u32();
  }

  bacnet::Apdu apdu() {
    using namespace bacnet;
    switch (below(10)) {
      case 0:
        return ConfirmedRequest{byte(), static_cast<std::uint8_t>(below(6)),
                                ReadPropertyRequest{object_id(), property(), array_index()}};
      case 1: {
        std::optional<std::uint8_t> prio;
        if (coin()) prio = static_cast<std::uint8_t>(1 + below(16));
        return ConfirmedRequest{byte(), kMaxApduCode,
                                WritePropertyRequest{object_id(), property(), array_index(), app_value(), prio}};
      }
      case 2: {
        std::optional<std::string> pw;
        if (coin()) pw = text(20);
        return ConfirmedRequest{byte(), kMaxApduCode,
                                ReinitializeDeviceRequest{coin() ? ReinitState::coldstart : ReinitState::warmstart, pw}};
      }
      case 3: {
        WhoIs w;
        if (coin()) {
          w.low_limit = below(kMaxInstance + 1);
          w.high_limit = below(kMaxInstance + 1);
        }
        return UnconfirmedRequest{w};
      }
      case 4:
        return UnconfirmedRequest{IAm{ObjectId(ObjectType::device, below(kMaxInstance + 1)), varied_u32(), below(4),
                                      varied_u32()}};
      case 5:
        return SimpleAck{byte(), byte()};
      case 6:
        return ComplexAck{byte(), 12, ReadPropertyAck{object_id(), property(), array_index(), app_value()}};
      case 7:
        return ErrorPdu{byte(), byte(), varied_u32(), varied_u32()};
      case 8:
        return RejectPdu{byte(), byte()};
      default: {
        // Service choices outside the decoded subset keep their body verbatim.
        std::uint8_t service;
        do service = byte();
        while (service == 12 || service == 15 || service == 20);
        return ConfirmedRequest{byte(), kMaxApduCode, UnsupportedService{service, bytes(30)}};
      }
    }
  }

  bacnet::NetAddress net_address(bool allow_broadcast) {
    bacnet::NetAddress a;
    a.network = static_cast<std::uint16_t>(1 + below(0xFFFE));
    const std::size_t len = allow_broadcast ? below(7) : 1 + below(6);
    for (std::size_t i = 0; i < len; ++i) a.mac.push_back(byte());
    return a;
  }

  bacnet::NpduMessage npdu_message() {
    bacnet::Npdu n;
    n.expects_reply = coin();
    n.priority = static_cast<std::uint8_t>(below(4));
    if (coin()) {
      n.destination = net_address(true);
      n.hop_count = byte();
    }
    if (coin()) n.source = net_address(false);
    return bacnet::NpduMessage{n, apdu()};
  }

  bacnet::BipAddress bip() {
    bacnet::BipAddress a;
    for (auto& o : a.ip) o = byte();
    a.port = coin() ? bacnet::kBacnetIpPort : static_cast<std::uint16_t>(u32());
    return a;
  }

  bacnet::BvllFrame frame() {
    using namespace bacnet;
    switch (below(6)) {
      case 0:
        return BvllResult{static_cast<std::uint16_t>(u32())};
      case 1:
        return RegisterForeignDevice{static_cast<std::uint16_t>(u32())};
      case 2:
        return ForwardedNpdu{bip(), npdu_message()};
      case 3:
        return DistributeBroadcastToNetwork{npdu_message()};
      case 4:
        return OriginalUnicastNpdu{npdu_message()};
      default:
        return OriginalBroadcastNpdu{npdu_message()};
    }
  }

  // A valid frame with a few bytes flipped, truncated or extended.
  Bytes mutated_frame() {
    auto enc = bacnet::encode_frame(frame());
    Bytes b = enc ? std::move(*enc) : Bytes{};
    switch (below(4)) {
      case 0:
        if (!b.empty()) b.resize(below(static_cast<std::uint32_t>(b.size())));
        break;
      case 1:
        for (std::uint32_t i = 0, n = 1 + below(4); i < n && !b.empty(); ++i) b[below(static_cast<std::uint32_t>(b.size()))] = byte();
        break;
      case 2: {
        Bytes extra = bytes(8);
        b.insert(b.end(), extra.begin(), extra.end());
        if (b.size() >= 4 && coin()) {
          b[2] = static_cast<std::uint8_t>(b.size() >> 8);
          b[3] = static_cast<std::uint8_t>(b.size());
        }
        break;
      }
      default:
        // Random bytes behind a plausible BVLL header.
        b = bytes(64);
        if (b.size() >= 4) {
          b[0] = 0x81;
          b[1] = static_cast<std::uint8_t>(std::array<int, 6>{0, 4, 5, 9, 10, 11}[below(6)]);
          b[2] = static_cast<std::uint8_t>(b.size() >> 8);
          b[3] = static_cast<std::uint8_t>(b.size());
        }
    }
    return b;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace bassim::testing
