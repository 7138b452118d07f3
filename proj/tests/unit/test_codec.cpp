#include "doctest.h"

#include <bit>
#include <cstring>

#include "../support/frame_gen.hpp"
#include "bassim/bacnet/codec.hpp"

using namespace bassim;
using namespace bassim::bacnet;

namespace {

std::string hex_of(const EncodeResult<Bytes>& r) {
  REQUIRE(r.has_value());
  return to_hex(*r);
}

// Independent IEEE-754 single-precision encoding: sign, biased exponent and
// mantissa assembled by hand, for normal numbers only.
std::uint32_t ieee_bits(double v) {
  std::uint32_t sign = v < 0 ? 1u : 0u;
  double m = sign ? -v : v;
  int exp = 0;
  while (m >= 2.0) {
    m /= 2.0;
    ++exp;
  }
  while (m < 1.0) {
    m *= 2.0;
    --exp;
  }
  const auto mantissa = static_cast<std::uint32_t>((m - 1.0) * 8388608.0 + 0.5);
  return (sign << 31) | (static_cast<std::uint32_t>(exp + 127) << 23) | mantissa;
}

std::string hex32(std::uint32_t v) {
  Bytes b{static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8),
          static_cast<std::uint8_t>(v)};
  return to_hex(b);
}

}  // namespace

TEST_CASE("who-is local broadcast frame") {
  CHECK(hex_of(encode_frame(OriginalBroadcastNpdu{NpduMessage{Npdu{}, build_who_is()}})) == "81 0B 00 08 01 00 10 08");
  auto decoded = decode_frame(from_hex("81 0B 00 08 01 00 10 08"));
  REQUIRE(decoded.has_value());
  const auto* bc = std::get_if<OriginalBroadcastNpdu>(&*decoded);
  REQUIRE(bc);
  CHECK_FALSE(bc->message.npdu.destination.has_value());
  CHECK(service_label(*decoded) == "who-is");
}

TEST_CASE("register-foreign-device ttl 60") {
  CHECK(hex_of(encode_frame(RegisterForeignDevice{60})) == "81 05 00 06 00 3C");
}

TEST_CASE("read-property analog-value 1 present-value") {
  const ObjectId av1(ObjectType::analog_value, 1);
  CHECK(hex_of(encode_apdu(build_read_property(av1, PropertyId::present_value, 1))) ==
        "00 05 01 0C 0C 00 80 00 01 19 55");
}

TEST_CASE("object identifier packing") {
  // (type << 22) | instance, computed here with plain multiplication.
  CHECK(ObjectId(ObjectType::analog_value, 1).encode() == 2u * 4194304u + 1u);
  CHECK(to_hex(ObjectId(ObjectType::analog_value, 1).to_bytes()) == "00 80 00 01");
  CHECK(ObjectId(ObjectType::device, 1201).encode() == 8u * 4194304u + 1201u);
  CHECK(to_hex(ObjectId(ObjectType::device, 1201).to_bytes()) == "02 00 04 B1");
  CHECK_THROWS_AS(ObjectId(ObjectType::device, kMaxInstance + 1), std::out_of_range);
  CHECK_FALSE(ObjectId::decode(3u << 22).has_value());  // binary-input is outside the supported set
  CHECK(ObjectId::parse("analog-value:1") == ObjectId(ObjectType::analog_value, 1));
  CHECK(ObjectId(ObjectType::binary_output, 7).to_string() == "binary-output:7");
}

TEST_CASE("object identifier packing is a bijection on the supported set") {
  testing::FrameGen gen(7);
  for (int i = 0; i < 20000; ++i) {
    const ObjectId id = gen.object_id();
    const auto back = ObjectId::decode(id.encode());
    REQUIRE(back.has_value());
    CHECK(*back == id);
    CHECK(ObjectId::parse(id.to_string()) == id);
  }
}

TEST_CASE("write-property Real 35.0 without priority") {
  const ObjectId av1(ObjectType::analog_value, 1);
  auto apdu = build_write_property(av1, PropertyId::present_value, Real{35.0f}, std::nullopt, 3);
  REQUIRE(apdu.has_value());
  CHECK(hex_of(encode_apdu(*apdu)) == "00 05 03 0F 0C 00 80 00 01 19 55 3E 44 42 0C 00 00 3F");
  CHECK(hex32(ieee_bits(35.0)) == "42 0C 00 00");
}

TEST_CASE("Real application tag bytes") {
  const ObjectId av1(ObjectType::analog_value, 1);
  auto apdu = build_write_property(av1, PropertyId::present_value, Real{22.5f}, std::nullopt, 3);
  REQUIRE(apdu.has_value());
  const std::string hex = hex_of(encode_apdu(*apdu));
  CHECK(hex.find("44 41 B4 00 00") != std::string::npos);
  CHECK(hex32(ieee_bits(22.5)) == "41 B4 00 00");
  // Reference encoder agrees with the compiler's float layout across a sweep.
  for (int i = -4000; i <= 4000; i += 7) {
    if (i == 0) continue;
    const double v = i / 16.0;
    CHECK(ieee_bits(v) == std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
}

TEST_CASE("write-property priority range") {
  const ObjectId av1(ObjectType::analog_value, 1);
  auto zero = build_write_property(av1, PropertyId::present_value, Real{1.0f}, std::uint8_t{0}, 1);
  REQUIRE_FALSE(zero.has_value());
  CHECK(zero.error() == EncodeError::invalid_priority);
  CHECK_FALSE(build_write_property(av1, PropertyId::present_value, Real{1.0f}, std::uint8_t{17}, 1).has_value());
  CHECK(build_write_property(av1, PropertyId::present_value, Real{1.0f}, std::uint8_t{1}, 1).has_value());
  CHECK(build_write_property(av1, PropertyId::present_value, Real{1.0f}, std::uint8_t{16}, 1).has_value());
}

TEST_CASE("reinitialize-device and its acknowledgement") {
  CHECK(hex_of(encode_apdu(build_reinitialize(ReinitState::warmstart, std::nullopt, 2))) == "00 05 02 14 09 01");
  CHECK(hex_of(encode_apdu(build_simple_ack(2, ConfirmedService::reinitialize_device))) == "20 02 14");
  const std::string cold = hex_of(encode_apdu(build_reinitialize(ReinitState::coldstart, std::nullopt, 2)));
  CHECK(cold.substr(cold.size() - 5) == "09 00");
}

TEST_CASE("decode errors are typed") {
  auto empty = decode_frame(ByteView{});
  REQUIRE_FALSE(empty.has_value());
  CHECK(empty.error() == DecodeError::truncated_frame);

  auto truncated_apdu = decode_frame(from_hex("81 0B 00 07 01 00 10"));
  REQUIRE_FALSE(truncated_apdu.has_value());
  CHECK(truncated_apdu.error() == DecodeError::malformed_apdu);

  CHECK(decode_frame(from_hex("82 0B 00 08 01 00 10 08")).error() == DecodeError::bad_bvll_type);
  CHECK(decode_frame(from_hex("81 0B 00 09 01 00 10 08")).error() == DecodeError::length_mismatch);
  CHECK(decode_frame(from_hex("81 0C 00 08 01 00 10 08")).error() == DecodeError::unknown_bvll_function);
  CHECK(decode_frame(from_hex("81 0B 00 08 02 00 10 08")).error() == DecodeError::bad_npdu_version);
  CHECK(decode_frame(from_hex("81 0B 00 08 01 80 00 00")).error() == DecodeError::unsupported_network_message);
  CHECK(decode_frame(from_hex("81 0A 00 07 01 00 C0")).error() == DecodeError::unknown_pdu_type);
  // Segmented confirmed request.
  CHECK(decode_apdu(from_hex("08 05 01 0C 0C 00 80 00 01 19 55")).error() == DecodeError::segmentation_unsupported);
  // Object type 3 (binary-input) is not modelled.
  CHECK(decode_apdu(from_hex("00 05 01 0C 0C 00 C0 00 01 19 55")).error() == DecodeError::unsupported_object_type);
}

TEST_CASE("apdu examples decode to their requests") {
  auto rp = decode_apdu(from_hex("00 05 01 0C 0C 00 80 00 01 19 55"));
  REQUIRE(rp.has_value());
  const auto& req = std::get<ConfirmedRequest>(*rp);
  CHECK(req.invoke_id == 1);
  const auto& body = std::get<ReadPropertyRequest>(req.body);
  CHECK(body.object == ObjectId(ObjectType::analog_value, 1));
  CHECK(body.property == PropertyId::present_value);

  auto ack = decode_apdu(from_hex("20 02 14"));
  REQUIRE(ack.has_value());
  CHECK(std::get<SimpleAck>(*ack) == SimpleAck{2, 20});
  CHECK(service_label(*ack) == "simple-ack");

  auto reinit = decode_apdu(from_hex("00 05 02 14 09 01"));
  REQUIRE(reinit.has_value());
  CHECK(service_label(*reinit) == "reinitialize-device");
  CHECK(std::get<ReinitializeDeviceRequest>(std::get<ConfirmedRequest>(*reinit).body).state == ReinitState::warmstart);
}

TEST_CASE("hop count only matters when a destination is present") {
  Npdu a, b;
  a.hop_count = 3;
  b.hop_count = 200;
  CHECK(a == b);
  a.destination = NetAddress{2001, {7}};
  b.destination = NetAddress{2001, {7}};
  CHECK_FALSE(a == b);
}

TEST_CASE("generated frames round-trip") {
  testing::FrameGen gen(20240801);
  int encoded = 0;
  for (int i = 0; i < 10000; ++i) {
    const BvllFrame f = gen.frame();
    auto bytes = encode_frame(f);
    REQUIRE(bytes.has_value());
    ++encoded;
    auto back = decode_frame(*bytes);
    REQUIRE_MESSAGE(back.has_value(), to_hex(*bytes));
    CHECK_MESSAGE(*back == f, to_hex(*bytes));
    // BVLL length is recomputed from the content.
    CHECK(((*bytes)[2] << 8 | (*bytes)[3]) == static_cast<int>(bytes->size()));
  }
  CHECK(encoded == 10000);
}

TEST_CASE("decode_frame is total and canonical on mutated input") {
  testing::FrameGen gen(99);
  int accepted = 0;
  for (int i = 0; i < 20000; ++i) {
    const Bytes input = (i % 2) ? gen.mutated_frame() : gen.bytes(40);
    auto decoded = decode_frame(input);
    if (!decoded) {
      CHECK_FALSE(to_string(decoded.error()).empty());
      continue;
    }
    ++accepted;
    // Whatever decodes re-encodes to a fixed point.
    auto once = encode_frame(*decoded);
    if (!once) continue;
    auto again = decode_frame(*once);
    REQUIRE(again.has_value());
    auto twice = encode_frame(*again);
    REQUIRE(twice.has_value());
    CHECK(*once == *twice);
  }
  CHECK(accepted > 0);
}

TEST_CASE("service labels") {
  CHECK(service_label(BvllFrame{RegisterForeignDevice{60}}) == "register-foreign-device");
  CHECK(service_label(build_i_am(ObjectId(ObjectType::device, 1201))) == "i-am");
  CHECK(service_label(build_read_property(ObjectId(ObjectType::analog_value, 1), PropertyId::present_value, 1)) ==
        "read-property");
}
