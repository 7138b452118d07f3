#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "bassim/util/bytes.hpp"

namespace bassim::bacnet {

inline constexpr std::uint16_t kBacnetIpPort = 47808;
inline constexpr std::size_t kMaxApduLength = 1476;
inline constexpr std::uint8_t kMaxApduCode = 0x05;  // 1476 octets, no segmentation
inline constexpr std::uint16_t kGlobalBroadcastNet = 0xFFFF;

enum class ObjectType : std::uint16_t {
  analog_input = 0,
  analog_output = 1,
  analog_value = 2,
  binary_output = 4,
  binary_value = 5,
  device = 8,
};

bool is_supported_object_type(std::uint32_t raw);
std::string_view to_string(ObjectType type);
std::optional<ObjectType> object_type_from_string(std::string_view name);

inline constexpr std::uint32_t kMaxInstance = (1u << 22) - 1;

// BACnet object identifier; packs to 32 bits as (type << 22) | instance.
class ObjectId {
 public:
  ObjectId() = default;
  // Throws std::out_of_range when instance >= 2^22.
  ObjectId(ObjectType type, std::uint32_t instance);

  ObjectType type() const { return type_; }
  std::uint32_t instance() const { return instance_; }

  std::uint32_t encode() const { return (static_cast<std::uint32_t>(type_) << 22) | instance_; }
  std::array<std::uint8_t, 4> to_bytes() const;
  // nullopt for object types outside the supported set.
  static std::optional<ObjectId> decode(std::uint32_t raw);

  // "analog-value:1"
  std::string to_string() const;
  static std::optional<ObjectId> parse(std::string_view text);

  auto operator<=>(const ObjectId&) const = default;

 private:
  ObjectType type_ = ObjectType::device;
  std::uint32_t instance_ = 0;
};

enum class PropertyId : std::uint32_t {
  object_identifier = 75,
  object_name = 77,
  present_value = 85,
  priority_array = 87,
  relinquish_default = 104,
  status_flags = 111,
  units = 117,
};

// Engineering units used by the testbed points.
enum class Units : std::uint32_t {
  kilograms_per_second = 42,
  kilowatts = 48,
  degrees_celsius = 62,
  no_units = 95,
  percent = 98,
};

struct Null {
  bool operator==(const Null&) const = default;
};
struct Boolean {
  bool value = false;
  bool operator==(const Boolean&) const = default;
};
struct Unsigned {
  std::uint32_t value = 0;
  bool operator==(const Unsigned&) const = default;
};
struct Signed {
  std::int32_t value = 0;
  bool operator==(const Signed&) const = default;
};
struct Real {
  float value = 0.0f;
  bool operator==(const Real&) const = default;
};
struct Enumerated {
  std::uint32_t value = 0;
  bool operator==(const Enumerated&) const = default;
};
struct CharString {
  std::string value;
  bool operator==(const CharString&) const = default;
};
struct BitString {
  std::uint8_t unused_bits = 0;
  Bytes bits;
  bool operator==(const BitString&) const = default;
};

using AppValue = std::variant<Null, Boolean, Unsigned, Signed, Real, Enumerated, CharString, BitString, ObjectId>;

std::string_view value_kind(const AppValue& value);

// BACnet/IP link address (B/IP): IPv4 address + UDP port, 6 octets on the wire.
struct BipAddress {
  std::array<std::uint8_t, 4> ip{};
  std::uint16_t port = kBacnetIpPort;

  Bytes to_bytes() const;
  static std::optional<BipAddress> from_bytes(ByteView six);
  std::string to_string() const;  // "10.13.254.2:47808"
  static std::optional<BipAddress> parse(std::string_view text);
  auto operator<=>(const BipAddress&) const = default;
};

// ---------------------------------------------------------------- APDU ----

enum class PduType : std::uint8_t {
  confirmed_request = 0,
  unconfirmed_request = 1,
  simple_ack = 2,
  complex_ack = 3,
  segment_ack = 4,
  error = 5,
  reject = 6,
  abort = 7,
};

enum class ConfirmedService : std::uint8_t {
  read_property = 12,
  write_property = 15,
  reinitialize_device = 20,
};

enum class UnconfirmedService : std::uint8_t {
  i_am = 0,
  who_is = 8,
};

enum class ReinitState : std::uint32_t {
  coldstart = 0,
  warmstart = 1,
};

enum class ErrorClass : std::uint32_t {
  device = 0,
  object = 1,
  property = 2,
  services = 5,
};

enum class ErrorCode : std::uint32_t {
  other = 0,
  invalid_data_type = 9,
  unknown_object = 31,
  unknown_property = 32,
  value_out_of_range = 37,
  write_access_denied = 40,
};

enum class RejectReason : std::uint8_t {
  other = 0,
  invalid_tag = 4,
  missing_required_parameter = 5,
  unrecognized_service = 9,
};

struct ReadPropertyRequest {
  ObjectId object;
  PropertyId property = PropertyId::present_value;
  std::optional<std::uint32_t> array_index;
  bool operator==(const ReadPropertyRequest&) const = default;
};

struct WritePropertyRequest {
  ObjectId object;
  PropertyId property = PropertyId::present_value;
  std::optional<std::uint32_t> array_index;
  AppValue value;
  std::optional<std::uint8_t> priority;
  bool operator==(const WritePropertyRequest&) const = default;
};

struct ReinitializeDeviceRequest {
  ReinitState state = ReinitState::warmstart;
  std::optional<std::string> password;
  bool operator==(const ReinitializeDeviceRequest&) const = default;
};

// A service choice outside the implemented subset; body kept verbatim.
struct UnsupportedService {
  std::uint8_t service = 0;
  Bytes body;
  bool operator==(const UnsupportedService&) const = default;
};

using ConfirmedBody = std::variant<ReadPropertyRequest, WritePropertyRequest, ReinitializeDeviceRequest, UnsupportedService>;

struct ConfirmedRequest {
  std::uint8_t invoke_id = 0;
  std::uint8_t max_apdu_code = kMaxApduCode;
  ConfirmedBody body;
  std::uint8_t service() const;
  bool operator==(const ConfirmedRequest&) const = default;
};

struct WhoIs {
  std::optional<std::uint32_t> low_limit;
  std::optional<std::uint32_t> high_limit;
  bool operator==(const WhoIs&) const = default;
};

struct IAm {
  ObjectId device;
  std::uint32_t max_apdu = kMaxApduLength;
  std::uint32_t segmentation = 3;  // no-segmentation
  std::uint32_t vendor_id = 0;
  bool operator==(const IAm&) const = default;
};

using UnconfirmedBody = std::variant<WhoIs, IAm, UnsupportedService>;

struct UnconfirmedRequest {
  UnconfirmedBody body;
  std::uint8_t service() const;
  bool operator==(const UnconfirmedRequest&) const = default;
};

struct SimpleAck {
  std::uint8_t invoke_id = 0;
  std::uint8_t service = 0;
  bool operator==(const SimpleAck&) const = default;
};

struct ReadPropertyAck {
  ObjectId object;
  PropertyId property = PropertyId::present_value;
  std::optional<std::uint32_t> array_index;
  AppValue value;
  bool operator==(const ReadPropertyAck&) const = default;
};

struct ComplexAck {
  std::uint8_t invoke_id = 0;
  std::uint8_t service = 0;
  // ReadPropertyAck when service == read-property, raw body otherwise.
  std::variant<ReadPropertyAck, Bytes> body;
  bool operator==(const ComplexAck&) const = default;
};

struct ErrorPdu {
  std::uint8_t invoke_id = 0;
  std::uint8_t service = 0;
  std::uint32_t error_class = 0;
  std::uint32_t error_code = 0;
  bool operator==(const ErrorPdu&) const = default;
};

struct RejectPdu {
  std::uint8_t invoke_id = 0;
  std::uint8_t reason = 0;
  bool operator==(const RejectPdu&) const = default;
};

using Apdu = std::variant<ConfirmedRequest, UnconfirmedRequest, SimpleAck, ComplexAck, ErrorPdu, RejectPdu>;

// ---------------------------------------------------------------- NPDU ----

struct NetAddress {
  std::uint16_t network = 0;
  Bytes mac;  // empty: broadcast on `network`
  bool operator==(const NetAddress&) const = default;
};

struct Npdu {
  bool expects_reply = false;
  std::uint8_t priority = 0;  // 2 bits
  std::optional<NetAddress> destination;
  std::optional<NetAddress> source;
  std::uint8_t hop_count = 255;  // on the wire only when destination is present
  bool operator==(const Npdu&) const;
};

struct NpduMessage {
  Npdu npdu;
  Apdu apdu;
  bool operator==(const NpduMessage&) const = default;
};

// ---------------------------------------------------------------- BVLL ----

inline constexpr std::uint8_t kBvllTypeBip = 0x81;

enum class BvllFunction : std::uint8_t {
  result = 0x00,
  forwarded_npdu = 0x04,
  register_foreign_device = 0x05,
  distribute_broadcast_to_network = 0x09,
  original_unicast_npdu = 0x0A,
  original_broadcast_npdu = 0x0B,
};

enum class BvllResultCode : std::uint16_t {
  success = 0x0000,
  register_foreign_device_nak = 0x0030,
  distribute_broadcast_to_network_nak = 0x0060,
};

struct BvllResult {
  std::uint16_t code = 0;
  bool operator==(const BvllResult&) const = default;
};
struct RegisterForeignDevice {
  std::uint16_t ttl_seconds = 0;
  bool operator==(const RegisterForeignDevice&) const = default;
};
struct ForwardedNpdu {
  BipAddress origin;
  NpduMessage message;
  bool operator==(const ForwardedNpdu&) const = default;
};
struct DistributeBroadcastToNetwork {
  NpduMessage message;
  bool operator==(const DistributeBroadcastToNetwork&) const = default;
};
struct OriginalUnicastNpdu {
  NpduMessage message;
  bool operator==(const OriginalUnicastNpdu&) const = default;
};
struct OriginalBroadcastNpdu {
  NpduMessage message;
  bool operator==(const OriginalBroadcastNpdu&) const = default;
};

using BvllFrame = std::variant<BvllResult, RegisterForeignDevice, ForwardedNpdu, DistributeBroadcastToNetwork,
                               OriginalUnicastNpdu, OriginalBroadcastNpdu>;

BvllFunction function_of(const BvllFrame& frame);
// The carried NPDU, for the four NPDU-bearing functions.
const NpduMessage* message_of(const BvllFrame& frame);

}  // namespace bassim::bacnet
