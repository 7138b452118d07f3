#include <charconv>
#include <stdexcept>

#include "bassim/bacnet/codec.hpp"
#include "bassim/bacnet/types.hpp"

namespace bassim::bacnet {

// ------------------------------------------------------------ object ids

bool is_supported_object_type(std::uint32_t raw) {
  switch (raw) {
    case 0: case 1: case 2: case 4: case 5: case 8:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(ObjectType type) {
  switch (type) {
    case ObjectType::analog_input: return "analog-input";
    case ObjectType::analog_output: return "analog-output";
    case ObjectType::analog_value: return "analog-value";
    case ObjectType::binary_output: return "binary-output";
    case ObjectType::binary_value: return "binary-value";
    case ObjectType::device: return "device";
  }
  return "unknown";
}

std::optional<ObjectType> object_type_from_string(std::string_view name) {
  for (auto t : {ObjectType::analog_input, ObjectType::analog_output, ObjectType::analog_value,
                 ObjectType::binary_output, ObjectType::binary_value, ObjectType::device}) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

ObjectId::ObjectId(ObjectType type, std::uint32_t instance) : type_(type), instance_(instance) {
  if (instance > kMaxInstance) throw std::out_of_range("object instance exceeds 2^22-1");
}

std::array<std::uint8_t, 4> ObjectId::to_bytes() const {
  const std::uint32_t v = encode();
  return {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8),
          static_cast<std::uint8_t>(v)};
}

std::optional<ObjectId> ObjectId::decode(std::uint32_t raw) {
  const std::uint32_t type = raw >> 22;
  if (!is_supported_object_type(type)) return std::nullopt;
  return ObjectId(static_cast<ObjectType>(type), raw & kMaxInstance);
}

std::string ObjectId::to_string() const {
  return std::string(bacnet::to_string(type_)) + ":" + std::to_string(instance_);
}

std::optional<ObjectId> ObjectId::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto type = object_type_from_string(text.substr(0, colon));
  if (!type) return std::nullopt;
  auto num = text.substr(colon + 1);
  std::uint32_t instance = 0;
  auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), instance);
  if (ec != std::errc{} || ptr != num.data() + num.size() || instance > kMaxInstance) return std::nullopt;
  return ObjectId(*type, instance);
}

std::string_view value_kind(const AppValue& value) {
  static constexpr std::string_view names[] = {"null",       "boolean",     "unsigned",   "signed",   "real",
                                               "enumerated", "char-string", "bit-string", "object-id"};
  return names[value.index()];
}

// ------------------------------------------------------------ addresses

Bytes BipAddress::to_bytes() const {
  return {ip[0], ip[1], ip[2], ip[3], static_cast<std::uint8_t>(port >> 8), static_cast<std::uint8_t>(port)};
}

std::optional<BipAddress> BipAddress::from_bytes(ByteView six) {
  if (six.size() != 6) return std::nullopt;
  BipAddress a;
  for (int i = 0; i < 4; ++i) a.ip[i] = six[i];
  a.port = static_cast<std::uint16_t>((six[4] << 8) | six[5]);
  return a;
}

std::string BipAddress::to_string() const {
  return std::to_string(ip[0]) + "." + std::to_string(ip[1]) + "." + std::to_string(ip[2]) + "." +
         std::to_string(ip[3]) + ":" + std::to_string(port);
}

std::optional<BipAddress> BipAddress::parse(std::string_view text) {
  BipAddress a;
  auto colon = text.find(':');
  std::string_view host = text.substr(0, colon);
  if (colon != std::string_view::npos) {
    auto p = text.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), a.port);
    if (ec != std::errc{} || ptr != p.data() + p.size()) return std::nullopt;
  }
  for (int i = 0; i < 4; ++i) {
    auto dot = host.find('.');
    auto part = host.substr(0, dot);
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size() || v > 255 || part.empty()) return std::nullopt;
    a.ip[i] = static_cast<std::uint8_t>(v);
    if (i < 3) {
      if (dot == std::string_view::npos) return std::nullopt;
      host = host.substr(dot + 1);
    } else if (dot != std::string_view::npos) {
      return std::nullopt;
    }
  }
  return a;
}

// ------------------------------------------------------------ accessors

std::uint8_t ConfirmedRequest::service() const {
  return std::visit(
      [](const auto& b) -> std::uint8_t {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, ReadPropertyRequest>) return static_cast<std::uint8_t>(ConfirmedService::read_property);
        else if constexpr (std::is_same_v<T, WritePropertyRequest>) return static_cast<std::uint8_t>(ConfirmedService::write_property);
        else if constexpr (std::is_same_v<T, ReinitializeDeviceRequest>) return static_cast<std::uint8_t>(ConfirmedService::reinitialize_device);
        else return b.service;
      },
      body);
}

std::uint8_t UnconfirmedRequest::service() const {
  return std::visit(
      [](const auto& b) -> std::uint8_t {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, WhoIs>) return static_cast<std::uint8_t>(UnconfirmedService::who_is);
        else if constexpr (std::is_same_v<T, IAm>) return static_cast<std::uint8_t>(UnconfirmedService::i_am);
        else return b.service;
      },
      body);
}

bool Npdu::operator==(const Npdu& o) const {
  if (expects_reply != o.expects_reply || priority != o.priority || destination != o.destination ||
      source != o.source)
    return false;
  return !destination || hop_count == o.hop_count;
}

BvllFunction function_of(const BvllFrame& frame) {
  static constexpr BvllFunction map[] = {BvllFunction::result,
                                         BvllFunction::register_foreign_device,
                                         BvllFunction::forwarded_npdu,
                                         BvllFunction::distribute_broadcast_to_network,
                                         BvllFunction::original_unicast_npdu,
                                         BvllFunction::original_broadcast_npdu};
  return map[frame.index()];
}

const NpduMessage* message_of(const BvllFrame& frame) {
  return std::visit(
      [](const auto& f) -> const NpduMessage* {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, BvllResult> || std::is_same_v<T, RegisterForeignDevice>) return nullptr;
        else return &f.message;
      },
      frame);
}

// ------------------------------------------------------------ builders

Apdu build_read_property(ObjectId object, PropertyId property, std::uint8_t invoke_id) {
  return ConfirmedRequest{invoke_id, kMaxApduCode, ReadPropertyRequest{object, property, std::nullopt}};
}

EncodeResult<Apdu> build_write_property(ObjectId object, PropertyId property, AppValue value,
                                        std::optional<std::uint8_t> priority, std::uint8_t invoke_id) {
  if (priority && (*priority < 1 || *priority > 16)) return Unexpected{EncodeError::invalid_priority};
  return Apdu{ConfirmedRequest{invoke_id, kMaxApduCode,
                               WritePropertyRequest{object, property, std::nullopt, std::move(value), priority}}};
}

Apdu build_reinitialize(ReinitState state, std::optional<std::string> password, std::uint8_t invoke_id) {
  return ConfirmedRequest{invoke_id, kMaxApduCode, ReinitializeDeviceRequest{state, std::move(password)}};
}

Apdu build_who_is() { return UnconfirmedRequest{WhoIs{}}; }

Apdu build_i_am(ObjectId device, std::uint32_t vendor_id) {
  return UnconfirmedRequest{IAm{device, static_cast<std::uint32_t>(kMaxApduLength), 3, vendor_id}};
}

Apdu build_simple_ack(std::uint8_t invoke_id, ConfirmedService service) {
  return SimpleAck{invoke_id, static_cast<std::uint8_t>(service)};
}

Apdu build_read_property_ack(const ReadPropertyRequest& request, AppValue value, std::uint8_t invoke_id) {
  return ComplexAck{invoke_id, static_cast<std::uint8_t>(ConfirmedService::read_property),
                    ReadPropertyAck{request.object, request.property, request.array_index, std::move(value)}};
}

Apdu build_error(std::uint8_t invoke_id, std::uint8_t service, ErrorClass error_class, ErrorCode error_code) {
  return ErrorPdu{invoke_id, service, static_cast<std::uint32_t>(error_class), static_cast<std::uint32_t>(error_code)};
}

Apdu build_reject(std::uint8_t invoke_id, RejectReason reason) {
  return RejectPdu{invoke_id, static_cast<std::uint8_t>(reason)};
}

// ------------------------------------------------------------ labels

namespace {

std::string confirmed_label(std::uint8_t service) {
  switch (static_cast<ConfirmedService>(service)) {
    case ConfirmedService::read_property: return "read-property";
    case ConfirmedService::write_property: return "write-property";
    case ConfirmedService::reinitialize_device: return "reinitialize-device";
  }
  return "unsupported-confirmed-" + std::to_string(service);
}

}  // namespace

std::string service_label(const Apdu& apdu) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, ConfirmedRequest>) {
          return confirmed_label(a.service());
        } else if constexpr (std::is_same_v<T, UnconfirmedRequest>) {
          switch (a.service()) {
            case static_cast<std::uint8_t>(UnconfirmedService::who_is): return "who-is";
            case static_cast<std::uint8_t>(UnconfirmedService::i_am): return "i-am";
            default: return "unsupported-unconfirmed-" + std::to_string(a.service());
          }
        } else if constexpr (std::is_same_v<T, SimpleAck>) {
          return "simple-ack";
        } else if constexpr (std::is_same_v<T, ComplexAck>) {
          return "complex-ack";
        } else if constexpr (std::is_same_v<T, ErrorPdu>) {
          return "error";
        } else {
          return "reject";
        }
      },
      apdu);
}

std::string service_label(const BvllFrame& frame) {
  if (const auto* r = std::get_if<BvllResult>(&frame)) return r->code == 0 ? "bvlc-result" : "bvlc-result-nak";
  if (std::holds_alternative<RegisterForeignDevice>(frame)) return "register-foreign-device";
  return service_label(message_of(frame)->apdu);
}

}  // namespace bassim::bacnet
