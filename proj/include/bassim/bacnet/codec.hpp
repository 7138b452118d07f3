#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bassim/bacnet/types.hpp"
#include "bassim/util/bytes.hpp"
#include "bassim/util/expected.hpp"

namespace bassim::bacnet {

enum class DecodeError {
  truncated_frame,
  bad_bvll_type,
  unknown_bvll_function,
  length_mismatch,
  bad_npdu_version,
  truncated_npdu,
  unsupported_network_message,
  malformed_apdu,
  unknown_tag,
  unsupported_object_type,
  unknown_pdu_type,
  segmentation_unsupported,
};

enum class EncodeError {
  apdu_too_large,
  invalid_priority,
  address_too_long,
};

std::string_view to_string(DecodeError e);
std::string_view to_string(EncodeError e);

template <class T>
using DecodeResult = Expected<T, DecodeError>;
template <class T>
using EncodeResult = Expected<T, EncodeError>;

// Wire encoders. The BVLL length field is always recomputed.
EncodeResult<Bytes> encode_apdu(const Apdu& apdu);
EncodeResult<Bytes> encode_npdu_message(const NpduMessage& message);
EncodeResult<Bytes> encode_frame(const BvllFrame& frame);

// Total decoders: every input yields a value or a typed error.
DecodeResult<Apdu> decode_apdu(ByteView data);
DecodeResult<NpduMessage> decode_npdu_message(ByteView data);
DecodeResult<BvllFrame> decode_frame(ByteView data);

// Request/response builders for the supervisor, devices and attack engine.
Apdu build_read_property(ObjectId object, PropertyId property, std::uint8_t invoke_id);
// Fails with invalid_priority unless priority is within 1..16.
EncodeResult<Apdu> build_write_property(ObjectId object, PropertyId property, AppValue value,
                                        std::optional<std::uint8_t> priority, std::uint8_t invoke_id);
Apdu build_reinitialize(ReinitState state, std::optional<std::string> password, std::uint8_t invoke_id);
Apdu build_who_is();
Apdu build_i_am(ObjectId device, std::uint32_t vendor_id = 0);
Apdu build_simple_ack(std::uint8_t invoke_id, ConfirmedService service);
Apdu build_read_property_ack(const ReadPropertyRequest& request, AppValue value, std::uint8_t invoke_id);
Apdu build_error(std::uint8_t invoke_id, std::uint8_t service, ErrorClass error_class, ErrorCode error_code);
Apdu build_reject(std::uint8_t invoke_id, RejectReason reason);

// Short human-readable service label ("who-is", "read-property", "simple-ack", ...).
std::string service_label(const Apdu& apdu);
// Label for a whole B/IP frame; BVLL-only functions map to their own names.
std::string service_label(const BvllFrame& frame);

}  // namespace bassim::bacnet
