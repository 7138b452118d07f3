#include "bassim/bacnet/codec.hpp"

#include "bassim/bacnet/tags.hpp"

namespace bassim::bacnet {

std::string_view to_string(DecodeError e) {
  switch (e) {
    case DecodeError::truncated_frame: return "truncated-frame";
    case DecodeError::bad_bvll_type: return "bad-bvll-type";
    case DecodeError::unknown_bvll_function: return "unknown-bvll-function";
    case DecodeError::length_mismatch: return "length-mismatch";
    case DecodeError::bad_npdu_version: return "bad-npdu-version";
    case DecodeError::truncated_npdu: return "truncated-npdu";
    case DecodeError::unsupported_network_message: return "unsupported-network-message";
    case DecodeError::malformed_apdu: return "malformed-apdu";
    case DecodeError::unknown_tag: return "unknown-tag";
    case DecodeError::unsupported_object_type: return "unsupported-object-type";
    case DecodeError::unknown_pdu_type: return "unknown-pdu-type";
    case DecodeError::segmentation_unsupported: return "segmentation-unsupported";
  }
  return "unknown";
}

std::string_view to_string(EncodeError e) {
  switch (e) {
    case EncodeError::apdu_too_large: return "apdu-too-large";
    case EncodeError::invalid_priority: return "invalid-priority";
    case EncodeError::address_too_long: return "address-too-long";
  }
  return "unknown";
}

namespace {

using tags::Reader;
using tags::Writer;

constexpr std::uint8_t pdu_byte(PduType t) { return static_cast<std::uint8_t>(static_cast<std::uint8_t>(t) << 4); }

void encode_confirmed_body(Writer& w, Bytes& out, const ConfirmedBody& body) {
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, ReadPropertyRequest>) {
          w.context_object_id(0, b.object);
          w.context_enumerated(1, static_cast<std::uint32_t>(b.property));
          if (b.array_index) w.context_unsigned(2, *b.array_index);
        } else if constexpr (std::is_same_v<T, WritePropertyRequest>) {
          w.context_object_id(0, b.object);
          w.context_enumerated(1, static_cast<std::uint32_t>(b.property));
          if (b.array_index) w.context_unsigned(2, *b.array_index);
          w.opening(3);
          w.application(b.value);
          w.closing(3);
          if (b.priority) w.context_unsigned(4, *b.priority);
        } else if constexpr (std::is_same_v<T, ReinitializeDeviceRequest>) {
          w.context_enumerated(0, static_cast<std::uint32_t>(b.state));
          if (b.password) w.context_char_string(1, *b.password);
        } else {
          out.insert(out.end(), b.body.begin(), b.body.end());
        }
      },
      body);
}

void encode_unconfirmed_body(Writer& w, Bytes& out, const UnconfirmedBody& body) {
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, WhoIs>) {
          if (b.low_limit) w.context_unsigned(0, *b.low_limit);
          if (b.high_limit) w.context_unsigned(1, *b.high_limit);
        } else if constexpr (std::is_same_v<T, IAm>) {
          w.application(b.device);
          w.application(Unsigned{b.max_apdu});
          w.application(Enumerated{b.segmentation});
          w.application(Unsigned{b.vendor_id});
        } else {
          out.insert(out.end(), b.body.begin(), b.body.end());
        }
      },
      body);
}

Unexpected<DecodeError> malformed() { return Unexpected{DecodeError::malformed_apdu}; }

DecodeResult<ConfirmedBody> decode_confirmed_body(std::uint8_t service, ByteView body) {
  Reader r(body);
  switch (static_cast<ConfirmedService>(service)) {
    case ConfirmedService::read_property: {
      ReadPropertyRequest req;
      auto oid = r.context_object_id(0);
      if (!oid) return Unexpected{oid.error()};
      auto prop = r.context_unsigned(1);
      if (!prop) return Unexpected{prop.error()};
      req.object = *oid;
      req.property = static_cast<PropertyId>(*prop);
      if (r.next_is_context(2)) {
        auto idx = r.context_unsigned(2);
        if (!idx) return Unexpected{idx.error()};
        req.array_index = *idx;
      }
      if (!r.at_end()) return malformed();
      return ConfirmedBody{req};
    }
    case ConfirmedService::write_property: {
      WritePropertyRequest req;
      auto oid = r.context_object_id(0);
      if (!oid) return Unexpected{oid.error()};
      auto prop = r.context_unsigned(1);
      if (!prop) return Unexpected{prop.error()};
      req.object = *oid;
      req.property = static_cast<PropertyId>(*prop);
      if (r.next_is_context(2)) {
        auto idx = r.context_unsigned(2);
        if (!idx) return Unexpected{idx.error()};
        req.array_index = *idx;
      }
      if (auto o = r.expect_opening(3); !o) return Unexpected{o.error()};
      auto value = r.application();
      if (!value) return Unexpected{value.error()};
      req.value = std::move(*value);
      if (auto c = r.expect_closing(3); !c) return Unexpected{c.error()};
      if (!r.at_end()) {
        auto prio = r.context_unsigned(4);
        if (!prio) return Unexpected{prio.error()};
        if (*prio > 255) return malformed();
        req.priority = static_cast<std::uint8_t>(*prio);
      }
      if (!r.at_end()) return malformed();
      return ConfirmedBody{std::move(req)};
    }
    case ConfirmedService::reinitialize_device: {
      ReinitializeDeviceRequest req;
      auto state = r.context_unsigned(0);
      if (!state) return Unexpected{state.error()};
      req.state = static_cast<ReinitState>(*state);
      if (!r.at_end()) {
        auto pw = r.context_char_string(1);
        if (!pw) return Unexpected{pw.error()};
        req.password = std::move(*pw);
      }
      if (!r.at_end()) return malformed();
      return ConfirmedBody{std::move(req)};
    }
  }
  return ConfirmedBody{UnsupportedService{service, Bytes(body.begin(), body.end())}};
}

DecodeResult<UnconfirmedBody> decode_unconfirmed_body(std::uint8_t service, ByteView body) {
  Reader r(body);
  switch (static_cast<UnconfirmedService>(service)) {
    case UnconfirmedService::who_is: {
      WhoIs who;
      if (r.next_is_context(0)) {
        auto lo = r.context_unsigned(0);
        if (!lo) return Unexpected{lo.error()};
        who.low_limit = *lo;
      }
      if (r.next_is_context(1)) {
        auto hi = r.context_unsigned(1);
        if (!hi) return Unexpected{hi.error()};
        who.high_limit = *hi;
      }
      if (!r.at_end()) return malformed();
      return UnconfirmedBody{who};
    }
    case UnconfirmedService::i_am: {
      IAm iam;
      auto dev = r.application();
      if (!dev) return Unexpected{dev.error()};
      auto max_apdu = r.application();
      if (!max_apdu) return Unexpected{max_apdu.error()};
      auto seg = r.application();
      if (!seg) return Unexpected{seg.error()};
      auto vendor = r.application();
      if (!vendor) return Unexpected{vendor.error()};
      const auto* d = std::get_if<ObjectId>(&*dev);
      const auto* m = std::get_if<Unsigned>(&*max_apdu);
      const auto* s = std::get_if<Enumerated>(&*seg);
      const auto* v = std::get_if<Unsigned>(&*vendor);
      if (!d || !m || !s || !v || !r.at_end()) return malformed();
      iam.device = *d;
      iam.max_apdu = m->value;
      iam.segmentation = s->value;
      iam.vendor_id = v->value;
      return UnconfirmedBody{iam};
    }
  }
  return UnconfirmedBody{UnsupportedService{service, Bytes(body.begin(), body.end())}};
}

DecodeResult<ReadPropertyAck> decode_read_property_ack(ByteView body) {
  Reader r(body);
  ReadPropertyAck ack;
  auto oid = r.context_object_id(0);
  if (!oid) return Unexpected{oid.error()};
  auto prop = r.context_unsigned(1);
  if (!prop) return Unexpected{prop.error()};
  ack.object = *oid;
  ack.property = static_cast<PropertyId>(*prop);
  if (r.next_is_context(2)) {
    auto idx = r.context_unsigned(2);
    if (!idx) return Unexpected{idx.error()};
    ack.array_index = *idx;
  }
  if (auto o = r.expect_opening(3); !o) return Unexpected{o.error()};
  auto value = r.application();
  if (!value) return Unexpected{value.error()};
  ack.value = std::move(*value);
  if (auto c = r.expect_closing(3); !c) return Unexpected{c.error()};
  if (!r.at_end()) return malformed();
  return ack;
}

EncodeResult<bool> encode_net_address(Bytes& out, const NetAddress& a) {
  if (a.mac.size() > 6) return Unexpected{EncodeError::address_too_long};
  out.push_back(static_cast<std::uint8_t>(a.network >> 8));
  out.push_back(static_cast<std::uint8_t>(a.network));
  out.push_back(static_cast<std::uint8_t>(a.mac.size()));
  out.insert(out.end(), a.mac.begin(), a.mac.end());
  return true;
}

}  // namespace

// ------------------------------------------------------------------ APDU

EncodeResult<Bytes> encode_apdu(const Apdu& apdu) {
  Bytes out;
  Writer w(out);
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, ConfirmedRequest>) {
          out.push_back(pdu_byte(PduType::confirmed_request));
          out.push_back(a.max_apdu_code);
          out.push_back(a.invoke_id);
          out.push_back(a.service());
          encode_confirmed_body(w, out, a.body);
        } else if constexpr (std::is_same_v<T, UnconfirmedRequest>) {
          out.push_back(pdu_byte(PduType::unconfirmed_request));
          out.push_back(a.service());
          encode_unconfirmed_body(w, out, a.body);
        } else if constexpr (std::is_same_v<T, SimpleAck>) {
          out.push_back(pdu_byte(PduType::simple_ack));
          out.push_back(a.invoke_id);
          out.push_back(a.service);
        } else if constexpr (std::is_same_v<T, ComplexAck>) {
          out.push_back(pdu_byte(PduType::complex_ack));
          out.push_back(a.invoke_id);
          out.push_back(a.service);
          if (const auto* rp = std::get_if<ReadPropertyAck>(&a.body)) {
            w.context_object_id(0, rp->object);
            w.context_enumerated(1, static_cast<std::uint32_t>(rp->property));
            if (rp->array_index) w.context_unsigned(2, *rp->array_index);
            w.opening(3);
            w.application(rp->value);
            w.closing(3);
          } else {
            const auto& raw = std::get<Bytes>(a.body);
            out.insert(out.end(), raw.begin(), raw.end());
          }
        } else if constexpr (std::is_same_v<T, ErrorPdu>) {
          out.push_back(pdu_byte(PduType::error));
          out.push_back(a.invoke_id);
          out.push_back(a.service);
          w.application(Enumerated{a.error_class});
          w.application(Enumerated{a.error_code});
        } else if constexpr (std::is_same_v<T, RejectPdu>) {
          out.push_back(pdu_byte(PduType::reject));
          out.push_back(a.invoke_id);
          out.push_back(a.reason);
        }
      },
      apdu);
  if (out.size() > kMaxApduLength) return Unexpected{EncodeError::apdu_too_large};
  if (const auto* req = std::get_if<ConfirmedRequest>(&apdu)) {
    if (const auto* wp = std::get_if<WritePropertyRequest>(&req->body);
        wp && wp->priority && (*wp->priority < 1 || *wp->priority > 16))
      return Unexpected{EncodeError::invalid_priority};
  }
  return out;
}

DecodeResult<Apdu> decode_apdu(ByteView data) {
  if (data.empty()) return malformed();
  const std::uint8_t first = data[0];
  const auto type = static_cast<PduType>(first >> 4);
  switch (type) {
    case PduType::confirmed_request: {
      if (first & 0x08) return Unexpected{DecodeError::segmentation_unsupported};
      if (data.size() < 4) return malformed();
      ConfirmedRequest req;
      req.max_apdu_code = data[1];
      req.invoke_id = data[2];
      auto body = decode_confirmed_body(data[3], data.subspan(4));
      if (!body) return Unexpected{body.error()};
      req.body = std::move(*body);
      return Apdu{std::move(req)};
    }
    case PduType::unconfirmed_request: {
      if (data.size() < 2) return malformed();
      auto body = decode_unconfirmed_body(data[1], data.subspan(2));
      if (!body) return Unexpected{body.error()};
      return Apdu{UnconfirmedRequest{std::move(*body)}};
    }
    case PduType::simple_ack:
      if (data.size() != 3) return malformed();
      return Apdu{SimpleAck{data[1], data[2]}};
    case PduType::complex_ack: {
      if (first & 0x08) return Unexpected{DecodeError::segmentation_unsupported};
      if (data.size() < 3) return malformed();
      ComplexAck ack{data[1], data[2], Bytes{}};
      if (data[2] == static_cast<std::uint8_t>(ConfirmedService::read_property)) {
        auto rp = decode_read_property_ack(data.subspan(3));
        if (!rp) return Unexpected{rp.error()};
        ack.body = std::move(*rp);
      } else {
        ack.body = Bytes(data.begin() + 3, data.end());
      }
      return Apdu{std::move(ack)};
    }
    case PduType::error: {
      if (data.size() < 3) return malformed();
      Reader r(data.subspan(3));
      auto cls = r.application();
      if (!cls) return Unexpected{cls.error()};
      auto code = r.application();
      if (!code) return Unexpected{code.error()};
      const auto* c1 = std::get_if<Enumerated>(&*cls);
      const auto* c2 = std::get_if<Enumerated>(&*code);
      if (!c1 || !c2 || !r.at_end()) return malformed();
      return Apdu{ErrorPdu{data[1], data[2], c1->value, c2->value}};
    }
    case PduType::reject:
      if (data.size() != 3) return malformed();
      return Apdu{RejectPdu{data[1], data[2]}};
    default:
      return Unexpected{DecodeError::unknown_pdu_type};
  }
}

// ------------------------------------------------------------------ NPDU

EncodeResult<Bytes> encode_npdu_message(const NpduMessage& message) {
  auto apdu = encode_apdu(message.apdu);
  if (!apdu) return Unexpected{apdu.error()};
  const Npdu& n = message.npdu;
  Bytes out;
  out.reserve(apdu->size() + 20);
  out.push_back(0x01);
  std::uint8_t control = static_cast<std::uint8_t>(n.priority & 0x03);
  if (n.destination) control |= 0x20;
  if (n.source) control |= 0x08;
  if (n.expects_reply) control |= 0x04;
  out.push_back(control);
  if (n.destination) {
    if (auto r = encode_net_address(out, *n.destination); !r) return Unexpected{r.error()};
  }
  if (n.source) {
    if (auto r = encode_net_address(out, *n.source); !r) return Unexpected{r.error()};
  }
  if (n.destination) out.push_back(n.hop_count);
  out.insert(out.end(), apdu->begin(), apdu->end());
  return out;
}

DecodeResult<NpduMessage> decode_npdu_message(ByteView data) {
  if (data.size() < 2) return Unexpected{DecodeError::truncated_npdu};
  if (data[0] != 0x01) return Unexpected{DecodeError::bad_npdu_version};
  const std::uint8_t control = data[1];
  if (control & 0x80) return Unexpected{DecodeError::unsupported_network_message};
  NpduMessage msg;
  Npdu& n = msg.npdu;
  n.priority = control & 0x03;
  n.expects_reply = (control & 0x04) != 0;
  std::size_t pos = 2;
  auto read_addr = [&](std::optional<NetAddress>& slot) -> bool {
    if (data.size() - pos < 3) return false;
    NetAddress a;
    a.network = static_cast<std::uint16_t>((data[pos] << 8) | data[pos + 1]);
    const std::size_t len = data[pos + 2];
    pos += 3;
    if (data.size() - pos < len) return false;
    a.mac.assign(data.begin() + static_cast<std::ptrdiff_t>(pos),
                 data.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
    slot = std::move(a);
    return true;
  };
  if ((control & 0x20) && !read_addr(n.destination)) return Unexpected{DecodeError::truncated_npdu};
  if ((control & 0x08) && !read_addr(n.source)) return Unexpected{DecodeError::truncated_npdu};
  if (n.destination) {
    if (pos >= data.size()) return Unexpected{DecodeError::truncated_npdu};
    n.hop_count = data[pos++];
  }
  auto apdu = decode_apdu(data.subspan(pos));
  if (!apdu) return Unexpected{apdu.error()};
  msg.apdu = std::move(*apdu);
  return msg;
}

// ------------------------------------------------------------------ BVLL

EncodeResult<Bytes> encode_frame(const BvllFrame& frame) {
  Bytes out{kBvllTypeBip, static_cast<std::uint8_t>(function_of(frame)), 0, 0};
  if (const auto* r = std::get_if<BvllResult>(&frame)) {
    out.push_back(static_cast<std::uint8_t>(r->code >> 8));
    out.push_back(static_cast<std::uint8_t>(r->code));
  } else if (const auto* reg = std::get_if<RegisterForeignDevice>(&frame)) {
    out.push_back(static_cast<std::uint8_t>(reg->ttl_seconds >> 8));
    out.push_back(static_cast<std::uint8_t>(reg->ttl_seconds));
  } else {
    if (const auto* fwd = std::get_if<ForwardedNpdu>(&frame)) {
      auto origin = fwd->origin.to_bytes();
      out.insert(out.end(), origin.begin(), origin.end());
    }
    auto npdu = encode_npdu_message(*message_of(frame));
    if (!npdu) return Unexpected{npdu.error()};
    out.insert(out.end(), npdu->begin(), npdu->end());
  }
  out[2] = static_cast<std::uint8_t>(out.size() >> 8);
  out[3] = static_cast<std::uint8_t>(out.size());
  return out;
}

DecodeResult<BvllFrame> decode_frame(ByteView data) {
  if (data.empty()) return Unexpected{DecodeError::truncated_frame};
  if (data[0] != kBvllTypeBip) return Unexpected{DecodeError::bad_bvll_type};
  if (data.size() < 4) return Unexpected{DecodeError::truncated_frame};
  const std::size_t declared = static_cast<std::size_t>((data[2] << 8) | data[3]);
  if (declared != data.size()) return Unexpected{DecodeError::length_mismatch};
  ByteView payload = data.subspan(4);
  auto two_octets = [&](std::uint16_t& out) -> std::optional<DecodeError> {
    if (payload.size() < 2) return DecodeError::truncated_frame;
    if (payload.size() > 2) return DecodeError::length_mismatch;
    out = static_cast<std::uint16_t>((payload[0] << 8) | payload[1]);
    return std::nullopt;
  };
  switch (static_cast<BvllFunction>(data[1])) {
    case BvllFunction::result: {
      BvllResult r;
      if (auto e = two_octets(r.code)) return Unexpected{*e};
      return BvllFrame{r};
    }
    case BvllFunction::register_foreign_device: {
      RegisterForeignDevice r;
      if (auto e = two_octets(r.ttl_seconds)) return Unexpected{*e};
      return BvllFrame{r};
    }
    case BvllFunction::forwarded_npdu: {
      if (payload.size() < 6) return Unexpected{DecodeError::truncated_frame};
      ForwardedNpdu f;
      f.origin = *BipAddress::from_bytes(payload.subspan(0, 6));
      auto msg = decode_npdu_message(payload.subspan(6));
      if (!msg) return Unexpected{msg.error()};
      f.message = std::move(*msg);
      return BvllFrame{std::move(f)};
    }
    case BvllFunction::distribute_broadcast_to_network:
    case BvllFunction::original_unicast_npdu:
    case BvllFunction::original_broadcast_npdu: {
      auto msg = decode_npdu_message(payload);
      if (!msg) return Unexpected{msg.error()};
      switch (static_cast<BvllFunction>(data[1])) {
        case BvllFunction::distribute_broadcast_to_network:
          return BvllFrame{DistributeBroadcastToNetwork{std::move(*msg)}};
        case BvllFunction::original_unicast_npdu:
          return BvllFrame{OriginalUnicastNpdu{std::move(*msg)}};
        default:
          return BvllFrame{OriginalBroadcastNpdu{std::move(*msg)}};
      }
    }
  }
  return Unexpected{DecodeError::unknown_bvll_function};
}

}  // namespace bassim::bacnet
