#include "bassim/bacnet/tags.hpp"

#include <bit>
#include <cstring>

namespace bassim::bacnet::tags {
namespace {

std::size_t unsigned_width(std::uint32_t v) {
  if (v < 0x100) return 1;
  if (v < 0x10000) return 2;
  if (v < 0x1000000) return 3;
  return 4;
}

std::size_t signed_width(std::int32_t v) {
  if (v >= -128 && v <= 127) return 1;
  if (v >= -32768 && v <= 32767) return 2;
  if (v >= -8388608 && v <= 8388607) return 3;
  return 4;
}

void put_be(Bytes& out, std::uint32_t v, std::size_t width) {
  for (std::size_t i = width; i-- > 0;) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

Unexpected<DecodeError> malformed() { return Unexpected{DecodeError::malformed_apdu}; }

}  // namespace

std::uint32_t unsigned_from(ByteView content) {
  std::uint32_t v = 0;
  for (auto b : content) v = (v << 8) | b;
  return v;
}

void Writer::header(std::uint8_t tag, bool context, std::uint32_t length) {
  std::uint8_t first = context ? 0x08 : 0x00;
  const bool ext_tag = tag >= 15;
  first |= static_cast<std::uint8_t>((ext_tag ? 15 : tag) << 4);
  if (length <= 4) {
    out_.push_back(first | static_cast<std::uint8_t>(length));
    if (ext_tag) out_.push_back(tag);
    return;
  }
  out_.push_back(first | 5);
  if (ext_tag) out_.push_back(tag);
  if (length < 254) {
    out_.push_back(static_cast<std::uint8_t>(length));
  } else if (length < 65536) {
    out_.push_back(254);
    put_be(out_, length, 2);
  } else {
    out_.push_back(255);
    put_be(out_, length, 4);
  }
}

void Writer::application(const AppValue& value) {
  std::visit(
      [this](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Null>) {
          out_.push_back(0x00);
        } else if constexpr (std::is_same_v<T, Boolean>) {
          out_.push_back(static_cast<std::uint8_t>(0x10 | (v.value ? 1 : 0)));
        } else if constexpr (std::is_same_v<T, Unsigned>) {
          auto w = unsigned_width(v.value);
          header(static_cast<std::uint8_t>(AppTag::unsigned_int), false, static_cast<std::uint32_t>(w));
          put_be(out_, v.value, w);
        } else if constexpr (std::is_same_v<T, Signed>) {
          auto w = signed_width(v.value);
          header(static_cast<std::uint8_t>(AppTag::signed_int), false, static_cast<std::uint32_t>(w));
          put_be(out_, static_cast<std::uint32_t>(v.value), w);
        } else if constexpr (std::is_same_v<T, Real>) {
          header(static_cast<std::uint8_t>(AppTag::real), false, 4);
          put_be(out_, std::bit_cast<std::uint32_t>(v.value), 4);
        } else if constexpr (std::is_same_v<T, Enumerated>) {
          auto w = unsigned_width(v.value);
          header(static_cast<std::uint8_t>(AppTag::enumerated), false, static_cast<std::uint32_t>(w));
          put_be(out_, v.value, w);
        } else if constexpr (std::is_same_v<T, CharString>) {
          header(static_cast<std::uint8_t>(AppTag::character_string), false,
                 static_cast<std::uint32_t>(v.value.size() + 1));
          out_.push_back(0x00);  // ANSI X3.4 / UTF-8
          out_.insert(out_.end(), v.value.begin(), v.value.end());
        } else if constexpr (std::is_same_v<T, BitString>) {
          header(static_cast<std::uint8_t>(AppTag::bit_string), false, static_cast<std::uint32_t>(v.bits.size() + 1));
          out_.push_back(v.unused_bits);
          out_.insert(out_.end(), v.bits.begin(), v.bits.end());
        } else if constexpr (std::is_same_v<T, ObjectId>) {
          header(static_cast<std::uint8_t>(AppTag::object_id), false, 4);
          put_be(out_, v.encode(), 4);
        }
      },
      value);
}

void Writer::context_unsigned(std::uint8_t tag, std::uint32_t value) {
  auto w = unsigned_width(value);
  header(tag, true, static_cast<std::uint32_t>(w));
  put_be(out_, value, w);
}

void Writer::context_object_id(std::uint8_t tag, ObjectId oid) {
  header(tag, true, 4);
  put_be(out_, oid.encode(), 4);
}

void Writer::context_char_string(std::uint8_t tag, const std::string& value) {
  header(tag, true, static_cast<std::uint32_t>(value.size() + 1));
  out_.push_back(0x00);
  out_.insert(out_.end(), value.begin(), value.end());
}

void Writer::opening(std::uint8_t tag) {
  if (tag < 15) {
    out_.push_back(static_cast<std::uint8_t>((tag << 4) | 0x0E));
  } else {
    out_.push_back(0xFE);
    out_.push_back(tag);
  }
}

void Writer::closing(std::uint8_t tag) {
  if (tag < 15) {
    out_.push_back(static_cast<std::uint8_t>((tag << 4) | 0x0F));
  } else {
    out_.push_back(0xFF);
    out_.push_back(tag);
  }
}

// ------------------------------------------------------------------ Reader

DecodeResult<Header> Reader::read_header(std::size_t& pos) const {
  if (pos >= data_.size()) return malformed();
  const std::uint8_t first = data_[pos++];
  Header h;
  h.number = first >> 4;
  h.context = (first & 0x08) != 0;
  const std::uint8_t lvt = first & 0x07;
  if (h.number == 15) {
    if (pos >= data_.size()) return malformed();
    h.number = data_[pos++];
  }
  if (lvt == 6 || lvt == 7) {
    if (!h.context) return malformed();
    h.opening = lvt == 6;
    h.closing = lvt == 7;
    return h;
  }
  if (lvt < 5) {
    h.length = lvt;
    return h;
  }
  if (pos >= data_.size()) return malformed();
  const std::uint8_t ext = data_[pos++];
  std::size_t width = 0;
  if (ext < 254) {
    h.length = ext;
    return h;
  }
  width = ext == 254 ? 2 : 4;
  if (data_.size() - pos < width) return malformed();
  h.length = unsigned_from(data_.subspan(pos, width));
  pos += width;
  return h;
}

DecodeResult<Header> Reader::peek() const {
  std::size_t pos = pos_;
  return read_header(pos);
}

DecodeResult<Header> Reader::next_header() { return read_header(pos_); }

bool Reader::next_is_context(std::uint8_t tag) const {
  auto h = peek();
  return h && h->context && !h->opening && !h->closing && h->number == tag;
}

bool Reader::next_is_opening(std::uint8_t tag) const {
  auto h = peek();
  return h && h->opening && h->number == tag;
}

bool Reader::next_is_closing(std::uint8_t tag) const {
  auto h = peek();
  return h && h->closing && h->number == tag;
}

DecodeResult<ByteView> Reader::take(std::size_t n) {
  if (data_.size() - pos_ < n) return malformed();
  ByteView v = data_.subspan(pos_, n);
  pos_ += n;
  return v;
}

DecodeResult<AppValue> Reader::application() {
  auto h = next_header();
  if (!h) return Unexpected{h.error()};
  if (h->context || h->opening || h->closing) return malformed();
  const auto tag = static_cast<AppTag>(h->number);
  if (tag == AppTag::boolean) {
    if (h->length > 1) return malformed();
    return AppValue{Boolean{h->length == 1}};
  }
  auto content = take(h->length);
  if (!content) return Unexpected{content.error()};
  ByteView c = *content;
  switch (tag) {
    case AppTag::null:
      if (!c.empty()) return malformed();
      return AppValue{Null{}};
    case AppTag::unsigned_int:
      if (c.empty() || c.size() > 4) return malformed();
      return AppValue{Unsigned{unsigned_from(c)}};
    case AppTag::enumerated:
      if (c.empty() || c.size() > 4) return malformed();
      return AppValue{Enumerated{unsigned_from(c)}};
    case AppTag::signed_int: {
      if (c.empty() || c.size() > 4) return malformed();
      std::uint32_t raw = unsigned_from(c);
      const unsigned shift = static_cast<unsigned>(32 - 8 * c.size());
      std::int32_t v = static_cast<std::int32_t>(raw << shift) >> shift;
      return AppValue{Signed{v}};
    }
    case AppTag::real:
      if (c.size() != 4) return malformed();
      return AppValue{Real{std::bit_cast<float>(unsigned_from(c))}};
    case AppTag::character_string:
      if (c.empty() || c[0] != 0x00) return malformed();
      return AppValue{CharString{std::string(c.begin() + 1, c.end())}};
    case AppTag::bit_string: {
      if (c.empty() || c[0] > 7 || (c.size() == 1 && c[0] != 0)) return malformed();
      return AppValue{BitString{c[0], Bytes(c.begin() + 1, c.end())}};
    }
    case AppTag::object_id: {
      if (c.size() != 4) return malformed();
      auto oid = ObjectId::decode(unsigned_from(c));
      if (!oid) return Unexpected{DecodeError::unsupported_object_type};
      return AppValue{*oid};
    }
    default:
      return Unexpected{DecodeError::unknown_tag};
  }
}

DecodeResult<std::uint32_t> Reader::context_unsigned(std::uint8_t tag) {
  auto h = next_header();
  if (!h) return Unexpected{h.error()};
  if (!h->context || h->opening || h->closing || h->number != tag) return malformed();
  if (h->length == 0 || h->length > 4) return malformed();
  auto c = take(h->length);
  if (!c) return Unexpected{c.error()};
  return unsigned_from(*c);
}

DecodeResult<ObjectId> Reader::context_object_id(std::uint8_t tag) {
  auto h = next_header();
  if (!h) return Unexpected{h.error()};
  if (!h->context || h->opening || h->closing || h->number != tag || h->length != 4) return malformed();
  auto c = take(4);
  if (!c) return Unexpected{c.error()};
  auto oid = ObjectId::decode(unsigned_from(*c));
  if (!oid) return Unexpected{DecodeError::unsupported_object_type};
  return *oid;
}

DecodeResult<std::string> Reader::context_char_string(std::uint8_t tag) {
  auto h = next_header();
  if (!h) return Unexpected{h.error()};
  if (!h->context || h->opening || h->closing || h->number != tag || h->length == 0) return malformed();
  auto c = take(h->length);
  if (!c) return Unexpected{c.error()};
  if ((*c)[0] != 0x00) return malformed();
  return std::string(c->begin() + 1, c->end());
}

DecodeResult<bool> Reader::expect_opening(std::uint8_t tag) {
  auto h = next_header();
  if (!h) return Unexpected{h.error()};
  if (!h->opening || h->number != tag) return malformed();
  return true;
}

DecodeResult<bool> Reader::expect_closing(std::uint8_t tag) {
  auto h = next_header();
  if (!h) return Unexpected{h.error()};
  if (!h->closing || h->number != tag) return malformed();
  return true;
}

}  // namespace bassim::bacnet::tags
