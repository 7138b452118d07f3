#pragma once

// Clause-20 tag primitives shared by the APDU encoder and decoder.

#include <cstdint>
#include <optional>
#include <string>

#include "bassim/bacnet/codec.hpp"
#include "bassim/bacnet/types.hpp"

namespace bassim::bacnet::tags {

enum class AppTag : std::uint8_t {
  null = 0,
  boolean = 1,
  unsigned_int = 2,
  signed_int = 3,
  real = 4,
  double_real = 5,
  octet_string = 6,
  character_string = 7,
  bit_string = 8,
  enumerated = 9,
  date = 10,
  time = 11,
  object_id = 12,
};

class Writer {
 public:
  explicit Writer(Bytes& out) : out_(out) {}

  void application(const AppValue& value);
  void context_unsigned(std::uint8_t tag, std::uint32_t value);
  void context_enumerated(std::uint8_t tag, std::uint32_t value) { context_unsigned(tag, value); }
  void context_object_id(std::uint8_t tag, ObjectId oid);
  void context_char_string(std::uint8_t tag, const std::string& value);
  void opening(std::uint8_t tag);
  void closing(std::uint8_t tag);

 private:
  void header(std::uint8_t tag, bool context, std::uint32_t length);
  Bytes& out_;
};

struct Header {
  std::uint8_t number = 0;
  bool context = false;
  bool opening = false;
  bool closing = false;
  std::uint32_t length = 0;  // content octets; for application Boolean the value itself
};

class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  bool at_end() const { return pos_ >= data_.size(); }
  std::size_t position() const { return pos_; }
  ByteView rest() const { return data_.subspan(pos_); }

  DecodeResult<Header> peek() const;
  DecodeResult<Header> next_header();

  // True when the next tag is context `tag` (value, opening or closing per `kind`).
  bool next_is_context(std::uint8_t tag) const;
  bool next_is_opening(std::uint8_t tag) const;
  bool next_is_closing(std::uint8_t tag) const;

  DecodeResult<AppValue> application();
  DecodeResult<std::uint32_t> context_unsigned(std::uint8_t tag);
  DecodeResult<ObjectId> context_object_id(std::uint8_t tag);
  DecodeResult<std::string> context_char_string(std::uint8_t tag);
  DecodeResult<bool> expect_opening(std::uint8_t tag);
  DecodeResult<bool> expect_closing(std::uint8_t tag);

 private:
  DecodeResult<Header> read_header(std::size_t& pos) const;
  DecodeResult<ByteView> take(std::size_t n);
  ByteView data_;
  std::size_t pos_ = 0;
};

std::uint32_t unsigned_from(ByteView content);

}  // namespace bassim::bacnet::tags
