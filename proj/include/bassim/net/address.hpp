#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "bassim/bacnet/types.hpp"
#include "bassim/util/bytes.hpp"

namespace bassim::net {

enum class SegmentId : std::uint8_t { ip = 0, field = 1 };

std::string_view to_string(SegmentId segment);

inline constexpr std::uint16_t kDefaultIpNetwork = 1;
inline constexpr std::uint16_t kDefaultFieldNetwork = 2001;

// Address of a node on one fabric segment: a B/IP endpoint on the IP segment,
// a one-octet station id on the field bus.
struct NodeAddr {
  std::uint16_t network = 0;
  std::variant<bacnet::BipAddress, std::uint8_t> mac;

  static NodeAddr ip(std::uint16_t network, bacnet::BipAddress bip) { return {network, bip}; }
  static NodeAddr station(std::uint16_t network, std::uint8_t id) { return {network, id}; }

  bool is_ip() const { return std::holds_alternative<bacnet::BipAddress>(mac); }
  const bacnet::BipAddress& bip() const { return std::get<bacnet::BipAddress>(mac); }
  std::uint8_t station_id() const { return std::get<std::uint8_t>(mac); }

  // 6 octets for B/IP, 1 octet for a station; the NPDU SADR/DADR form.
  Bytes mac_bytes() const;
  // "10.13.254.2:47808" or "2001/21".
  std::string to_string() const;

  auto operator<=>(const NodeAddr&) const = default;
};

}  // namespace bassim::net
