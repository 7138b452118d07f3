#include "bassim/net/address.hpp"

namespace bassim::net {

std::string_view to_string(SegmentId segment) { return segment == SegmentId::ip ? "ip" : "field"; }

Bytes NodeAddr::mac_bytes() const {
  if (is_ip()) return bip().to_bytes();
  return {station_id()};
}

std::string NodeAddr::to_string() const {
  if (is_ip()) return bip().to_string();
  return std::to_string(network) + "/" + std::to_string(station_id());
}

}  // namespace bassim::net
