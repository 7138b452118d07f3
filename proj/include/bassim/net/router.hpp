#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bassim/bacnet/codec.hpp"
#include "bassim/net/fabric.hpp"

namespace bassim::net {

struct ForeignDeviceEntry {
  bacnet::BipAddress addr;
  std::uint16_t ttl_s = 0;
  SimTime expires;

  double ttl_remaining(SimTime now) const { return (expires - now).seconds(); }
};

// BACnet/IP-to-field-bus router with the broadcast-management duties of a
// BBMD: a foreign-device table and Forwarded-NPDU fan-out.
class Router {
 public:
  struct Config {
    std::uint16_t ip_network = kDefaultIpNetwork;
    std::uint16_t field_network = kDefaultFieldNetwork;
    bacnet::BipAddress ip_address{{10, 13, 254, 5}, bacnet::kBacnetIpPort};
    std::uint8_t field_station = 254;
    std::size_t fdt_capacity = 16;
    std::uint8_t subnet_prefix = 24;
  };

  Router(Fabric& fabric, Config config);
  Router(const Router&) = delete;
  Router& operator=(const Router&) = delete;

  const NodeAddr& ip_addr() const { return ip_addr_; }
  const NodeAddr& field_addr() const { return field_addr_; }
  const Config& config() const { return config_; }

  // Adds or refreshes an entry; NAK code when the table is full or ttl is 0.
  bacnet::BvllResultCode register_foreign_device(const bacnet::BipAddress& addr, std::uint16_t ttl_s, SimTime now);
  std::vector<ForeignDeviceEntry> foreign_devices(SimTime now);

  std::uint64_t forwarded_count() const { return forwarded_; }
  const std::vector<std::string>& drop_log() const { return drops_; }

 private:
  void on_ip(const Packet& packet, SimTime now);
  void on_field(const Packet& packet, SimTime now);
  void purge(SimTime now);
  void route_to_field(const bacnet::NpduMessage& message, const bacnet::NetAddress& origin);
  void route_to_ip(const bacnet::NpduMessage& message, const bacnet::NetAddress& origin);
  void forward_to_foreign_devices(const bacnet::NpduMessage& message, const bacnet::BipAddress& origin,
                                  const bacnet::BipAddress* skip);
  void send_ip(const std::optional<NodeAddr>& dest, const bacnet::BvllFrame& frame);
  void drop(std::string reason);

  Fabric& fabric_;
  Config config_;
  NodeAddr ip_addr_;
  NodeAddr field_addr_;
  std::vector<ForeignDeviceEntry> fdt_;
  std::uint64_t forwarded_ = 0;
  std::vector<std::string> drops_;
};

}  // namespace bassim::net
