#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bassim/bacnet/codec.hpp"
#include "bassim/control/point_table.hpp"
#include "bassim/net/fabric.hpp"
#include "bassim/util/sim_time.hpp"

namespace bassim::control {

struct DeviceConfig {
  std::string name;
  std::uint32_t instance = 0;
  std::uint8_t station = 0;
  std::uint16_t network = net::kDefaultFieldNetwork;
  std::uint8_t router_station = 254;
  double reboot_s = 10.0;
  std::uint32_t vendor_id = 0;
};

// A BACnet device on the field bus: answers ReadProperty / WriteProperty /
// ReinitializeDevice / Who-Is from its point table and goes silent while
// soft-rebooting.
class FieldDevice {
 public:
  FieldDevice(DeviceConfig config, PointTable points);
  FieldDevice(const FieldDevice&) = delete;
  FieldDevice& operator=(const FieldDevice&) = delete;

  void attach(net::Fabric& fabric);

  // Service logic without transport. nullopt: no response at all.
  std::optional<bacnet::Apdu> handle_request(const bacnet::Apdu& apdu, SimTime now);

  bool rebooting(SimTime now) const { return reboot_until_ && now < *reboot_until_; }
  std::optional<SimTime> reboot_until() const { return reboot_until_; }
  // True once after each reboot has finished; the application restarts then.
  bool take_restart(SimTime now);
  std::uint64_t reboot_count() const { return reboots_; }

  const DeviceConfig& config() const { return config_; }
  bacnet::ObjectId id() const { return points_.device(); }
  net::NodeAddr addr() const { return net::NodeAddr::station(config_.network, config_.station); }
  PointTable& points() { return points_; }
  const PointTable& points() const { return points_; }

 private:
  void on_packet(const net::Packet& packet, SimTime now);
  bool addressed_to_me(const bacnet::Npdu& npdu) const;
  std::optional<bacnet::Apdu> handle_confirmed(const bacnet::ConfirmedRequest& req, SimTime now);

  DeviceConfig config_;
  PointTable points_;
  net::Fabric* fabric_ = nullptr;
  std::optional<SimTime> reboot_until_;
  bool restart_pending_ = false;
  std::uint64_t reboots_ = 0;
};

}  // namespace bassim::control
