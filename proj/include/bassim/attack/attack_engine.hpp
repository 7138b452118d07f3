#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bassim/attack/scenario.hpp"
#include "bassim/net/fabric.hpp"
#include "bassim/server/supervisor.hpp"

namespace bassim::attack {

struct AttackerConfig {
  bacnet::BipAddress address{{192, 168, 1, 66}, bacnet::kBacnetIpPort};
  bacnet::BipAddress router{{10, 13, 254, 5}, bacnet::kBacnetIpPort};
  std::uint16_t ip_network = net::kDefaultIpNetwork;
  // device name -> network route (field network + station MAC)
  std::map<std::string, bacnet::NetAddress> device_routes;
};

enum class AttackState { scheduled, active, finished, cancelled };
std::string_view to_string(AttackState s);

struct AttackRecord {
  std::string id;
  AttackSpec spec;
  AttackState state = AttackState::scheduled;
  std::uint64_t requests_sent = 0;  // writes or reinitialize requests issued
  std::uint64_t failures = 0;       // FDI writes that did not ack
};

// Schedules attacks as fabric timers and executes them from an attacker node
// on the IP segment (or through the supervisor for compromised-server FDI).
class AttackEngine {
 public:
  AttackEngine(net::Fabric& fabric, server::Supervisor& supervisor, AttackerConfig config);
  AttackEngine(const AttackEngine&) = delete;
  AttackEngine& operator=(const AttackEngine&) = delete;

  // Windows already under way start at the current time. Returns the id.
  std::string launch(const AttackSpec& spec);
  bool cancel(const std::string& id);

  const std::vector<AttackRecord>& attacks() const { return attacks_; }
  const net::NodeAddr& addr() const { return addr_; }
  std::uint64_t responses_received() const { return responses_; }

 private:
  struct Timers {
    std::vector<net::TimerId> ids;
  };

  AttackRecord& record(std::size_t index) { return attacks_[index]; }
  bool live(std::size_t index, SimTime now);
  void arm(std::size_t index, SimTime at, std::function<void(SimTime)> fn);

  void run_fdi(std::size_t index, std::int64_t k);
  void run_reinit(std::size_t index, std::int64_t k);
  void run_register(std::size_t index, std::uint16_t ttl, std::int64_t k);
  void send_to_router(const bacnet::BvllFrame& frame);
  void send_routed(const bacnet::NetAddress& route, const bacnet::Apdu& apdu);
  void on_packet(const net::Packet& packet, SimTime now);

  net::Fabric& fabric_;
  server::Supervisor& supervisor_;
  AttackerConfig config_;
  net::NodeAddr addr_;
  net::NodeAddr router_addr_;
  std::vector<AttackRecord> attacks_;
  std::map<std::size_t, Timers> timers_;
  std::uint8_t next_invoke_ = 0;
  std::uint64_t responses_ = 0;
};

}  // namespace bassim::attack
