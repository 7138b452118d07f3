#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bassim/bacnet/codec.hpp"
#include "bassim/control/controllers.hpp"
#include "bassim/net/fabric.hpp"
#include "bassim/server/alarm.hpp"
#include "bassim/server/trend.hpp"

namespace bassim::server {

// One entry of the published point map.
struct PointInfo {
  std::string id;  // "<device>.<object-type>:<instance>"
  std::string device;
  std::uint32_t device_instance = 0;
  bacnet::ObjectId object;
  std::string name;
  bacnet::Units units = bacnet::Units::no_units;
  bool commandable = false;
  bool binary = false;
};
using PointCatalog = std::vector<PointInfo>;

struct DeviceEntry {
  bacnet::ObjectId device;
  std::string name;
  bacnet::NetAddress route;  // network + MAC as seen in the I-Am source
  std::uint32_t max_apdu = 0;
  SimTime last_seen;
};

enum class Actor { operator_, supervisor, attacker };
std::string_view to_string(Actor actor);
std::optional<Actor> actor_from_string(std::string_view s);

struct WriteOutcome {
  enum class Kind { ack, unknown_point, not_writable, device_unknown, no_invoke_id, timeout, device_error, reject };
  Kind kind = Kind::ack;
  std::string detail;
  bool ok() const { return kind == Kind::ack; }
};
std::string_view to_string(WriteOutcome::Kind kind);

struct AuditRecord {
  SimTime issued;
  SimTime completed;
  Actor actor = Actor::supervisor;
  std::string point;
  double value = 0.0;
  std::uint8_t priority = 16;
  std::uint8_t invoke_id = 0;
  WriteOutcome outcome;
};

struct DispatchRule {
  std::string point;
  double occupied = 0.0;
  double unoccupied = 0.0;
};

struct SupervisorConfig {
  bacnet::BipAddress address{{10, 13, 254, 2}, bacnet::kBacnetIpPort};
  bacnet::BipAddress router{{10, 13, 254, 5}, bacnet::kBacnetIpPort};
  std::uint16_t ip_network = net::kDefaultIpNetwork;
  double trend_interval_s = 60.0;
  double poll_timeout_s = 3.0;
  int poll_retries = 1;
  double write_timeout_s = 3.0;
  double dispatch_period_s = 300.0;
  double rediscover_period_s = 600.0;
  std::vector<std::string> monitored_points;
  std::vector<DispatchRule> dispatch;
  std::vector<AlarmRule> alarms;
  control::Schedule schedule;
  SimTime end = SimTime::from_whole_seconds(86400);  // no polls or dispatches at or after this

  void validate(const PointCatalog& catalog) const;
};

// Default dispatch rules and alarm rules for the testbed point map.
std::vector<DispatchRule> default_dispatch(std::size_t zones);
std::vector<AlarmRule> default_alarms(std::size_t zones);
std::vector<std::string> default_monitored_points(std::size_t zones);

// Supervisory workstation on the IP segment.
class Supervisor {
 public:
  using WriteCallback = std::function<void(const WriteOutcome&)>;

  struct Stats {
    std::uint64_t reads_sent = 0;
    std::uint64_t read_timeouts = 0;
    std::uint64_t read_errors = 0;  // Error/Reject/undecodable responses
    std::uint64_t writes_sent = 0;
    std::uint64_t who_is_sent = 0;
  };

  Supervisor(net::Fabric& fabric, SupervisorConfig config, PointCatalog catalog);
  Supervisor(const Supervisor&) = delete;
  Supervisor& operator=(const Supervisor&) = delete;

  // Discovery at t = 0, polling and dispatch timers.
  void start();
  void discover();

  // Issues one WriteProperty; outcome via callback (immediately for local
  // failures). Exactly one audit record per WriteProperty put on the wire.
  void write_point(const std::string& point, double value, std::optional<std::uint8_t> priority, Actor actor,
                   WriteCallback done = {});

  const PointCatalog& catalog() const { return catalog_; }
  const PointInfo* find_point(const std::string& id) const;
  const std::map<std::uint32_t, DeviceEntry>& devices() const { return devices_; }
  const SupervisorConfig& config() const { return config_; }
  const net::NodeAddr& addr() const { return addr_; }

  TrendStore& trends() { return trends_; }
  const TrendStore& trends() const { return trends_; }
  const AlarmEvaluator& alarms() const { return alarms_; }
  const std::vector<AuditRecord>& audit() const { return audit_; }
  const Stats& stats() const { return stats_; }
  bool idle() const { return pending_.empty(); }

  // Observers for persistence and live streaming.
  std::function<void(const AuditRecord&)> on_audit;
  std::function<void(const std::string& point, const TrendRecord&)> on_trend;
  std::function<void(const AlarmEvent&, bool opened)> on_alarm;

 private:
  struct Transaction {
    enum class Kind { read, write } kind = Kind::read;
    std::uint32_t device_instance = 0;
    bacnet::NetAddress route;
    std::size_t point_index = 0;  // catalog index
    // read
    SimTime sample_time;
    int attempt = 0;
    // write
    AuditRecord audit;
    WriteCallback done;
    net::TimerId timeout = 0;
  };

  void on_packet(const net::Packet& packet, SimTime now);
  void on_i_am(const bacnet::IAm& iam, const bacnet::NetAddress& source, SimTime now);
  void on_response(std::uint8_t invoke_id, const bacnet::NetAddress& source, const bacnet::Apdu& apdu, SimTime now);
  void schedule_poll(std::size_t monitored_index, SimTime at);
  void poll(std::size_t monitored_index, SimTime sample_time, int attempt);
  void poll_timeout(std::uint8_t invoke_id);
  void write_timeout(std::uint8_t invoke_id);
  void finish_read(const Transaction& tx, std::optional<float> value, SimTime now);
  void finish_write(Transaction tx, WriteOutcome outcome, SimTime now);
  void dispatch(SimTime now);
  void rediscover(SimTime now);
  std::optional<std::uint8_t> allocate_invoke_id();
  bool send_request(const bacnet::NetAddress& route, const bacnet::Apdu& apdu);
  const DeviceEntry* device_for(const PointInfo& point) const;

  net::Fabric& fabric_;
  SupervisorConfig config_;
  PointCatalog catalog_;
  std::map<std::string, std::size_t> point_index_;
  std::vector<std::size_t> monitored_;  // catalog indices in poll order
  net::NodeAddr addr_;
  net::NodeAddr router_addr_;
  std::map<std::uint32_t, DeviceEntry> devices_;
  std::map<std::uint8_t, Transaction> pending_;
  std::uint8_t next_invoke_ = 0;
  TrendStore trends_;
  AlarmEvaluator alarms_;
  std::vector<AuditRecord> audit_;
  Stats stats_;
};

}  // namespace bassim::server
