#pragma once

#include <cstdint>
#include <functional>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bassim/net/address.hpp"
#include "bassim/util/bytes.hpp"
#include "bassim/util/sim_time.hpp"

namespace bassim::net {

class FabricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LinkModel {
  double base_latency_s = 0.001;
  double jitter_s = 0.0005;  // uniform in [-jitter, +jitter]
};

struct Packet {
  SegmentId segment = SegmentId::ip;
  NodeAddr src;
  std::optional<NodeAddr> dst;  // nullopt: segment broadcast
  Bytes payload;
};

enum class Verdict : std::uint8_t { delivered, dropped };

// One record per wire transmission, delivered or dropped. This is the tap
// contract consumed by the capture writers.
struct WireRecord {
  SimTime time;
  SegmentId segment = SegmentId::ip;
  NodeAddr src;
  std::optional<NodeAddr> dst;
  Bytes raw;
  Verdict verdict = Verdict::delivered;
};

using NodeHandle = std::uint32_t;
using TimerId = std::uint64_t;

struct Delivery {
  SimTime time;
  NodeHandle node = 0;
  Packet packet;
};

// Deterministic discrete-event fabric with two segments. Events run in
// (due_time, sequence) order; per-sender FIFO is preserved under jitter.
class Fabric {
 public:
  using Handler = std::function<void(const Packet&, SimTime now)>;
  using TimerFn = std::function<void(SimTime now)>;
  using Tap = std::function<void(const WireRecord&)>;

  struct Config {
    LinkModel ip{0.001, 0.0005};
    LinkModel field{0.005, 0.001};
    std::uint64_t seed = 1;
  };

  Fabric() : Fabric(Config{}) {}
  explicit Fabric(Config config);

  NodeHandle attach(SegmentId segment, const NodeAddr& addr, Handler handler);
  void detach(NodeHandle node);
  bool is_attached(const NodeAddr& addr) const;
  std::optional<SegmentId> segment_of(const NodeAddr& addr) const;
  std::vector<NodeAddr> nodes_on(SegmentId segment) const;

  // Schedules delivery at now + latency (+ jitter). Broadcast when dest is nullopt.
  // Unicast to an absent address is dropped and tapped with Verdict::dropped.
  void send(const NodeAddr& from, const std::optional<NodeAddr>& dest, Bytes payload);

  TimerId schedule(SimTime due, TimerFn fn);
  void cancel(TimerId id);

  // Processes every event due at or before `until`.
  std::vector<Delivery> step(SimTime until);
  bool has_pending() const { return !queue_.empty(); }
  std::optional<SimTime> next_due() const;

  SimTime now() const { return now_; }
  void set_tap(Tap tap) { tap_ = std::move(tap); }
  void set_link_model(SegmentId segment, LinkModel model);
  const LinkModel& link_model(SegmentId segment) const;

  std::uint64_t dropped_count() const { return dropped_; }

 private:
  struct Node {
    SegmentId segment;
    NodeAddr addr;
    Handler handler;
    bool attached = true;
  };
  struct Event {
    SimTime due;
    std::uint64_t seq = 0;
    bool is_timer = false;
    TimerId timer = 0;
    Packet packet;
    std::optional<NodeHandle> target;  // unicast receiver
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.due != b.due ? a.due > b.due : a.seq > b.seq;
    }
  };

  SimTime latency(SegmentId segment);
  void emit(const WireRecord& rec) {
    if (tap_) tap_(rec);
  }
  std::optional<NodeHandle> find(const NodeAddr& addr) const;

  Config config_;
  std::deque<Node> nodes_;
  std::map<NodeAddr, NodeHandle> by_addr_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::map<TimerId, TimerFn> timers_;
  std::map<NodeHandle, SimTime> last_due_;
  std::mt19937_64 rng_;
  SimTime now_;
  std::uint64_t seq_ = 0;
  TimerId next_timer_ = 1;
  std::uint64_t dropped_ = 0;
  Tap tap_;
};

}  // namespace bassim::net
