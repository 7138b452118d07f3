#include "bassim/net/fabric.hpp"

#include <algorithm>
#include <cmath>

namespace bassim::net {

Fabric::Fabric(Config config) : config_(config), rng_(config.seed) {}

NodeHandle Fabric::attach(SegmentId segment, const NodeAddr& addr, Handler handler) {
  if (by_addr_.contains(addr)) throw FabricError("address already attached: " + addr.to_string());
  const auto handle = static_cast<NodeHandle>(nodes_.size());
  nodes_.push_back(Node{segment, addr, std::move(handler), true});
  by_addr_.emplace(addr, handle);
  return handle;
}

void Fabric::detach(NodeHandle node) {
  if (node >= nodes_.size() || !nodes_[node].attached) return;
  nodes_[node].attached = false;
  by_addr_.erase(nodes_[node].addr);
}

std::optional<NodeHandle> Fabric::find(const NodeAddr& addr) const {
  auto it = by_addr_.find(addr);
  if (it == by_addr_.end()) return std::nullopt;
  return it->second;
}

bool Fabric::is_attached(const NodeAddr& addr) const { return find(addr).has_value(); }

std::optional<SegmentId> Fabric::segment_of(const NodeAddr& addr) const {
  auto h = find(addr);
  if (!h) return std::nullopt;
  return nodes_[*h].segment;
}

std::vector<NodeAddr> Fabric::nodes_on(SegmentId segment) const {
  std::vector<NodeAddr> out;
  for (const auto& n : nodes_)
    if (n.attached && n.segment == segment) out.push_back(n.addr);
  return out;
}

void Fabric::set_link_model(SegmentId segment, LinkModel model) {
  (segment == SegmentId::ip ? config_.ip : config_.field) = model;
}

const LinkModel& Fabric::link_model(SegmentId segment) const {
  return segment == SegmentId::ip ? config_.ip : config_.field;
}

SimTime Fabric::latency(SegmentId segment) {
  const LinkModel& m = link_model(segment);
  double jitter = 0.0;
  if (m.jitter_s > 0.0) {
    std::uniform_real_distribution<double> dist(-m.jitter_s, m.jitter_s);
    jitter = dist(rng_);
  }
  return SimTime::from_seconds(std::max(0.0, m.base_latency_s + jitter));
}

void Fabric::send(const NodeAddr& from, const std::optional<NodeAddr>& dest, Bytes payload) {
  auto src = find(from);
  if (!src) throw FabricError("send from unattached address " + from.to_string());
  const SegmentId segment = nodes_[*src].segment;

  std::optional<NodeHandle> target;
  if (dest) {
    target = find(*dest);
    if (!target || nodes_[*target].segment != segment) {
      ++dropped_;
      emit(WireRecord{now_, segment, from, dest, std::move(payload), Verdict::dropped});
      return;
    }
  }

  SimTime due = now_ + latency(segment);
  auto& last = last_due_[*src];
  due = std::max(due, last);
  last = due;

  Event ev;
  ev.due = due;
  ev.seq = seq_++;
  ev.packet = Packet{segment, from, dest, std::move(payload)};
  ev.target = target;
  queue_.push(std::move(ev));
}

TimerId Fabric::schedule(SimTime due, TimerFn fn) {
  const TimerId id = next_timer_++;
  timers_.emplace(id, std::move(fn));
  Event ev;
  ev.due = std::max(due, now_);
  ev.seq = seq_++;
  ev.is_timer = true;
  ev.timer = id;
  queue_.push(std::move(ev));
  return id;
}

void Fabric::cancel(TimerId id) { timers_.erase(id); }

std::optional<SimTime> Fabric::next_due() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.top().due;
}

std::vector<Delivery> Fabric::step(SimTime until) {
  std::vector<Delivery> delivered;
  while (!queue_.empty() && queue_.top().due <= until) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.due;

    if (ev.is_timer) {
      auto it = timers_.find(ev.timer);
      if (it == timers_.end()) continue;
      TimerFn fn = std::move(it->second);
      timers_.erase(it);
      fn(now_);
      continue;
    }

    const Packet& pkt = ev.packet;
    if (ev.target) {
      Node& node = nodes_[*ev.target];
      if (!node.attached) {
        ++dropped_;
        emit(WireRecord{now_, pkt.segment, pkt.src, pkt.dst, pkt.payload, Verdict::dropped});
        continue;
      }
      emit(WireRecord{now_, pkt.segment, pkt.src, pkt.dst, pkt.payload, Verdict::delivered});
      delivered.push_back(Delivery{now_, *ev.target, pkt});
      node.handler(pkt, now_);
      continue;
    }

    emit(WireRecord{now_, pkt.segment, pkt.src, std::nullopt, pkt.payload, Verdict::delivered});
    // Nodes attached by a handler during this broadcast do not receive it.
    const std::size_t count = nodes_.size();
    for (std::size_t i = 0; i < count; ++i) {
      Node& node = nodes_[i];
      if (!node.attached || node.segment != pkt.segment || node.addr == pkt.src) continue;
      delivered.push_back(Delivery{now_, static_cast<NodeHandle>(i), pkt});
      node.handler(pkt, now_);
    }
  }
  if (until > now_) now_ = until;
  return delivered;
}

}  // namespace bassim::net
