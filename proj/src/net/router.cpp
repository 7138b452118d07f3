#include "bassim/net/router.hpp"

#include <algorithm>

namespace bassim::net {

using namespace bacnet;

Router::Router(Fabric& fabric, Config config)
    : fabric_(fabric),
      config_(config),
      ip_addr_(NodeAddr::ip(config.ip_network, config.ip_address)),
      field_addr_(NodeAddr::station(config.field_network, config.field_station)) {
  fabric_.attach(SegmentId::ip, ip_addr_, [this](const Packet& p, SimTime now) { on_ip(p, now); });
  fabric_.attach(SegmentId::field, field_addr_, [this](const Packet& p, SimTime now) { on_field(p, now); });
}

BvllResultCode Router::register_foreign_device(const BipAddress& addr, std::uint16_t ttl_s, SimTime now) {
  purge(now);
  if (ttl_s == 0) return BvllResultCode::register_foreign_device_nak;
  const SimTime expires = now + SimTime::from_whole_seconds(ttl_s);
  auto it = std::find_if(fdt_.begin(), fdt_.end(), [&](const auto& e) { return e.addr == addr; });
  if (it != fdt_.end()) {
    it->ttl_s = ttl_s;
    it->expires = expires;
    return BvllResultCode::success;
  }
  if (fdt_.size() >= config_.fdt_capacity) return BvllResultCode::register_foreign_device_nak;
  fdt_.push_back(ForeignDeviceEntry{addr, ttl_s, expires});
  return BvllResultCode::success;
}

std::vector<ForeignDeviceEntry> Router::foreign_devices(SimTime now) {
  purge(now);
  return fdt_;
}

void Router::purge(SimTime now) {
  std::erase_if(fdt_, [&](const auto& e) { return e.ttl_remaining(now) <= 0.0; });
}

void Router::drop(std::string reason) { drops_.push_back(std::move(reason)); }

void Router::send_ip(const std::optional<NodeAddr>& dest, const BvllFrame& frame) {
  auto bytes = encode_frame(frame);
  if (!bytes) {
    drop(std::string("encode failed: ") + std::string(to_string(bytes.error())));
    return;
  }
  fabric_.send(ip_addr_, dest, std::move(*bytes));
}

void Router::forward_to_foreign_devices(const NpduMessage& message, const BipAddress& origin,
                                        const BipAddress* skip) {
  purge(fabric_.now());
  for (const auto& entry : fdt_) {
    if (skip && entry.addr == *skip) continue;
    send_ip(NodeAddr::ip(config_.ip_network, entry.addr), ForwardedNpdu{origin, message});
  }
}

void Router::on_ip(const Packet& packet, SimTime now) {
  if (!packet.src.is_ip()) return;
  const BipAddress& sender = packet.src.bip();
  auto frame = decode_frame(packet.payload);
  if (!frame) {
    drop("malformed frame from " + packet.src.to_string() + ": " + std::string(to_string(frame.error())));
    return;
  }
  const NetAddress origin_default{config_.ip_network, sender.to_bytes()};

  if (const auto* reg = std::get_if<RegisterForeignDevice>(&*frame)) {
    if (!packet.dst) return;
    const auto code = register_foreign_device(sender, reg->ttl_seconds, now);
    send_ip(packet.src, BvllResult{static_cast<std::uint16_t>(code)});
    return;
  }
  if (const auto* bc = std::get_if<OriginalBroadcastNpdu>(&*frame)) {
    forward_to_foreign_devices(bc->message, sender, nullptr);
    if (bc->message.npdu.destination) route_to_field(bc->message, bc->message.npdu.source.value_or(origin_default));
    return;
  }
  if (const auto* uc = std::get_if<OriginalUnicastNpdu>(&*frame)) {
    if (!packet.dst) return;
    if (uc->message.npdu.destination) route_to_field(uc->message, uc->message.npdu.source.value_or(origin_default));
    return;
  }
  if (const auto* dist = std::get_if<DistributeBroadcastToNetwork>(&*frame)) {
    purge(now);
    const bool registered =
        std::any_of(fdt_.begin(), fdt_.end(), [&](const auto& e) { return e.addr == sender; });
    if (!registered) {
      send_ip(packet.src, BvllResult{static_cast<std::uint16_t>(BvllResultCode::distribute_broadcast_to_network_nak)});
      return;
    }
    send_ip(std::nullopt, ForwardedNpdu{sender, dist->message});
    forward_to_foreign_devices(dist->message, sender, &sender);
    if (dist->message.npdu.destination)
      route_to_field(dist->message, dist->message.npdu.source.value_or(origin_default));
    return;
  }
  // BVLL results and Forwarded-NPDUs from peers need no action here.
}

void Router::on_field(const Packet& packet, SimTime) {
  if (packet.src.is_ip()) return;
  auto message = decode_npdu_message(packet.payload);
  if (!message) {
    drop("malformed npdu from " + packet.src.to_string() + ": " + std::string(to_string(message.error())));
    return;
  }
  if (!message->npdu.destination) return;
  const NetAddress origin_default{config_.field_network, packet.src.mac_bytes()};
  route_to_ip(*message, message->npdu.source.value_or(origin_default));
}

void Router::route_to_field(const NpduMessage& message, const NetAddress& origin) {
  const NetAddress& dest = *message.npdu.destination;
  if (dest.network == config_.ip_network) return;
  if (dest.network != config_.field_network && dest.network != kGlobalBroadcastNet) {
    drop("unroutable dnet " + std::to_string(dest.network));
    return;
  }
  if (message.npdu.hop_count <= 1) {
    drop("hop count exhausted");
    return;
  }
  NpduMessage out = message;
  out.npdu.source = origin;
  std::optional<NodeAddr> target;
  if (dest.network == kGlobalBroadcastNet) {
    out.npdu.hop_count = static_cast<std::uint8_t>(message.npdu.hop_count - 1);
  } else {
    out.npdu.destination.reset();
    if (dest.mac.size() == 1) {
      target = NodeAddr::station(config_.field_network, dest.mac[0]);
    } else if (!dest.mac.empty()) {
      drop("bad field dadr length " + std::to_string(dest.mac.size()));
      return;
    }
  }
  auto bytes = encode_npdu_message(out);
  if (!bytes) {
    drop(std::string("encode failed: ") + std::string(to_string(bytes.error())));
    return;
  }
  ++forwarded_;
  fabric_.send(field_addr_, target, std::move(*bytes));
}

void Router::route_to_ip(const NpduMessage& message, const NetAddress& origin) {
  const NetAddress& dest = *message.npdu.destination;
  if (dest.network == config_.field_network) return;
  if (dest.network != config_.ip_network && dest.network != kGlobalBroadcastNet) {
    drop("unroutable dnet " + std::to_string(dest.network));
    return;
  }
  if (message.npdu.hop_count <= 1) {
    drop("hop count exhausted");
    return;
  }
  NpduMessage out = message;
  out.npdu.source = origin;
  ++forwarded_;
  if (dest.network == kGlobalBroadcastNet) {
    out.npdu.hop_count = static_cast<std::uint8_t>(message.npdu.hop_count - 1);
    send_ip(std::nullopt, OriginalBroadcastNpdu{out});
    forward_to_foreign_devices(out, config_.ip_address, nullptr);
    return;
  }
  out.npdu.destination.reset();
  if (dest.mac.empty()) {
    send_ip(std::nullopt, OriginalBroadcastNpdu{out});
    forward_to_foreign_devices(out, config_.ip_address, nullptr);
    return;
  }
  auto bip = BipAddress::from_bytes(dest.mac);
  if (!bip) {
    drop("bad ip dadr length " + std::to_string(dest.mac.size()));
    return;
  }
  send_ip(NodeAddr::ip(config_.ip_network, *bip), OriginalUnicastNpdu{out});
}

}  // namespace bassim::net
