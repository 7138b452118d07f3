#include "bassim/control/field_device.hpp"

namespace bassim::control {

using namespace bacnet;

FieldDevice::FieldDevice(DeviceConfig config, PointTable points)
    : config_(std::move(config)), points_(std::move(points)) {}

void FieldDevice::attach(net::Fabric& fabric) {
  fabric_ = &fabric;
  fabric.attach(net::SegmentId::field, addr(), [this](const net::Packet& p, SimTime now) { on_packet(p, now); });
}

bool FieldDevice::take_restart(SimTime now) {
  if (!restart_pending_ || rebooting(now)) return false;
  restart_pending_ = false;
  return true;
}

bool FieldDevice::addressed_to_me(const Npdu& npdu) const {
  if (!npdu.destination) return true;
  const auto& d = *npdu.destination;
  if (d.network == kGlobalBroadcastNet) return true;
  if (d.network != config_.network) return false;
  return d.mac.empty() || (d.mac.size() == 1 && d.mac[0] == config_.station);
}

std::optional<Apdu> FieldDevice::handle_request(const Apdu& apdu, SimTime now) {
  if (rebooting(now)) {
    // A reinitialize received mid-reboot restarts the boot sequence.
    if (const auto* req = std::get_if<ConfirmedRequest>(&apdu);
        req && std::holds_alternative<ReinitializeDeviceRequest>(req->body)) {
      reboot_until_ = now + SimTime::from_seconds(config_.reboot_s);
      ++reboots_;
    }
    return std::nullopt;
  }
  if (const auto* req = std::get_if<ConfirmedRequest>(&apdu)) return handle_confirmed(*req, now);
  if (const auto* un = std::get_if<UnconfirmedRequest>(&apdu)) {
    if (const auto* who = std::get_if<WhoIs>(&un->body)) {
      const auto inst = id().instance();
      if (who->low_limit && who->high_limit && (inst < *who->low_limit || inst > *who->high_limit))
        return std::nullopt;
      return build_i_am(id(), config_.vendor_id);
    }
  }
  return std::nullopt;
}

std::optional<Apdu> FieldDevice::handle_confirmed(const ConfirmedRequest& req, SimTime now) {
  const std::uint8_t service = req.service();
  if (const auto* rp = std::get_if<ReadPropertyRequest>(&req.body)) {
    if (rp->array_index) return build_error(req.invoke_id, service, ErrorClass::property, ErrorCode::unknown_property);
    auto value = points_.read(rp->object, rp->property);
    if (!value) return build_error(req.invoke_id, service, value.error().error_class, value.error().error_code);
    return build_read_property_ack(*rp, std::move(*value), req.invoke_id);
  }
  if (const auto* wp = std::get_if<WritePropertyRequest>(&req.body)) {
    if (wp->array_index) return build_error(req.invoke_id, service, ErrorClass::property, ErrorCode::write_access_denied);
    auto r = points_.write(wp->object, wp->property, wp->value, wp->priority);
    if (!r) return build_error(req.invoke_id, service, r.error().error_class, r.error().error_code);
    return build_simple_ack(req.invoke_id, ConfirmedService::write_property);
  }
  if (const auto* ri = std::get_if<ReinitializeDeviceRequest>(&req.body)) {
    if (ri->state != ReinitState::warmstart && ri->state != ReinitState::coldstart)
      return build_error(req.invoke_id, service, ErrorClass::services, ErrorCode::value_out_of_range);
    // The acknowledgement goes out before the device drops off the bus.
    reboot_until_ = now + SimTime::from_seconds(config_.reboot_s);
    restart_pending_ = true;
    ++reboots_;
    return build_simple_ack(req.invoke_id, ConfirmedService::reinitialize_device);
  }
  return build_reject(req.invoke_id, RejectReason::unrecognized_service);
}

void FieldDevice::on_packet(const net::Packet& packet, SimTime now) {
  auto message = decode_npdu_message(packet.payload);
  if (!message || !addressed_to_me(message->npdu)) return;
  const bool was_rebooting = rebooting(now);
  auto reply = handle_request(message->apdu, now);
  if (!reply || was_rebooting || !fabric_) return;

  NpduMessage out{Npdu{}, std::move(*reply)};
  std::optional<net::NodeAddr> next_hop;
  if (std::holds_alternative<UnconfirmedRequest>(out.apdu)) {
    // I-Am goes out as a global broadcast.
    out.npdu.destination = NetAddress{kGlobalBroadcastNet, {}};
  } else if (message->npdu.source) {
    out.npdu.destination = message->npdu.source;
    next_hop = net::NodeAddr::station(config_.network, config_.router_station);
  } else {
    next_hop = packet.src;
  }
  auto bytes = encode_npdu_message(out);
  if (!bytes) return;
  fabric_->send(addr(), next_hop, std::move(*bytes));
}

}  // namespace bassim::control
