#include "bassim/control/point_table.hpp"

#include <cmath>
#include <stdexcept>

namespace bassim::control {

using namespace bacnet;

const AppValue& Point::present_value() const {
  for (const auto& slot : priority_array)
    if (slot) return *slot;
  return value;
}

std::uint8_t Point::active_priority() const {
  for (std::size_t i = 0; i < priority_array.size(); ++i)
    if (priority_array[i]) return static_cast<std::uint8_t>(i + 1);
  return 0;
}

PointTable::PointTable(ObjectId device, std::string device_name)
    : device_(device), device_name_(std::move(device_name)) {
  if (device.type() != ObjectType::device) throw std::invalid_argument("PointTable needs a device object id");
}

void PointTable::add(Point point) {
  if (point.id.type() == ObjectType::device) throw std::invalid_argument("device object is implicit");
  const auto id = point.id;
  if (!points_.emplace(id, std::move(point)).second)
    throw std::invalid_argument("duplicate point " + id.to_string());
}

const Point* PointTable::find(const ObjectId& id) const {
  auto it = points_.find(id);
  return it == points_.end() ? nullptr : &it->second;
}

Point& PointTable::at(const ObjectId& id) {
  auto it = points_.find(id);
  if (it == points_.end()) throw std::out_of_range("unknown point " + id.to_string());
  return it->second;
}

Expected<AppValue, PointError> PointTable::read(const ObjectId& id, PropertyId property) const {
  if (id == device_) {
    switch (property) {
      case PropertyId::object_identifier: return AppValue{device_};
      case PropertyId::object_name: return AppValue{CharString{device_name_}};
      default: return Unexpected{PointError{ErrorClass::property, ErrorCode::unknown_property}};
    }
  }
  const Point* p = find(id);
  if (!p) return Unexpected{PointError{ErrorClass::object, ErrorCode::unknown_object}};
  switch (property) {
    case PropertyId::present_value: return p->present_value();
    case PropertyId::object_identifier: return AppValue{p->id};
    case PropertyId::object_name: return AppValue{CharString{p->name}};
    case PropertyId::units:
      if (std::holds_alternative<Real>(p->value)) return AppValue{Enumerated{static_cast<std::uint32_t>(p->units)}};
      break;
    case PropertyId::status_flags: return AppValue{BitString{4, Bytes{0x00}}};
    case PropertyId::relinquish_default:
      if (p->commandable) return p->value;
      break;
    default: break;
  }
  return Unexpected{PointError{ErrorClass::property, ErrorCode::unknown_property}};
}

Expected<std::monostate, PointError> PointTable::write(const ObjectId& id, PropertyId property, const AppValue& value,
                                                       std::optional<std::uint8_t> priority) {
  if (id == device_) return Unexpected{PointError{ErrorClass::property, ErrorCode::write_access_denied}};
  auto it = points_.find(id);
  if (it == points_.end()) return Unexpected{PointError{ErrorClass::object, ErrorCode::unknown_object}};
  Point& p = it->second;
  if (property != PropertyId::present_value) {
    if (read(id, property)) return Unexpected{PointError{ErrorClass::property, ErrorCode::write_access_denied}};
    return Unexpected{PointError{ErrorClass::property, ErrorCode::unknown_property}};
  }
  if (!p.commandable) return Unexpected{PointError{ErrorClass::property, ErrorCode::write_access_denied}};
  const std::uint8_t prio = priority.value_or(16);
  if (prio < 1 || prio > kPriorityLevels) return Unexpected{PointError{ErrorClass::property, ErrorCode::value_out_of_range}};
  auto& slot = p.priority_array[prio - 1];
  if (std::holds_alternative<Null>(value)) {
    slot.reset();
    return std::monostate{};
  }
  if (value.index() != p.value.index()) return Unexpected{PointError{ErrorClass::property, ErrorCode::invalid_data_type}};
  if (const auto* e = std::get_if<Enumerated>(&value); e && e->value > 1)
    return Unexpected{PointError{ErrorClass::property, ErrorCode::value_out_of_range}};
  if (const auto* r = std::get_if<Real>(&value); r && !std::isfinite(r->value))
    return Unexpected{PointError{ErrorClass::property, ErrorCode::value_out_of_range}};
  slot = value;
  return std::monostate{};
}

void PointTable::set_local(const ObjectId& id, AppValue value) {
  Point& p = at(id);
  if (value.index() != p.value.index()) throw std::invalid_argument("set_local type mismatch on " + id.to_string());
  p.value = std::move(value);
}

double PointTable::real(const ObjectId& id) const {
  const Point* p = find(id);
  if (!p) throw std::out_of_range("unknown point " + id.to_string());
  if (const auto* r = std::get_if<Real>(&p->present_value())) return r->value;
  throw std::invalid_argument(id.to_string() + " is not a real-valued point");
}

bool PointTable::binary(const ObjectId& id) const {
  const Point* p = find(id);
  if (!p) throw std::out_of_range("unknown point " + id.to_string());
  if (const auto* e = std::get_if<Enumerated>(&p->present_value())) return e->value != 0;
  throw std::invalid_argument(id.to_string() + " is not a binary point");
}

}  // namespace bassim::control
