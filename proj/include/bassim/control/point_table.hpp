#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bassim/bacnet/types.hpp"
#include "bassim/util/expected.hpp"

namespace bassim::control {

inline constexpr std::size_t kPriorityLevels = 16;

struct PointError {
  bacnet::ErrorClass error_class = bacnet::ErrorClass::object;
  bacnet::ErrorCode error_code = bacnet::ErrorCode::other;
  bool operator==(const PointError&) const = default;
};

struct Point {
  bacnet::ObjectId id;
  std::string name;
  bacnet::Units units = bacnet::Units::no_units;
  bool commandable = false;
  // Present value of a non-commandable point; the control program's value
  // (relinquish default) of a commandable one.
  bacnet::AppValue value = bacnet::Real{0.0f};
  std::array<std::optional<bacnet::AppValue>, kPriorityLevels> priority_array{};

  // Lowest-index non-null slot, else the relinquish default.
  const bacnet::AppValue& present_value() const;
  // Index (1-based) of the winning slot, 0 when relinquished.
  std::uint8_t active_priority() const;
};

// Object database of one device, including its device object.
class PointTable {
 public:
  explicit PointTable(bacnet::ObjectId device, std::string device_name);

  const bacnet::ObjectId& device() const { return device_; }
  const std::string& device_name() const { return device_name_; }

  void add(Point point);
  const Point* find(const bacnet::ObjectId& id) const;
  const std::map<bacnet::ObjectId, Point>& points() const { return points_; }

  Expected<bacnet::AppValue, PointError> read(const bacnet::ObjectId& id, bacnet::PropertyId property) const;
  // Present-value writes to commandable points. Null relinquishes the slot;
  // an absent priority means 16.
  Expected<std::monostate, PointError> write(const bacnet::ObjectId& id, bacnet::PropertyId property,
                                             const bacnet::AppValue& value, std::optional<std::uint8_t> priority);

  // Local updates from sensors and control programs; bypass the priority array.
  void set_local(const bacnet::ObjectId& id, bacnet::AppValue value);
  double real(const bacnet::ObjectId& id) const;
  bool binary(const bacnet::ObjectId& id) const;

 private:
  Point& at(const bacnet::ObjectId& id);

  bacnet::ObjectId device_;
  std::string device_name_;
  std::map<bacnet::ObjectId, Point> points_;
};

}  // namespace bassim::control
