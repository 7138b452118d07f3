#include "bassim/control/controllers.hpp"

#include <algorithm>
#include <stdexcept>

namespace bassim::control {

using namespace bacnet;

bool Schedule::occupied(SimTime t) const {
  const std::int64_t day_us = 86400LL * 1000000LL;
  std::int64_t tod = t.micros() % day_us;
  if (tod < 0) tod += day_us;
  return tod >= occupied_start_s * 1000000LL && tod < occupied_end_s * 1000000LL;
}

void Schedule::validate() const {
  if (occupied_start_s < 0 || occupied_end_s > 86400 || occupied_start_s >= occupied_end_s)
    throw std::invalid_argument("schedule needs 0 <= occupied_start < occupied_end <= 24 h");
}

void VavConfig::validate() const {
  if (heat_occupied > cool_occupied - 1.0 || heat_unoccupied > cool_unoccupied - 1.0)
    throw std::invalid_argument("heating setpoint must be at least 1 K below cooling setpoint");
  if (v_min < 0 || v_cool_max < v_min) throw std::invalid_argument("VAV airflow limits out of order");
}

namespace pts {
ObjectId ai(std::uint32_t n) { return {ObjectType::analog_input, n}; }
ObjectId ao(std::uint32_t n) { return {ObjectType::analog_output, n}; }
ObjectId av(std::uint32_t n) { return {ObjectType::analog_value, n}; }
ObjectId bo(std::uint32_t n) { return {ObjectType::binary_output, n}; }
}  // namespace pts

namespace {

Point sensor(ObjectId id, std::string name, Units units) {
  Point p;
  p.id = id;
  p.name = std::move(name);
  p.units = units;
  return p;
}

Point command(ObjectId id, std::string name, Units units, AppValue relinquish) {
  Point p;
  p.id = id;
  p.name = std::move(name);
  p.units = units;
  p.commandable = true;
  p.value = std::move(relinquish);
  return p;
}

Real real(double v) { return Real{static_cast<float>(v)}; }

}  // namespace

bool Controller::control_step(const plant::MeasurementSet& m, SimTime now, double dt) {
  if (device_.rebooting(now)) return false;
  if (device_.take_restart(now)) restart();
  sense(m);
  act(now, dt);
  return true;
}

// ---------------------------------------------------------------- VAV ----

VavController::VavController(DeviceConfig device, VavConfig config, std::size_t zone)
    : Controller(device, PointTable(ObjectId(ObjectType::device, device.instance), device.name)),
      config_(config),
      zone_(zone),
      cool_(config.gains.kp, config.gains.ki),
      heat_(config.gains.kp, config.gains.ki) {
  config_.validate();
  auto& t = points();
  t.add(sensor(pts::ai(1), "zone-temp", Units::degrees_celsius));
  t.add(sensor(pts::ai(2), "airflow", Units::kilograms_per_second));
  t.add(command(pts::av(1), "cooling-setpoint", Units::degrees_celsius, real(config.cool_occupied)));
  t.add(command(pts::av(2), "heating-setpoint", Units::degrees_celsius, real(config.heat_occupied)));
  t.add(command(pts::ao(1), "airflow-setpoint", Units::kilograms_per_second, real(config.v_min)));
  t.add(command(pts::ao(2), "reheat", Units::no_units, real(0.0)));
}

VavController::Output VavController::sequence(double u_cool, double u_heat, double v_min, double v_cool_max) {
  if (u_cool > 0.0) return {v_min + u_cool * (v_cool_max - v_min), 0.0};
  return {v_min, u_heat};
}

void VavController::sense(const plant::MeasurementSet& m) {
  set_real(pts::ai(1), m.t_zone.at(zone_));
  set_real(pts::ai(2), m.zone_flow.at(zone_));
}

void VavController::act(SimTime, double dt) {
  const double t_zone = points().real(pts::ai(1));
  const double u_c = cool_.step(t_zone - points().real(pts::av(1)), dt);
  const double u_h = heat_.step(points().real(pts::av(2)) - t_zone, dt);
  const Output out = sequence(u_c, u_h, config_.v_min, config_.v_cool_max);
  set_real(pts::ao(1), out.airflow_setpoint);
  set_real(pts::ao(2), out.reheat);
}

void VavController::restart() {
  cool_.reset();
  heat_.reset();
}

void VavController::apply(plant::ControlCommand& cmd) const {
  cmd.airflow_setpoint.at(zone_) = std::clamp(points().real(pts::ao(1)), 0.0, config_.v_cool_max);
  cmd.reheat.at(zone_) = std::clamp(points().real(pts::ao(2)), 0.0, 1.0);
}

// ---------------------------------------------------------------- AHU ----

AhuController::AhuController(DeviceConfig device, AhuConfig config)
    : Controller(device, PointTable(ObjectId(ObjectType::device, device.instance), device.name)),
      config_(config),
      valve_(config.gains.kp, config.gains.ki) {
  config_.schedule.validate();
  auto& t = points();
  t.add(sensor(pts::ai(1), "supply-air-temp", Units::degrees_celsius));
  t.add(command(pts::av(1), "supply-air-temp-setpoint", Units::degrees_celsius, real(config.sat_setpoint)));
  t.add(command(pts::ao(1), "cooling-valve", Units::no_units, real(0.0)));
  t.add(sensor(pts::ai(2), "mixed-air-temp", Units::degrees_celsius));
  t.add(sensor(pts::ai(3), "outdoor-air-temp", Units::degrees_celsius));
  t.add(sensor(pts::ai(4), "return-air-temp", Units::degrees_celsius));
  t.add(command(pts::bo(1), "supply-fan", Units::no_units, Enumerated{0}));
  t.add(command(pts::ao(2), "outdoor-air-fraction", Units::no_units, real(0.0)));
}

void AhuController::sense(const plant::MeasurementSet& m) {
  set_real(pts::ai(1), m.t_sa);
  set_real(pts::ai(2), m.t_ma);
  set_real(pts::ai(3), m.t_oa);
  set_real(pts::ai(4), m.t_ra);
}

void AhuController::act(SimTime now, double dt) {
  if (config_.schedule.occupied(now)) {
    points().set_local(pts::bo(1), Enumerated{1});
    set_real(pts::ao(2), config_.oa_frac_min);
    // Cooling valve opens on a positive error (supply warmer than setpoint).
    set_real(pts::ao(1), valve_.step(points().real(pts::ai(1)) - points().real(pts::av(1)), dt));
  } else {
    points().set_local(pts::bo(1), Enumerated{0});
    set_real(pts::ao(2), 0.0);
    valve_.reset();
    set_real(pts::ao(1), 0.0);
  }
}

void AhuController::restart() { valve_.reset(); }

void AhuController::apply(plant::ControlCommand& cmd) const {
  cmd.fan_on = points().binary(pts::bo(1));
  cmd.valve_cool = std::clamp(points().real(pts::ao(1)), 0.0, 1.0);
  cmd.oa_frac = std::clamp(points().real(pts::ao(2)), 0.0, 1.0);
}

// ------------------------------------------------------------ Chiller ----

ChillerController::ChillerController(DeviceConfig device, ChillerConfig config)
    : Controller(device, PointTable(ObjectId(ObjectType::device, device.instance), device.name)) {
  auto& t = points();
  t.add(sensor(pts::ai(1), "chw-supply-temp", Units::degrees_celsius));
  t.add(command(pts::av(1), "chw-setpoint", Units::degrees_celsius, real(config.chw_setpoint)));
  t.add(sensor(pts::ai(2), "coil-load", Units::kilowatts));
}

void ChillerController::sense(const plant::MeasurementSet& m) {
  set_real(pts::ai(1), m.t_chw);
  set_real(pts::ai(2), m.q_coil_kw);
}

void ChillerController::apply(plant::ControlCommand& cmd) const { cmd.chw_setpoint = points().real(pts::av(1)); }

// ------------------------------------------------------------ Testbed ----

TestbedControllers make_testbed(std::size_t zones, const VavConfig& vav, const AhuConfig& ahu,
                                const ChillerConfig& chiller, double reboot_s, std::uint16_t field_network,
                                std::uint8_t router_station) {
  if (zones == 0 || zones > 10) throw std::invalid_argument("zone count out of range");
  TestbedControllers tb;
  auto device = [&](std::string name, std::uint32_t instance, std::uint8_t station) {
    return DeviceConfig{std::move(name), instance, station, field_network, router_station, reboot_s, 0};
  };
  for (std::size_t i = 0; i < zones; ++i) {
    auto c = std::make_unique<VavController>(
        device("vav" + std::to_string(i + 1), 1101 + static_cast<std::uint32_t>(i), static_cast<std::uint8_t>(11 + i)),
        vav, i);
    tb.vavs.push_back(c.get());
    tb.all.push_back(std::move(c));
  }
  auto a = std::make_unique<AhuController>(device("ahu", 1201, 21), ahu);
  tb.ahu = a.get();
  tb.all.push_back(std::move(a));
  auto ch = std::make_unique<ChillerController>(device("chiller", 1301, 31), chiller);
  tb.chiller = ch.get();
  tb.all.push_back(std::move(ch));
  return tb;
}

}  // namespace bassim::control
