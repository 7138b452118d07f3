#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bassim/control/field_device.hpp"
#include "bassim/control/pi_loop.hpp"
#include "bassim/plant/measurement.hpp"
#include "bassim/plant/plant.hpp"

namespace bassim::control {

struct Schedule {
  int occupied_start_s = 7 * 3600;
  int occupied_end_s = 20 * 3600;

  bool occupied(SimTime t) const;
  void validate() const;
};

struct LoopGains {
  double kp = 0.0;
  double ki = 0.0;
};

struct VavConfig {
  double cool_occupied = 23.89;
  double cool_unoccupied = 29.44;
  double heat_occupied = 21.11;
  double heat_unoccupied = 15.56;
  double v_min = 0.2;
  double v_cool_max = 1.5;
  LoopGains gains{0.3, 0.005};
  void validate() const;
};

struct AhuConfig {
  double sat_setpoint = 12.78;
  double oa_frac_min = 0.3;
  LoopGains gains{0.02, 0.002};
  Schedule schedule;
};

struct ChillerConfig {
  double chw_setpoint = 6.67;
};

// Object ids shared by the device types.
namespace pts {
bacnet::ObjectId ai(std::uint32_t n);
bacnet::ObjectId ao(std::uint32_t n);
bacnet::ObjectId av(std::uint32_t n);
bacnet::ObjectId bo(std::uint32_t n);
}  // namespace pts

class Controller {
 public:
  virtual ~Controller() = default;

  FieldDevice& device() { return device_; }
  const FieldDevice& device() const { return device_; }
  const std::string& name() const { return device_.config().name; }

  // One control period. Skipped entirely while the device reboots, so the
  // plant keeps the last commanded outputs. Returns false when skipped.
  bool control_step(const plant::MeasurementSet& m, SimTime now, double dt);

  // Copies this device's effective output points into the plant command.
  virtual void apply(plant::ControlCommand& cmd) const = 0;

 protected:
  Controller(DeviceConfig config, PointTable points) : device_(std::move(config), std::move(points)) {}

  virtual void sense(const plant::MeasurementSet& m) = 0;
  virtual void act(SimTime now, double dt) = 0;
  // Application restart after a reinitialize: volatile loop state is lost.
  virtual void restart() = 0;

  PointTable& points() { return device_.points(); }
  const PointTable& points() const { return device_.points(); }
  void set_real(const bacnet::ObjectId& id, double v) { points().set_local(id, bacnet::Real{static_cast<float>(v)}); }

  FieldDevice device_;
};

// VAV terminal. AI:1 zone temp, AI:2 airflow, AV:1 cooling setpoint,
// AV:2 heating setpoint, AO:1 airflow setpoint, AO:2 reheat.
class VavController : public Controller {
 public:
  VavController(DeviceConfig device, VavConfig config, std::size_t zone);
  void apply(plant::ControlCommand& cmd) const override;

  const PiLoop& cooling_loop() const { return cool_; }
  const PiLoop& heating_loop() const { return heat_; }
  std::size_t zone() const { return zone_; }

  struct Output {
    double airflow_setpoint;
    double reheat;
  };
  // The single-maximum sequence applied to loop outputs.
  static Output sequence(double u_cool, double u_heat, double v_min, double v_cool_max);

 protected:
  void sense(const plant::MeasurementSet& m) override;
  void act(SimTime now, double dt) override;
  void restart() override;

 private:
  VavConfig config_;
  std::size_t zone_;
  PiLoop cool_;
  PiLoop heat_;
};

// Air handler. AI:1 supply air temp, AV:1 SAT setpoint, AO:1 cooling valve,
// AI:2 mixed air temp, AI:3 outdoor air temp, AI:4 return air temp,
// BO:1 supply fan, AO:2 outdoor air fraction.
class AhuController : public Controller {
 public:
  AhuController(DeviceConfig device, AhuConfig config);
  void apply(plant::ControlCommand& cmd) const override;
  const PiLoop& valve_loop() const { return valve_; }

 protected:
  void sense(const plant::MeasurementSet& m) override;
  void act(SimTime now, double dt) override;
  void restart() override;

 private:
  AhuConfig config_;
  PiLoop valve_;
};

// Chiller plant. AI:1 CHW supply temp, AV:1 CHW setpoint, AI:2 coil load kW.
class ChillerController : public Controller {
 public:
  ChillerController(DeviceConfig device, ChillerConfig config);
  void apply(plant::ControlCommand& cmd) const override;

 protected:
  void sense(const plant::MeasurementSet& m) override;
  void act(SimTime, double) override {}
  void restart() override {}
};

struct TestbedControllers {
  std::vector<std::unique_ptr<Controller>> all;
  std::vector<VavController*> vavs;
  AhuController* ahu = nullptr;
  ChillerController* chiller = nullptr;
};

// vav1..vavN (1101.., stations 11..), ahu (1201, station 21), chiller
// (1301, station 31) on the given field network.
TestbedControllers make_testbed(std::size_t zones, const VavConfig& vav, const AhuConfig& ahu,
                                const ChillerConfig& chiller, double reboot_s,
                                std::uint16_t field_network = net::kDefaultFieldNetwork,
                                std::uint8_t router_station = 254);

}  // namespace bassim::control
