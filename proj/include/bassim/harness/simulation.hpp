#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bassim/attack/attack_engine.hpp"
#include "bassim/attack/scenario.hpp"
#include "bassim/capture/capture.hpp"
#include "bassim/control/controllers.hpp"
#include "bassim/net/fabric.hpp"
#include "bassim/net/router.hpp"
#include "bassim/plant/measurement.hpp"
#include "bassim/plant/plant.hpp"
#include "bassim/plant/weather.hpp"
#include "bassim/server/supervisor.hpp"

namespace bassim::harness {

// Runtime failure inside the co-simulation (plant fault, I/O); exit code 3.
class RuntimeFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Semantic scenario problem found while assembling the testbed; exit code 2.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(attack::ConfigError error) : std::runtime_error(error.to_string()), error_(std::move(error)) {}
  const attack::ConfigError& error() const { return error_; }

 private:
  attack::ConfigError error_;
};

server::PointCatalog build_catalog(const control::TestbedControllers& testbed);

inline constexpr double kPlantStep = 1.0;  // s

struct SimulationOptions {
  std::string out_dir;  // empty: nothing written to disk
  bool keep_packets = false;
};

// One testbed instance: fabric, router, field controllers, plant, supervisor,
// attack engine and capture, advanced in 1 s plant steps.
class Simulation {
 public:
  Simulation(attack::ScenarioConfig config, SimulationOptions options = {});
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;
  ~Simulation();

  // Supervisor timers and scenario attacks.
  void start();
  // One plant step: fabric events up to now, controllers on their period,
  // plant physics to now + 1 s. False once the scenario end is reached.
  bool step();
  // Drains outstanding transactions after the end, flushes and closes outputs.
  void finish();
  // start + step until done + finish.
  void run();

  bool done() const { return now_ >= config_.end(); }
  SimTime now() const { return now_; }
  std::int64_t epoch_unix_us() const;

  const attack::ScenarioConfig& config() const { return config_; }
  net::Fabric& fabric() { return fabric_; }
  net::Router& router() { return *router_; }
  server::Supervisor& supervisor() { return *supervisor_; }
  const server::Supervisor& supervisor() const { return *supervisor_; }
  attack::AttackEngine& attacks() { return *attacks_; }
  const attack::AttackEngine& attacks() const { return *attacks_; }
  capture::Capture& capture() { return *capture_; }
  const capture::Capture& capture() const { return *capture_; }
  control::TestbedControllers& controllers() { return testbed_; }
  const plant::PlantState& plant_state() const { return state_; }
  const plant::ControlCommand& command() const { return command_; }
  const server::PointCatalog& catalog() const { return supervisor_->catalog(); }

  // Per-step observer (after physics), for live streaming and tests.
  std::function<void(const Simulation&)> on_step;

 private:
  void flush_trends(bool all);
  void write_audit(const server::AuditRecord& record);

  attack::ScenarioConfig config_;
  SimulationOptions options_;
  net::Fabric fabric_;
  std::unique_ptr<net::Router> router_;
  control::TestbedControllers testbed_;
  std::unique_ptr<server::Supervisor> supervisor_;
  std::unique_ptr<attack::AttackEngine> attacks_;
  std::unique_ptr<capture::Capture> capture_;
  plant::WeatherSeries weather_;
  plant::SensorNoise noise_;
  plant::PlantState state_;
  plant::ControlCommand command_;
  SimTime now_;
  std::int64_t control_period_s_ = 5;
  SimTime trend_slack_;
  std::ofstream trends_csv_;
  std::ofstream audit_jsonl_;
  bool started_ = false;
  bool finished_ = false;
};

std::string audit_json_line(const server::AuditRecord& record);

}  // namespace bassim::harness
