#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <optional>
#include <string>

#include "bassim/harness/simulation.hpp"
#include "bassim/server/http_api.hpp"

namespace bassim::harness {

// Paces simulation time against wall time at a fixed multiplier.
class Pacer {
 public:
  using Clock = std::chrono::steady_clock;

  explicit Pacer(std::optional<double> speed) : speed_(speed) {}
  void set_speed(std::optional<double> speed, SimTime sim_now);
  std::optional<double> speed() const { return speed_; }
  // Re-anchors after a pause so paused wall time is not made up later.
  void reset(SimTime sim_now);
  // Wall time still to wait before sim_now is due; zero when unpaced.
  Clock::duration remaining(SimTime sim_now) const;

 private:
  std::optional<double> speed_;
  Clock::time_point wall0_ = Clock::now();
  SimTime sim0_;
};

// Builds the published view of a simulation (on the simulation thread).
std::shared_ptr<server::ApiSnapshot> make_snapshot(Simulation& sim, std::optional<double> speed, bool running,
                                                   bool paused);

// Executes one queued API mutation against the simulation and answers it
// (possibly later, for writes that wait on a device).
struct LiveControl {
  bool paused = false;
  std::optional<double> speed;
  bool speed_changed = false;
};
void execute_command(Simulation& sim, server::ApiCommand command, LiveControl& control);

struct ServeOptions {
  std::string out_dir;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0: any free port
  std::optional<double> speed = 1.0;
  std::optional<std::string> token;
  std::string static_dir;
  bool exit_at_end = false;  // otherwise keep serving read-only until stopped
  std::chrono::milliseconds stream_period{250};
  std::function<void(int port)> on_listening;
};

// Runs the scenario behind the HTTP API until the end (and, unless
// exit_at_end, until `stop`), then finalizes the bundle. Returns the exit code.
int serve(const attack::ScenarioConfig& config, const ServeOptions& options, const std::atomic<bool>& stop);

}  // namespace bassim::harness
