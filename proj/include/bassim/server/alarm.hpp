#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bassim/util/sim_time.hpp"

namespace bassim::server {

struct AlarmRule {
  std::string id;
  std::string point;
  std::optional<double> high;
  std::optional<double> low;
  double deadband = 0.5;
  double min_duration_s = 300.0;
};

struct AlarmEvent {
  std::string rule;
  std::string point;
  SimTime exceeded_since;  // first sample beyond the limit
  SimTime onset;           // raised once the excursion lasted min_duration
  std::optional<SimTime> cleared;
  double peak = 0.0;  // furthest value beyond the limit
};

// Limit alarms with a minimum duration and a re-arm deadband.
class AlarmEvaluator {
 public:
  explicit AlarmEvaluator(std::vector<AlarmRule> rules);

  struct Change {
    std::size_t event;  // index into events()
    bool opened;        // false: cleared
  };
  // Feeds one sample; returns events opened or cleared by it.
  std::vector<Change> observe(const std::string& point, SimTime t, double value);

  const std::vector<AlarmRule>& rules() const { return rules_; }
  const std::vector<AlarmEvent>& events() const { return events_; }
  std::size_t active_count() const;

 private:
  struct RuleState {
    std::optional<SimTime> exceeded_since;
    double peak = 0.0;
    bool high_side = true;
    std::optional<std::size_t> active;
  };

  std::vector<AlarmRule> rules_;
  std::vector<RuleState> state_;
  std::vector<AlarmEvent> events_;
};

}  // namespace bassim::server
