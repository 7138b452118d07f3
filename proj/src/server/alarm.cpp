#include "bassim/server/alarm.hpp"

#include <algorithm>
#include <stdexcept>

namespace bassim::server {

AlarmEvaluator::AlarmEvaluator(std::vector<AlarmRule> rules) : rules_(std::move(rules)), state_(rules_.size()) {
  for (const auto& r : rules_) {
    if (!r.high && !r.low) throw std::invalid_argument("alarm rule " + r.id + " has no limit");
    if (r.deadband < 0 || r.min_duration_s < 0) throw std::invalid_argument("alarm rule " + r.id + " out of range");
  }
}

std::vector<AlarmEvaluator::Change> AlarmEvaluator::observe(const std::string& point, SimTime t, double value) {
  std::vector<Change> changes;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const AlarmRule& rule = rules_[i];
    if (rule.point != point) continue;
    RuleState& st = state_[i];
    const bool above = rule.high && value > *rule.high;
    const bool below = rule.low && value < *rule.low;

    if (st.active) {
      AlarmEvent& ev = events_[*st.active];
      const bool back_in = st.high_side ? value < *rule.high - rule.deadband : value > *rule.low + rule.deadband;
      if (back_in) {
        ev.cleared = t;
        changes.push_back({*st.active, false});
        st = RuleState{};
      } else {
        ev.peak = st.high_side ? std::max(ev.peak, value) : std::min(ev.peak, value);
      }
      continue;
    }

    if (!above && !below) {
      st.exceeded_since.reset();
      continue;
    }
    if (!st.exceeded_since || st.high_side != above) {
      st.exceeded_since = t;
      st.high_side = above;
      st.peak = value;
    } else {
      st.peak = above ? std::max(st.peak, value) : std::min(st.peak, value);
    }
    if ((t - *st.exceeded_since).seconds() >= rule.min_duration_s) {
      events_.push_back(AlarmEvent{rule.id, rule.point, *st.exceeded_since, t, std::nullopt, st.peak});
      st.active = events_.size() - 1;
      changes.push_back({events_.size() - 1, true});
    }
  }
  return changes;
}

std::size_t AlarmEvaluator::active_count() const {
  return static_cast<std::size_t>(std::count_if(state_.begin(), state_.end(), [](const auto& s) { return s.active.has_value(); }));
}

}  // namespace bassim::server
