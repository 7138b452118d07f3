#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace bassim {

// Simulation clock value with microsecond resolution, counted from the
// scenario epoch (scenario date, 00:00).
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime from_micros(std::int64_t us) { return SimTime(us); }
  static SimTime from_seconds(double s) { return SimTime(static_cast<std::int64_t>(std::llround(s * 1e6))); }
  static constexpr SimTime from_whole_seconds(std::int64_t s) { return SimTime(s * 1'000'000); }

  constexpr std::int64_t micros() const { return us_; }
  constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }

  constexpr SimTime operator+(SimTime d) const { return SimTime(us_ + d.us_); }
  constexpr SimTime operator-(SimTime d) const { return SimTime(us_ - d.us_); }
  constexpr SimTime& operator+=(SimTime d) {
    us_ += d.us_;
    return *this;
  }
  constexpr auto operator<=>(const SimTime&) const = default;

 private:
  constexpr explicit SimTime(std::int64_t us) : us_(us) {}
  std::int64_t us_ = 0;
};

}  // namespace bassim
